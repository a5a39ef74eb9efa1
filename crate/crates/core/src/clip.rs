//! Fixed-size crop plans that follow a trajectory, and temporal downsampling
//! plans for classifier input. Geometry only; no pixels are touched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::temporal::DiveInterval;
use crate::trajectory::TrackPoint;

pub const DEFAULT_DOWNSAMPLE_TARGET: usize = 16;
pub const DEFAULT_CROP_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropBox {
    pub frame: usize,
    pub left: usize,
    pub top: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedClip {
    pub boxes: Vec<CropBox>,
    pub source_interval: Option<DiveInterval>,
}

impl TrackedClip {
    pub fn with_source(mut self, interval: DiveInterval) -> Self {
        self.source_interval = Some(interval);
        self
    }
}

/// Origin for a box of `size` centred on `center`, clamped to `[0, extent - size]`.
fn clamped_origin(center: f64, size: usize, extent: usize) -> usize {
    // f64::round rounds half away from zero.
    let origin = (center - size as f64 / 2.0).round();
    let max = (extent - size) as f64;
    if origin.is_nan() {
        0
    } else {
        origin.clamp(0.0, max) as usize
    }
}

pub fn crop_track(
    trajectory: &[TrackPoint],
    frame_width: usize,
    frame_height: usize,
    crop_size: usize,
) -> Result<TrackedClip> {
    if crop_size == 0 {
        return Err(Error::param("crop size must be positive"));
    }
    if crop_size > frame_width.min(frame_height) {
        return Err(Error::param(format!(
            "crop size {crop_size} exceeds the {frame_width}x{frame_height} frame"
        )));
    }
    for w in trajectory.windows(2) {
        if w[1].frame != w[0].frame + 1 {
            return Err(Error::input(format!(
                "trajectory jumps from frame {} to {}",
                w[0].frame, w[1].frame
            )));
        }
    }
    let boxes = trajectory
        .iter()
        .map(|p| CropBox {
            frame: p.frame,
            left: clamped_origin(p.x, crop_size, frame_width),
            top: clamped_origin(p.y, crop_size, frame_height),
            size: crop_size,
        })
        .collect();
    Ok(TrackedClip { boxes, source_interval: None })
}

/// `target` frame indices into a clip of `clip_length` frames, evenly spread
/// with both ends pinned. Short clips repeat indices.
pub fn downsample_indices(clip_length: usize, target: usize) -> Vec<usize> {
    if clip_length == 0 || target == 0 {
        return Vec::new();
    }
    if target == 1 {
        return vec![0];
    }
    let span = clip_length - 1;
    let steps = target - 1;
    // round(i * span / steps), halves away from zero, in integers.
    (0..target).map(|i| (2 * i * span + steps) / (2 * steps)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativePoint {
    pub frame: usize,
    pub x_rel: f64,
    pub y_rel: f64,
}

pub fn relative_trajectory(trajectory: &[TrackPoint], clip: &TrackedClip) -> Result<Vec<RelativePoint>> {
    if trajectory.len() != clip.boxes.len() {
        return Err(Error::input(format!(
            "trajectory has {} frames, clip has {}",
            trajectory.len(),
            clip.boxes.len()
        )));
    }
    trajectory
        .iter()
        .zip(&clip.boxes)
        .map(|(p, b)| {
            if p.frame != b.frame {
                return Err(Error::input(format!("frame {} paired with box for frame {}", p.frame, b.frame)));
            }
            Ok(RelativePoint { frame: p.frame, x_rel: p.x - b.left as f64, y_rel: p.y - b.top as f64 })
        })
        .collect()
}

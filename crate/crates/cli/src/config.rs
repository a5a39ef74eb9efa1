//! Run configuration: one JSON document with a section per stage.
//! Every field is optional in the file; command-line flags win over it.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use divetrack::clip::{DEFAULT_CROP_SIZE, DEFAULT_DOWNSAMPLE_TARGET};
use divetrack::eval::{default_error_thresholds, default_iou_thresholds};
use divetrack::segmask::{DEFAULT_BLOB_THRESHOLD, DEFAULT_MIN_AREA};
use divetrack::signal::{HannKernel, DEFAULT_SPAN_SECONDS};
use divetrack::simulator::SceneSpec;
use divetrack::temporal::ExtractionParams;
use divetrack::trajectory::{default_min_inliers, MsacParams, Scoring, DEFAULT_MIN_X_SPREAD_PX};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: Option<PathBuf>,
    pub signal: SignalConfig,
    pub extraction: ExtractionParams,
    pub msac: MsacConfig,
    pub blobs: BlobConfig,
    pub clip: ClipConfig,
    pub simulator: SceneSpec,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    /// Falls back to a sidecar next to the signals file.
    pub frame_rate: Option<f64>,
    pub span_seconds: f64,
    /// Overrides `span_seconds` when set.
    pub span_frames: Option<usize>,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self { frame_rate: None, span_seconds: DEFAULT_SPAN_SECONDS, span_frames: None }
    }
}

impl SignalConfig {
    pub fn kernel(&self, frame_rate: f64) -> Result<HannKernel> {
        let span = match self.span_frames {
            Some(t) => t,
            None => {
                if !(self.span_seconds.is_finite() && self.span_seconds > 0.0) {
                    bail!("signal.span_seconds must be positive");
                }
                HannKernel::span_for_duration(frame_rate, self.span_seconds)
            }
        };
        Ok(HannKernel::new(span)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsacConfig {
    pub inlier_threshold_px: f64,
    pub max_iterations: usize,
    /// Defaults to 30% of the dive's frames, at least 5.
    pub min_inliers: Option<usize>,
    pub seed: u64,
    pub scoring: Scoring,
    pub min_x_spread_px: f64,
}

impl Default for MsacConfig {
    fn default() -> Self {
        let p = MsacParams::for_frames(0, 0);
        Self {
            inlier_threshold_px: p.inlier_threshold_px,
            max_iterations: p.max_iterations,
            min_inliers: None,
            seed: 0,
            scoring: p.scoring,
            min_x_spread_px: DEFAULT_MIN_X_SPREAD_PX,
        }
    }
}

impl MsacConfig {
    /// Parameters for dive `index` spanning `frames` frames. Each dive gets
    /// its own seed so dives can be fitted in any order.
    pub fn params_for(&self, frames: usize, index: usize) -> MsacParams {
        MsacParams {
            inlier_threshold_px: self.inlier_threshold_px,
            max_iterations: self.max_iterations,
            min_inliers: self.min_inliers.unwrap_or_else(|| default_min_inliers(frames)),
            seed: self.seed.wrapping_add(index as u64),
            scoring: self.scoring,
            min_x_spread_px: self.min_x_spread_px,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlobConfig {
    pub threshold: f64,
    pub min_area: usize,
}

impl Default for BlobConfig {
    fn default() -> Self {
        Self { threshold: DEFAULT_BLOB_THRESHOLD, min_area: DEFAULT_MIN_AREA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClipConfig {
    pub crop_size: usize,
    pub downsample_target: usize,
    /// Frame size for crop clamping when it cannot be read from masks or a
    /// `scene.json` sidecar.
    pub frame_width: Option<usize>,
    pub frame_height: Option<usize>,
}

impl Default for ClipConfig {
    fn default() -> Self {
        Self {
            crop_size: DEFAULT_CROP_SIZE,
            downsample_target: DEFAULT_DOWNSAMPLE_TARGET,
            frame_width: None,
            frame_height: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    /// IoU needed to pair a prediction with a label for trajectory scoring.
    pub match_threshold: f64,
    pub error_thresholds_px: Vec<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_thresholds: default_iou_thresholds(),
            match_threshold: 0.5,
            error_thresholds_px: default_error_thresholds(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: Self =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.extraction.validate()?;
        self.simulator.validate()?;
        self.msac.params_for(0, 0).validate()?;
        if let Some(rate) = self.signal.frame_rate {
            if !(rate.is_finite() && rate > 0.0) {
                bail!("signal.frame_rate must be positive");
            }
        }
        if !(0.0..=1.0).contains(&self.blobs.threshold) {
            bail!("blobs.threshold must lie in [0, 1]");
        }
        if self.clip.crop_size == 0 || self.clip.downsample_target == 0 {
            bail!("clip.crop_size and clip.downsample_target must be positive");
        }
        if self.eval.iou_thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            bail!("eval.iou_thresholds must lie in [0, 1]");
        }
        if !(self.eval.match_threshold > 0.0 && self.eval.match_threshold <= 1.0) {
            bail!("eval.match_threshold must lie in (0, 1]");
        }
        Ok(())
    }
}

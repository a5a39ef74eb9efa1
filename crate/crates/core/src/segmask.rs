//! Hot-spot masks to location candidates.
//!
//! Pixel `(col, row)` has its centre at coordinates `(col, row)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::LocationCandidate;

pub const DEFAULT_BLOB_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MIN_AREA: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct HotSpotMask {
    pub frame: usize,
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl HotSpotMask {
    pub fn new(frame: usize, width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("mask dimensions must be positive"));
        }
        if values.len() != width * height {
            return Err(Error::input(format!(
                "mask has {} values, expected {width}x{height}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::input(format!("mask value {v} outside [0, 1]")));
        }
        Ok(Self { frame, width, height, values })
    }

    pub fn zeros(frame: usize, width: usize, height: usize) -> Self {
        Self { frame, width, height, values: vec![0.0; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Raise pixels to `value` where it exceeds what is already there.
    pub(crate) fn max_assign(&mut self, col: usize, row: usize, value: f64) {
        let v = &mut self.values[row * self.width + col];
        *v = v.max(value.clamp(0.0, 1.0));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub area: usize,
    pub mean_intensity: f64,
}

/// Connected bright regions of `mask`, largest first.
///
/// Pixels at or above `threshold` are foreground and join their eight
/// neighbours. Centroids and mean intensity use the unthresholded values.
/// Equal areas keep raster order of each region's first pixel.
pub fn detect_blobs(mask: &HotSpotMask, threshold: f64, min_area: usize) -> Vec<Blob> {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; w * h];
    let mut blobs = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if seen[start] || mask.values[start] < threshold {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut area, mut sum_v, mut sum_x, mut sum_y) = (0usize, 0.0, 0.0, 0.0);
        while let Some(idx) = stack.pop() {
            let (col, row) = (idx % w, idx / w);
            let v = mask.values[idx];
            area += 1;
            sum_v += v;
            sum_x += v * col as f64;
            sum_y += v * row as f64;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (r, c) = (row as i64 + dr, col as i64 + dc);
                    if r < 0 || c < 0 || r >= h as i64 || c >= w as i64 {
                        continue;
                    }
                    let n = r as usize * w + c as usize;
                    if !seen[n] && mask.values[n] >= threshold {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        if area >= min_area {
            blobs.push(Blob {
                centroid_x: sum_x / sum_v,
                centroid_y: sum_y / sum_v,
                area,
                mean_intensity: sum_v / area as f64,
            });
        }
    }
    blobs.sort_by_key(|b| std::cmp::Reverse(b.area));
    blobs
}

pub fn blobs_to_candidates(blobs: &[Blob], frame: usize) -> Vec<LocationCandidate> {
    blobs
        .iter()
        .map(|b| LocationCandidate {
            frame,
            x: b.centroid_x,
            y: b.centroid_y,
            confidence: b.mean_intensity,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hard_disks(w: usize, h: usize, centers: &[(f64, f64)], r: f64) -> HotSpotMask {
        let mut m = HotSpotMask::zeros(0, w, h);
        for row in 0..h {
            for col in 0..w {
                if centers.iter().any(|(cx, cy)| (col as f64 - cx).hypot(row as f64 - cy) <= r) {
                    m.max_assign(col, row, 1.0);
                }
            }
        }
        m
    }

    /// Brute-force mean of pixel coordinates inside a disk.
    fn disk_oracle(cx: f64, cy: f64, r: f64) -> (f64, f64, usize) {
        let mut pts = Vec::new();
        for row in 0..200 {
            for col in 0..200 {
                if (col as f64 - cx).hypot(row as f64 - cy) <= r {
                    pts.push((col as f64, row as f64));
                }
            }
        }
        let n = pts.len();
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        (sx / n as f64, sy / n as f64, n)
    }

    #[test]
    fn empty_mask_has_no_blobs() {
        assert!(detect_blobs(&HotSpotMask::zeros(3, 40, 30), 0.5, 1).is_empty());
    }

    #[test]
    fn single_disk() {
        let blobs = detect_blobs(&hard_disks(64, 64, &[(20.0, 30.0)], 5.0), 0.5, 4);
        let (ox, oy, area) = disk_oracle(20.0, 30.0, 5.0);
        assert_eq!(blobs.len(), 1);
        assert_eq!(blobs[0].area, area);
        assert!((blobs[0].centroid_x - 20.0).abs() <= 0.5 && (blobs[0].centroid_y - 30.0).abs() <= 0.5);
        assert!((blobs[0].centroid_x - ox).abs() < 1e-9 && (blobs[0].centroid_y - oy).abs() < 1e-9);
        assert_eq!(blobs[0].mean_intensity, 1.0);
    }

    #[test]
    fn two_disks() {
        let blobs = detect_blobs(&hard_disks(64, 64, &[(10.0, 10.0), (40.0, 40.0)], 3.0), 0.5, 4);
        assert_eq!(blobs.len(), 2);
        for (cx, cy) in [(10.0, 10.0), (40.0, 40.0)] {
            assert!(blobs
                .iter()
                .any(|b| (b.centroid_x - cx).abs() <= 0.5 && (b.centroid_y - cy).abs() <= 0.5));
        }
    }

    #[test]
    fn diagonal_pixels_join() {
        let mut m = HotSpotMask::zeros(0, 4, 4);
        m.max_assign(0, 0, 1.0);
        m.max_assign(1, 1, 1.0);
        m.max_assign(2, 2, 1.0);
        assert_eq!(detect_blobs(&m, 0.5, 1).len(), 1);
    }

    #[test]
    fn intensity_weighted_centroid() {
        let mut m = HotSpotMask::zeros(0, 5, 1);
        m.max_assign(1, 0, 1.0);
        m.max_assign(2, 0, 0.5);
        let b = detect_blobs(&m, 0.5, 1)[0];
        assert!((b.centroid_x - (1.0 + 1.0) / 1.5).abs() < 1e-12);
        assert!((b.mean_intensity - 0.75).abs() < 1e-12);
    }

    #[test]
    fn mask_validation() {
        assert!(HotSpotMask::new(0, 2, 2, vec![0.0; 3]).is_err());
        assert!(HotSpotMask::new(0, 2, 1, vec![0.0, 1.5]).is_err());
        assert!(HotSpotMask::new(0, 0, 1, vec![]).is_err());
    }

    #[test]
    fn candidate_mapping() {
        assert!(blobs_to_candidates(&[], 4).is_empty());
        let b = Blob { centroid_x: 3.0, centroid_y: 4.0, area: 9, mean_intensity: 0.9 };
        let c = blobs_to_candidates(&[b, b], 12);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], LocationCandidate { frame: 12, x: 3.0, y: 4.0, confidence: 0.9 });
    }

    proptest! {
        #[test]
        fn translation_equivariance(cx in 8.0f64..30.0, cy in 8.0f64..30.0, dx in 0usize..20, dy in 0usize..20) {
            let a = detect_blobs(&hard_disks(60, 60, &[(cx, cy)], 4.0), 0.5, 1);
            let b = detect_blobs(&hard_disks(60, 60, &[(cx + dx as f64, cy + dy as f64)], 4.0), 0.5, 1);
            prop_assert_eq!(a.len(), 1);
            prop_assert_eq!(b.len(), 1);
            prop_assert!((b[0].centroid_x - a[0].centroid_x - dx as f64).abs() < 1e-9);
            prop_assert!((b[0].centroid_y - a[0].centroid_y - dy as f64).abs() < 1e-9);
        }

        #[test]
        fn min_area_is_monotone(seed in 0u64..500, lo in 1usize..20, extra in 0usize..20) {
            let mut rng = crate::rng::SimRng::new(seed);
            let vals: Vec<f64> = (0..30 * 30).map(|_| if rng.bernoulli(0.3) { rng.uniform() } else { 0.0 }).collect();
            let m = HotSpotMask::new(0, 30, 30, vals).unwrap();
            prop_assert!(detect_blobs(&m, 0.2, lo + extra).len() <= detect_blobs(&m, 0.2, lo).len());
        }

        #[test]
        fn symmetric_blob_centroid_is_center(cx in 6usize..40, cy in 6usize..40, r in 1.0f64..5.0) {
            let m = hard_disks(50, 50, &[(cx as f64, cy as f64)], r);
            let b = detect_blobs(&m, 0.5, 1)[0];
            prop_assert!((b.centroid_x - cx as f64).abs() < 1e-9);
            prop_assert!((b.centroid_y - cy as f64).abs() < 1e-9);
        }
    }
}

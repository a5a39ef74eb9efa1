//! Five-parameter diving trajectory model and its robust fit.
//!
//! Horizontal position is linear in time and vertical position is quadratic
//! in horizontal position:
//!
//! ```text
//! x = a0 + a1 * t
//! y = b0 + b1 * x + b2 * x^2
//! ```
//!
//! [`msac_fit`] searches for the model instance that best explains a cloud of
//! per-frame location candidates, most of which may be junk, by repeatedly
//! fitting minimal samples and scoring them with the truncated quadratic
//! (MSAC) cost `sum(min(d^2, tau^2))`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Below this horizontal spread the y-on-x quadratic is refused.
pub const DEFAULT_MIN_X_SPREAD_PX: f64 = 5.0;

/// Minimal sample: three candidates at distinct frames.
pub const MIN_SAMPLE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationCandidate {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl LocationCandidate {
    pub fn new(frame: usize, x: f64, y: f64) -> Self {
        Self { frame, x, y, confidence: 1.0 }
    }
}

/// One location per frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryModel {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

impl TrajectoryModel {
    pub fn is_finite(&self) -> bool {
        [self.a0, self.a1, self.b0, self.b1, self.b2].iter().all(|v| v.is_finite())
    }

    pub fn params(&self) -> [f64; 5] {
        [self.a0, self.a1, self.b0, self.b1, self.b2]
    }

    pub fn position(&self, t: f64) -> (f64, f64) {
        let x = self.a0 + self.a1 * t;
        (x, self.b0 + self.b1 * x + self.b2 * x * x)
    }

    /// Euclidean pixel distance between a candidate and the model at its frame.
    pub fn distance(&self, c: &LocationCandidate) -> f64 {
        let (x, y) = self.position(c.frame as f64);
        (c.x - x).hypot(c.y - y)
    }
}

pub fn evaluate_model(model: &TrajectoryModel, frame: usize) -> (f64, f64) {
    model.position(frame as f64)
}

pub fn fit_least_squares(candidates: &[LocationCandidate]) -> Result<TrajectoryModel> {
    fit_least_squares_with_floor(candidates, DEFAULT_MIN_X_SPREAD_PX)
}

/// Ordinary least squares for both halves of the model on the same points.
pub fn fit_least_squares_with_floor(
    candidates: &[LocationCandidate],
    min_x_spread: f64,
) -> Result<TrajectoryModel> {
    let n = candidates.len();
    if n < MIN_SAMPLE {
        return Err(Error::InsufficientData { needed: MIN_SAMPLE, got: n });
    }

    // x against t, centred.
    let nf = n as f64;
    let t_mean = candidates.iter().map(|c| c.frame as f64).sum::<f64>() / nf;
    let x_mean = candidates.iter().map(|c| c.x).sum::<f64>() / nf;
    let (mut stt, mut stx) = (0.0, 0.0);
    for c in candidates {
        let dt = c.frame as f64 - t_mean;
        stt += dt * dt;
        stx += dt * (c.x - x_mean);
    }
    if stt == 0.0 {
        return Err(Error::DegenerateTime);
    }
    let a1 = stx / stt;
    let a0 = x_mean - a1 * t_mean;

    // y against x: solve in a centred, scaled basis, then expand.
    let (x_min, x_max) = candidates
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.x), hi.max(c.x)));
    let spread = x_max - x_min;
    if spread.is_nan() || spread < min_x_spread || spread == 0.0 {
        return Err(Error::DegenerateGeometry { spread, floor: min_x_spread });
    }
    let scale = spread / 2.0;
    let design = DMatrix::from_fn(n, 3, |i, j| ((candidates[i].x - x_mean) / scale).powi(j as i32));
    let rhs = DVector::from_iterator(n, candidates.iter().map(|c| c.y));
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::input(format!("quadratic regression failed: {e}")))?;
    let (c0, c1, c2) = (coef[0], coef[1], coef[2]);
    let b2 = c2 / (scale * scale);
    let b1 = c1 / scale - 2.0 * b2 * x_mean;
    let b0 = c0 - c1 * x_mean / scale + b2 * x_mean * x_mean;

    let model = TrajectoryModel { a0, a1, b0, b1, b2 };
    if !model.is_finite() {
        return Err(Error::DegenerateGeometry { spread, floor: min_x_spread });
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scoring {
    /// Truncated quadratic cost.
    #[default]
    Msac,
    /// Plain inlier counting, expressed as `tau^2` per outlier.
    Ransac,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsacParams {
    pub inlier_threshold_px: f64,
    pub max_iterations: usize,
    pub min_inliers: usize,
    pub seed: u64,
    #[serde(default)]
    pub scoring: Scoring,
    #[serde(default = "default_spread")]
    pub min_x_spread_px: f64,
}

fn default_spread() -> f64 {
    DEFAULT_MIN_X_SPREAD_PX
}

impl MsacParams {
    /// Defaults for a clip covering `frames` frames: tau = 10 px, 500
    /// iterations, `min_inliers = max(5, 30% of frames)`.
    pub fn for_frames(frames: usize, seed: u64) -> Self {
        Self {
            inlier_threshold_px: 10.0,
            max_iterations: 500,
            min_inliers: default_min_inliers(frames),
            seed,
            scoring: Scoring::Msac,
            min_x_spread_px: DEFAULT_MIN_X_SPREAD_PX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inlier_threshold_px.is_finite() && self.inlier_threshold_px > 0.0) {
            return Err(Error::param("inlier_threshold_px must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be positive"));
        }
        if self.min_inliers < MIN_SAMPLE {
            return Err(Error::param(format!("min_inliers must be at least {MIN_SAMPLE}")));
        }
        Ok(())
    }

    fn point_cost(&self, d: f64) -> f64 {
        let tau2 = self.inlier_threshold_px * self.inlier_threshold_px;
        match self.scoring {
            Scoring::Msac => (d * d).min(tau2),
            Scoring::Ransac => {
                if d <= self.inlier_threshold_px {
                    0.0
                } else {
                    tau2
                }
            }
        }
    }
}

pub fn default_min_inliers(frames: usize) -> usize {
    ((frames as f64 * 0.3).ceil() as usize).max(5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsacFit {
    pub model: TrajectoryModel,
    /// Parallel to the input candidates.
    pub inliers: Vec<bool>,
    pub cost: f64,
    pub iterations: usize,
}

impl MsacFit {
    pub fn inlier_count(&self) -> usize {
        self.inliers.iter().filter(|f| **f).count()
    }
}

pub fn msac_fit(candidates: &[LocationCandidate], params: &MsacParams) -> Result<MsacFit> {
    msac_fit_traced(candidates, params, |_, _| {})
}

/// [`msac_fit`] that reports every scored hypothesis (sampled or refit) to `on_model`.
pub fn msac_fit_traced(
    candidates: &[LocationCandidate],
    params: &MsacParams,
    mut on_model: impl FnMut(&TrajectoryModel, f64),
) -> Result<MsacFit> {
    params.validate()?;
    if candidates.len() < params.min_inliers {
        return Err(Error::InsufficientData { needed: params.min_inliers, got: candidates.len() });
    }
    let mut frames: Vec<usize> = candidates.iter().map(|c| c.frame).collect();
    frames.sort_unstable();
    frames.dedup();
    if frames.len() < MIN_SAMPLE {
        return Err(Error::InsufficientData { needed: MIN_SAMPLE, got: frames.len() });
    }

    let score = |model: &TrajectoryModel| -> (f64, usize) {
        let mut cost = 0.0;
        let mut inliers = 0;
        for c in candidates {
            let d = model.distance(c);
            cost += params.point_cost(d);
            if d <= params.inlier_threshold_px {
                inliers += 1;
            }
        }
        (cost, inliers)
    };

    let mut rng = SimRng::new(params.seed);
    let n = candidates.len() as u64;
    let mut best: Option<(TrajectoryModel, f64)> = None;
    let mut sample = Vec::with_capacity(MIN_SAMPLE);

    for _ in 0..params.max_iterations {
        sample.clear();
        // Bounded redraws keep the random sequence fixed for a given seed.
        let mut attempts = 0;
        while sample.len() < MIN_SAMPLE && attempts < 64 {
            attempts += 1;
            let c = candidates[rng.below(n) as usize];
            if sample.iter().all(|s: &LocationCandidate| s.frame != c.frame) {
                sample.push(c);
            }
        }
        if sample.len() < MIN_SAMPLE {
            continue;
        }
        let Ok(model) = fit_least_squares_with_floor(&sample, params.min_x_spread_px) else {
            continue;
        };
        let (cost, inliers) = score(&model);
        on_model(&model, cost);
        if inliers >= params.min_inliers && best.is_none_or(|(_, c)| cost < c) {
            best = Some((model, cost));
        }
    }

    let Some((mut model, mut cost)) = best else {
        return Err(Error::NoConsensus { min_inliers: params.min_inliers });
    };

    // Refit on the consensus set while that lowers the cost.
    for _ in 0..8 {
        let members: Vec<LocationCandidate> = candidates
            .iter()
            .copied()
            .filter(|c| model.distance(c) <= params.inlier_threshold_px)
            .collect();
        let Ok(refit) = fit_least_squares_with_floor(&members, params.min_x_spread_px) else {
            break;
        };
        let (refit_cost, refit_inliers) = score(&refit);
        on_model(&refit, refit_cost);
        if refit_inliers < params.min_inliers || refit_cost >= cost {
            break;
        }
        model = refit;
        cost = refit_cost;
    }

    let inliers = candidates.iter().map(|c| model.distance(c) <= params.inlier_threshold_px).collect();
    Ok(MsacFit { model, inliers, cost, iterations: params.max_iterations })
}

/// One model position per frame of `t_start..=t_end`.
pub fn fill_trajectory(model: &TrajectoryModel, t_start: usize, t_end: usize) -> Vec<TrackPoint> {
    (t_start..=t_end)
        .map(|frame| {
            let (x, y) = evaluate_model(model, frame);
            TrackPoint { frame, x, y }
        })
        .collect()
}

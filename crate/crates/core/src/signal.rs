//! Per-frame event probability signals and Hann-window smoothing.
//!
//! A detector emits, for every frame, the probability that the frame shows
//! the start, the middle or the end of a dive. Those raw signals are jittery;
//! [`smooth`] replaces each sample by a Hann-weighted average of its
//! neighbourhood, which makes the downstream peak picking far more stable.
//!
//! The continuous smoothing integral is discretised as a weighted sum over
//! integer frame offsets `k` in `[-T/2, T/2]` with weights `cos²(πk/T)`.
//! At the signal edges the kernel is truncated and renormalised over the
//! samples that exist, so a constant signal stays constant everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs further than this outside `[0, 1]` are rejected; closer ones are clamped.
pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

/// Smoothing span used when none is configured.
pub const DEFAULT_SPAN_SECONDS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Start,
    Mid,
    End,
}

impl EventKind {
    pub const ALL: [EventKind; 3] = [EventKind::Start, EventKind::Mid, EventKind::End];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::Mid => "mid",
            EventKind::End => "end",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySignal {
    kind: EventKind,
    frame_rate: f64,
    values: Vec<f64>,
}

impl ProbabilitySignal {
    pub fn new(kind: EventKind, frame_rate: f64, values: Vec<f64>) -> Result<Self> {
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::param(format!("frame rate must be positive, got {frame_rate}")));
        }
        if values.is_empty() {
            return Err(Error::input("probability signal is empty"));
        }
        let mut values = values;
        for (t, v) in values.iter_mut().enumerate() {
            if !v.is_finite()
                || *v < -PROBABILITY_TOLERANCE
                || *v > 1.0 + PROBABILITY_TOLERANCE
            {
                return Err(Error::input(format!(
                    "{} probability at frame {t} is {v}, outside [0, 1]",
                    kind.name()
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { kind, frame_rate, values })
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Normalised Hann weights over offsets `-T/2..=T/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HannKernel {
    span: usize,
    weights: Vec<f64>,
}

impl HannKernel {
    pub fn new(span_frames: usize) -> Result<Self> {
        if span_frames < 2 || !span_frames.is_multiple_of(2) {
            return Err(Error::param(format!(
                "Hann span must be a positive even frame count, got {span_frames}"
            )));
        }
        let half = (span_frames / 2) as i64;
        let mut weights: Vec<f64> = (-half..=half)
            .map(|k| {
                if k.abs() == half {
                    0.0
                } else {
                    (std::f64::consts::PI * k as f64 / span_frames as f64).cos().powi(2)
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self { span: span_frames, weights })
    }

    /// Even span closest to `seconds * frame_rate`, never below 2.
    pub fn span_for_duration(frame_rate: f64, seconds: f64) -> usize {
        let half = (frame_rate * seconds / 2.0).round();
        if half.is_finite() && half >= 1.0 {
            2 * half as usize
        } else {
            2
        }
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn half_width(&self) -> usize {
        self.span / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at signed offset `k`; zero outside the support.
    pub fn weight(&self, k: i64) -> f64 {
        let idx = k + self.half_width() as i64;
        if idx < 0 || idx as usize >= self.weights.len() {
            0.0
        } else {
            self.weights[idx as usize]
        }
    }
}

pub fn smooth(signal: &ProbabilitySignal, kernel: &HannKernel) -> ProbabilitySignal {
    ProbabilitySignal {
        kind: signal.kind,
        frame_rate: signal.frame_rate,
        values: smooth_values(&signal.values, kernel),
    }
}

/// Smoothing on a raw slice; values are not range-checked.
pub fn smooth_values(values: &[f64], kernel: &HannKernel) -> Vec<f64> {
    let n = values.len() as i64;
    let half = kernel.half_width() as i64;
    let weights = kernel.weights();
    (0..n)
        .map(|t| {
            let lo = (t - half).max(0);
            let hi = (t + half).min(n - 1);
            let mut acc = 0.0;
            let mut norm = 0.0;
            for s in lo..=hi {
                let w = weights[(s - t + half) as usize];
                acc += values[s as usize] * w;
                norm += w;
            }
            (acc / norm).clamp(0.0, 1.0)
        })
        .collect()
}

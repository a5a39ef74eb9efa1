//! Class-balanced binary cross-entropy for sparse hot-spot targets.
//!
//! ```text
//! L(y_hat, y) = -ln(y_hat) * y / (2 (1 - beta)) - ln(1 - y_hat) * (1 - y) / (2 beta)
//! ```
//!
//! `beta = 0.5` is ordinary BCE; `beta > 0.5` punishes missed positives
//! harder than false alarms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Predictions are clamped to `[EPS, 1 - EPS]` before taking logs.
pub const EPS: f64 = 1e-12;

pub const DEFAULT_BETA: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedBceParams {
    beta: f64,
}

impl WeightedBceParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::param(format!("beta must lie in (0, 1), got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for WeightedBceParams {
    fn default() -> Self {
        Self { beta: DEFAULT_BETA }
    }
}

fn clamp_prediction(p: f64) -> f64 {
    p.clamp(EPS, 1.0 - EPS)
}

fn check(target: f64, beta: f64) -> Result<()> {
    WeightedBceParams::new(beta)?;
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::input(format!("target must lie in [0, 1], got {target}")));
    }
    Ok(())
}

pub fn weighted_bce(prediction: f64, target: f64, beta: f64) -> Result<f64> {
    check(target, beta)?;
    let p = clamp_prediction(prediction);
    Ok(-p.ln() * target / (2.0 * (1.0 - beta)) - (1.0 - p).ln() * (1.0 - target) / (2.0 * beta))
}

/// Derivative of [`weighted_bce`] with respect to the prediction.
pub fn weighted_bce_grad(prediction: f64, target: f64, beta: f64) -> Result<f64> {
    check(target, beta)?;
    let p = clamp_prediction(prediction);
    Ok(-target / (2.0 * (1.0 - beta) * p) + (1.0 - target) / (2.0 * beta * (1.0 - p)))
}

pub fn mean_weighted_bce(predictions: &[f64], targets: &[f64], beta: f64) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::input("no predictions"));
    }
    if predictions.len() != targets.len() {
        return Err(Error::input(format!(
            "{} predictions but {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    let mut total = 0.0;
    for (p, y) in predictions.iter().zip(targets) {
        total += weighted_bce(*p, *y, beta)?;
    }
    Ok(total / predictions.len() as f64)
}

/// Result of comparing the analytic gradient against central differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    pub samples: usize,
    pub step: f64,
    pub max_relative_error: f64,
    pub worst_prediction: f64,
    pub worst_target: f64,
    pub worst_beta: f64,
}

/// Relative gradient error `|analytic - numeric| / max(|analytic|, |numeric|, 1e-12)`.
pub fn gradient_relative_error(prediction: f64, target: f64, beta: f64, step: f64) -> Result<f64> {
    let analytic = weighted_bce_grad(prediction, target, beta)?;
    let numeric = (weighted_bce(prediction + step, target, beta)?
        - weighted_bce(prediction - step, target, beta)?)
        / (2.0 * step);
    Ok((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12))
}

pub fn gradient_check(samples: &[(f64, f64, f64)], step: f64) -> Result<GradientCheck> {
    let mut report = GradientCheck {
        samples: samples.len(),
        step,
        max_relative_error: 0.0,
        worst_prediction: f64::NAN,
        worst_target: f64::NAN,
        worst_beta: f64::NAN,
    };
    for &(p, y, beta) in samples {
        let err = gradient_relative_error(p, y, beta, step)?;
        if err >= report.max_relative_error {
            report.max_relative_error = err;
            report.worst_prediction = p;
            report.worst_target = y;
            report.worst_beta = beta;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn scalar_examples() {
        assert!((weighted_bce(0.5, 1.0, 0.5).unwrap() - LN2).abs() < 1e-12);
        assert!((weighted_bce(0.5, 1.0, 0.8).unwrap() - LN2 / 0.4).abs() < 1e-12);
        assert!((weighted_bce(0.5, 1.0, 0.8).unwrap() - 1.732868).abs() < 1e-6);
        assert!(weighted_bce(1.0 - 1e-13, 1.0, 0.8).unwrap() < 1e-11);
        assert!(weighted_bce(1.0, 1.0, 0.8).unwrap().is_finite());
        assert!(weighted_bce(0.0, 1.0, 0.8).unwrap().is_finite());
    }

    #[test]
    fn gradient_examples() {
        assert!((weighted_bce_grad(0.5, 1.0, 0.5).unwrap() + 2.0).abs() < 1e-12);
        assert!((weighted_bce_grad(0.5, 0.0, 0.5).unwrap() - 2.0).abs() < 1e-12);
        for p in [0.1, 0.3, 0.77] {
            for y in [0.0, 1.0, 0.4] {
                let standard = -y / p + (1.0 - y) / (1.0 - p);
                assert!((weighted_bce_grad(p, y, 0.5).unwrap() - standard).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn beta_out_of_range() {
        for beta in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(weighted_bce(0.5, 1.0, beta), Err(Error::InvalidParameter(_))));
            assert!(weighted_bce_grad(0.5, 1.0, beta).is_err());
        }
        assert!(weighted_bce(0.5, 1.5, 0.5).is_err());
    }

    #[test]
    fn mean_reduction() {
        let single = mean_weighted_bce(&[0.5], &[1.0], 0.8).unwrap();
        assert_eq!(single, weighted_bce(0.5, 1.0, 0.8).unwrap());
        assert!(mean_weighted_bce(&[1.0, 0.0], &[1.0, 0.0], 0.8).unwrap() < 1e-11);
        let pair = mean_weighted_bce(&[0.5, 0.5], &[1.0, 1.0], 0.5).unwrap();
        assert!((pair - (LN2 + LN2) / 2.0).abs() < 1e-12);
        let mixed = mean_weighted_bce(&[0.5, 0.5], &[1.0, 1.0], 0.8).unwrap();
        assert!((mixed - LN2 / 0.4).abs() < 1e-12);
        assert!(mean_weighted_bce(&[], &[], 0.5).is_err());
        assert!(mean_weighted_bce(&[0.5], &[1.0, 0.0], 0.5).is_err());
    }

    #[test]
    fn reduces_to_plain_bce() {
        for i in 1..100 {
            let p = i as f64 / 100.0;
            for y in [0.0, 1.0] {
                let plain = -y * p.ln() - (1.0 - y) * (1.0 - p).ln();
                assert!((weighted_bce(p, y, 0.5).unwrap() - plain).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monotone_in_prediction() {
        let mut prev_pos = f64::INFINITY;
        let mut prev_neg = f64::NEG_INFINITY;
        for i in 1..200 {
            let p = i as f64 / 200.0;
            let pos = weighted_bce(p, 1.0, 0.8).unwrap();
            let neg = weighted_bce(p, 0.0, 0.8).unwrap();
            assert!(pos < prev_pos && neg > prev_neg);
            prev_pos = pos;
            prev_neg = neg;
        }
    }

    #[test]
    fn positive_misses_cost_more() {
        for i in 1..50 {
            let m = i as f64 / 100.0;
            let missed_positive = weighted_bce(m, 1.0, 0.8).unwrap();
            let false_alarm = weighted_bce(1.0 - m, 0.0, 0.8).unwrap();
            assert!(missed_positive > false_alarm);
            let a = weighted_bce(m, 1.0, 0.5).unwrap();
            let b = weighted_bce(1.0 - m, 0.0, 0.5).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_agreement() {
        let mut rng = SimRng::new(4);
        let samples: Vec<_> = (0..1000)
            .map(|_| (rng.uniform_in(0.01, 0.99), if rng.bernoulli(0.5) { 1.0 } else { 0.0 }, rng.uniform_in(0.05, 0.95)))
            .collect();
        let report = gradient_check(&samples, 1e-6).unwrap();
        assert!(report.max_relative_error <= 1e-5, "{report:?}");
    }
}

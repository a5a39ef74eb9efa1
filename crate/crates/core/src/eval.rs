//! Interval matching with precision/recall/F1, IoU threshold sweeps, and
//! trajectory error curves.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::temporal::{interval_iou, DiveInterval};
use crate::trajectory::TrackPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub predicted: usize,
    pub truth: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub pairs: Vec<MatchPair>,
}

impl MatchReport {
    /// Build from counts. An empty denominator gives precision (or recall) 1.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, pairs: Vec<MatchPair>) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
            pairs,
        }
    }

    /// Pool counts of several reports; pairs are dropped.
    pub fn aggregate<'a>(reports: impl IntoIterator<Item = &'a MatchReport>) -> Self {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for r in reports {
            tp += r.true_positives;
            fp += r.false_positives;
            fn_ += r.false_negatives;
        }
        Self::from_counts(tp, fp, fn_, Vec::new())
    }
}

/// One-to-one greedy matching in descending IoU order.
///
/// Pairs below `iou_threshold` never match. Equal IoUs favour the earlier
/// prediction, then the earlier truth.
pub fn match_intervals(predicted: &[DiveInterval], truth: &[DiveInterval], iou_threshold: f64) -> MatchReport {
    let mut edges = Vec::new();
    for (p, a) in predicted.iter().enumerate() {
        for (t, b) in truth.iter().enumerate() {
            let iou = interval_iou(a, b);
            if iou >= iou_threshold && iou > 0.0 {
                edges.push(MatchPair { predicted: p, truth: t, iou });
            }
        }
    }
    edges.sort_by(|a, b| {
        b.iou
            .partial_cmp(&a.iou)
            .unwrap_or(Ordering::Equal)
            .then(a.predicted.cmp(&b.predicted))
            .then(a.truth.cmp(&b.truth))
    });
    let mut used_p = vec![false; predicted.len()];
    let mut used_t = vec![false; truth.len()];
    let mut pairs = Vec::new();
    for e in edges {
        if !used_p[e.predicted] && !used_t[e.truth] {
            used_p[e.predicted] = true;
            used_t[e.truth] = true;
            pairs.push(e);
        }
    }
    pairs.sort_by_key(|p| p.predicted);
    let tp = pairs.len();
    MatchReport::from_counts(tp, predicted.len() - tp, truth.len() - tp, pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub report: MatchReport,
}

pub fn f1_iou_sweep(predicted: &[DiveInterval], truth: &[DiveInterval], thresholds: &[f64]) -> Vec<SweepPoint> {
    thresholds
        .iter()
        .map(|&threshold| SweepPoint { threshold, report: match_intervals(predicted, truth, threshold) })
        .collect()
}

/// 0.1, 0.2, ..., 0.9.
pub fn default_iou_thresholds() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// 1, 2, ..., 20 pixels.
pub fn default_error_thresholds() -> Vec<f64> {
    (1..=20).map(f64::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub fraction: f64,
}

/// Fraction of clips whose mean error is at most each threshold.
pub fn trajectory_error_curve(per_clip_mean_errors: &[f64], thresholds: &[f64]) -> Result<Vec<CurvePoint>> {
    if per_clip_mean_errors.is_empty() {
        return Err(Error::input("no clip errors to summarise"));
    }
    if let Some(e) = per_clip_mean_errors.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::input(format!("clip error {e} is not a non-negative number")));
    }
    let n = per_clip_mean_errors.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&threshold| CurvePoint {
            threshold,
            fraction: per_clip_mean_errors.iter().filter(|e| **e <= threshold).count() as f64 / n,
        })
        .collect())
}

/// Mean Euclidean distance between two tracks covering the same frames.
pub fn clip_mean_error(predicted: &[TrackPoint], truth: &[TrackPoint]) -> Result<f64> {
    if predicted.is_empty() {
        return Err(Error::input("empty track"));
    }
    if predicted.len() != truth.len() {
        return Err(Error::input(format!(
            "tracks cover {} and {} frames",
            predicted.len(),
            truth.len()
        )));
    }
    let mut total = 0.0;
    for (p, t) in predicted.iter().zip(truth) {
        if p.frame != t.frame {
            return Err(Error::input(format!("frame {} paired with frame {}", p.frame, t.frame)));
        }
        total += (p.x - t.x).hypot(p.y - t.y);
    }
    Ok(total / predicted.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use proptest::prelude::*;

    fn iv(a: usize, b: usize) -> DiveInterval {
        DiveInterval::new(a, b).unwrap()
    }

    /// Best one-to-one matching by (count, total IoU), by enumerating every
    /// assignment of predictions to truths or nothing.
    fn exhaustive(pred: &[DiveInterval], truth: &[DiveInterval], thr: f64) -> (usize, f64) {
        fn go(i: usize, pred: &[DiveInterval], truth: &[DiveInterval], thr: f64, used: &mut Vec<bool>) -> (usize, f64) {
            if i == pred.len() {
                return (0, 0.0);
            }
            let mut best = go(i + 1, pred, truth, thr, used);
            for t in 0..truth.len() {
                let iou = interval_iou(&pred[i], &truth[t]);
                if !used[t] && iou >= thr && iou > 0.0 {
                    used[t] = true;
                    let (c, s) = go(i + 1, pred, truth, thr, used);
                    used[t] = false;
                    let cand = (c + 1, s + iou);
                    if cand.0 > best.0 || (cand.0 == best.0 && cand.1 > best.1) {
                        best = cand;
                    }
                }
            }
            best
        }
        go(0, pred, truth, thr, &mut vec![false; truth.len()])
    }

    #[test]
    fn exact_predictions() {
        let truth = vec![iv(0, 10), iv(50, 70)];
        let r = match_intervals(&truth, &truth, 0.5);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        for p in f1_iou_sweep(&truth, &truth, &default_iou_thresholds()) {
            assert_eq!(p.report.f1, 1.0);
        }
    }

    #[test]
    fn empty_predictions() {
        let r = match_intervals(&[], &[iv(0, 10), iv(20, 30)], 0.5);
        assert_eq!((r.recall, r.false_negatives, r.precision, r.f1), (0.0, 2, 1.0, 0.0));
        let both = match_intervals(&[], &[], 0.5);
        assert_eq!(both.f1, 1.0);
    }

    #[test]
    fn two_by_two_example() {
        // Cross IoUs: p0-t0 0.9, p0-t1 0.4, p1-t0 0.3, p1-t1 0.8 (approximately).
        let truth = vec![iv(0, 100), iv(60, 160)];
        let pred = vec![iv(0, 90), iv(70, 160)];
        let r = match_intervals(&pred, &truth, 0.5);
        assert_eq!(r.true_positives, 2);
        assert_eq!(
            r.pairs.iter().map(|p| (p.predicted, p.truth)).collect::<Vec<_>>(),
            vec![(0, 0), (1, 1)]
        );
        assert_eq!(exhaustive(&pred, &truth, 0.5).0, 2);
    }

    #[test]
    fn greedy_can_lose_pairs_at_low_thresholds() {
        // With overlapping chains and a low threshold the best single edge
        // blocks two weaker ones; the dive data never looks like this.
        let pred = vec![iv(0, 100), iv(105, 200)];
        let truth = vec![iv(80, 130), iv(180, 250)];
        let greedy = match_intervals(&pred, &truth, 0.1);
        let best = exhaustive(&pred, &truth, 0.1);
        assert_eq!(greedy.true_positives, 1);
        assert_eq!(best.0, 2);
    }

    #[test]
    fn ties_prefer_earlier_prediction() {
        let truth = vec![iv(10, 20)];
        let pred = vec![iv(10, 20), iv(10, 20)];
        let r = match_intervals(&pred, &truth, 0.5);
        assert_eq!(r.pairs[0].predicted, 0);
        assert_eq!(r.false_positives, 1);
    }

    #[test]
    fn error_curve_examples() {
        let c = trajectory_error_curve(&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0]).unwrap();
        let f: Vec<f64> = c.iter().map(|p| p.fraction).collect();
        assert_eq!(f, vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert!(trajectory_error_curve(&[0.0; 4], &[0.5]).unwrap().iter().all(|p| p.fraction == 1.0));
        assert!(trajectory_error_curve(&[], &[1.0]).is_err());
        assert!(trajectory_error_curve(&[-1.0], &[1.0]).is_err());
    }

    #[test]
    fn clip_error_examples() {
        let track: Vec<_> = (0..7).map(|f| TrackPoint { frame: f, x: f as f64, y: 2.0 * f as f64 }).collect();
        assert_eq!(clip_mean_error(&track, &track).unwrap(), 0.0);
        let shifted: Vec<_> = track.iter().map(|p| TrackPoint { x: p.x + 3.0, y: p.y + 4.0, ..*p }).collect();
        assert!((clip_mean_error(&shifted, &track).unwrap() - 5.0).abs() < 1e-12);
        let a = [TrackPoint { frame: 3, x: 0.0, y: 0.0 }];
        let b = [TrackPoint { frame: 3, x: 0.0, y: 7.5 }];
        assert_eq!(clip_mean_error(&a, &b).unwrap(), 7.5);
        assert!(clip_mean_error(&a, &track[..1]).is_err());
        assert!(clip_mean_error(&track, &track[..2]).is_err());
    }

    #[test]
    fn jittered_boundaries_sweep() {
        let truth: Vec<_> = (0..5).map(|i| iv(100 * i + 10, 100 * i + 70)).collect();
        let mut rng = SimRng::new(3);
        let pred: Vec<_> = truth
            .iter()
            .map(|t| {
                let ds = rng.below(5) as i64 - 2;
                let de = rng.below(5) as i64 - 2;
                iv((t.t_start as i64 + ds) as usize, (t.t_end as i64 + de) as usize)
            })
            .collect();
        let sweep = f1_iou_sweep(&pred, &truth, &default_iou_thresholds());
        for p in &sweep {
            if p.threshold <= 0.87 {
                assert_eq!(p.report.f1, 1.0, "threshold {}", p.threshold);
            }
        }
        for w in sweep.windows(2) {
            assert!(w[1].report.f1 <= w[0].report.f1);
        }
    }

    fn disjoint_truth(rng: &mut SimRng, n: usize) -> Vec<DiveInterval> {
        let mut t = rng.below(20) as usize;
        (0..n)
            .map(|_| {
                let s = t + 1 + rng.below(30) as usize;
                let e = s + 5 + rng.below(60) as usize;
                t = e;
                iv(s, e)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn counts_are_consistent(seed in 0u64..2000, np in 0usize..7, nt in 0usize..7, thr in 0.05f64..1.0) {
            let mut rng = SimRng::new(seed);
            let truth = disjoint_truth(&mut rng, nt);
            let pred: Vec<_> = (0..np).map(|_| { let s = rng.below(300) as usize; iv(s, s + 1 + rng.below(80) as usize) }).collect();
            let r = match_intervals(&pred, &truth, thr);
            prop_assert_eq!(r.true_positives + r.false_negatives, truth.len());
            prop_assert_eq!(r.true_positives + r.false_positives, pred.len());
            for p in &r.pairs {
                prop_assert!(p.iou >= thr);
            }
        }

        #[test]
        fn permutation_invariant(seed in 0u64..2000, np in 0usize..7, nt in 0usize..7) {
            let mut rng = SimRng::new(seed);
            let truth = disjoint_truth(&mut rng, nt);
            let pred: Vec<_> = (0..np).map(|_| { let s = rng.below(300) as usize; iv(s, s + 1 + rng.below(80) as usize) }).collect();
            let mut pred_rev = pred.clone();
            pred_rev.reverse();
            let mut truth_rev = truth.clone();
            truth_rev.reverse();
            let a = match_intervals(&pred, &truth, 0.5);
            let b = match_intervals(&pred_rev, &truth_rev, 0.5);
            prop_assert_eq!(a.true_positives, b.true_positives);
            let sa: f64 = a.pairs.iter().map(|p| p.iou).sum();
            let sb: f64 = b.pairs.iter().map(|p| p.iou).sum();
            prop_assert!((sa - sb).abs() < 1e-12);
        }

        #[test]
        fn greedy_is_optimal_on_dive_like_instances(seed in 0u64..5000, np in 0usize..7, nt in 0usize..7, thr in 0.5f64..1.0) {
            let mut rng = SimRng::new(seed);
            let truth = disjoint_truth(&mut rng, nt);
            let pred: Vec<_> = (0..np).map(|_| { let s = rng.below(300) as usize; iv(s, s + 1 + rng.below(80) as usize) }).collect();
            let r = match_intervals(&pred, &truth, thr);
            let (count, total) = exhaustive(&pred, &truth, thr);
            prop_assert_eq!(r.true_positives, count);
            let greedy_total: f64 = r.pairs.iter().map(|p| p.iou).sum();
            prop_assert!((greedy_total - total).abs() < 1e-9);
        }

        #[test]
        fn curve_is_monotone(errors in prop::collection::vec(0.0f64..50.0, 1..40)) {
            let c = trajectory_error_curve(&errors, &default_error_thresholds()).unwrap();
            for w in c.windows(2) {
                prop_assert!(w[0].fraction <= w[1].fraction);
            }
        }
    }
}

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export runs one stage on a simulated scene and returns JSON for the
//! page to draw. The `*_json` functions hold the logic and are plain Rust so
//! they can be tested natively.

use divetrack::eval::{match_intervals, MatchReport};
use divetrack::loss::weighted_bce;
use divetrack::signal::{smooth, HannKernel};
use divetrack::simulator::{simulate_scene, SceneSpec};
use divetrack::temporal::{extract_dives, DiveInterval, ExtractionParams};
use divetrack::trajectory::{fill_trajectory, msac_fit, MsacParams, TrackPoint};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Signals {
    start: Vec<f64>,
    mid: Vec<f64>,
    end: Vec<f64>,
}

#[derive(Serialize)]
struct ExtractionView {
    frame_rate: f64,
    span_frames: usize,
    raw: Signals,
    smoothed: Signals,
    truth: Vec<DiveInterval>,
    found: Vec<DiveInterval>,
    report: MatchReport,
}

/// Simulate a scene, smooth its signals with a `span_frames` Hann window and
/// extract dives at `mid_threshold`.
pub fn extraction_json(seed: u64, noise: f64, span_frames: usize, mid_threshold: f64) -> Result<String, String> {
    let spec = SceneSpec { seed, dive_count: 3, signal_noise_sigma: noise, ..SceneSpec::default() };
    let scene = simulate_scene(&spec).map_err(|e| e.to_string())?;
    let kernel = HannKernel::new(span_frames).map_err(|e| e.to_string())?;
    let [s, m, e] = scene.signals().map(|sig| smooth(sig, &kernel));
    let params = ExtractionParams { mid_threshold, ..ExtractionParams::default() };
    let found = extract_dives(&s, &m, &e, &params).map_err(|e| e.to_string())?;
    let truth = scene.truth_intervals();
    to_json(&ExtractionView {
        frame_rate: spec.frame_rate,
        span_frames,
        raw: Signals { start: scene.start.values().to_vec(), mid: scene.mid.values().to_vec(), end: scene.end.values().to_vec() },
        smoothed: Signals { start: s.values().to_vec(), mid: m.values().to_vec(), end: e.values().to_vec() },
        report: match_intervals(&found, &truth, 0.5),
        truth,
        found,
    })
}

#[derive(Serialize)]
struct CandidateView {
    frame: usize,
    x: f64,
    y: f64,
    outlier: bool,
    inlier: bool,
}

#[derive(Serialize)]
struct TrackingView {
    width: usize,
    height: usize,
    candidates: Vec<CandidateView>,
    truth: Vec<TrackPoint>,
    fit: Option<Vec<TrackPoint>>,
    error: Option<String>,
    mean_error_px: Option<f64>,
}

/// Fit one simulated dive whose candidates carry `outlier_rate` outliers and
/// `noise_px` of jitter, using an inlier threshold of `tau_px`.
pub fn tracking_json(seed: u64, outlier_rate: f64, noise_px: f64, tau_px: f64) -> Result<String, String> {
    let spec = SceneSpec {
        seed,
        dive_count: 1,
        candidate_noise_sigma_px: noise_px,
        outlier_rate,
        miss_rate: 0.1,
        ..SceneSpec::default()
    };
    let scene = simulate_scene(&spec).map_err(|e| e.to_string())?;
    let dive = &scene.dives[0];
    let candidates: Vec<_> = scene.candidates.iter().map(|c| c.candidate).collect();
    let params = MsacParams { inlier_threshold_px: tau_px, ..MsacParams::for_frames(dive.interval.frame_count(), seed) };
    let (fit, inliers, error) = match msac_fit(&candidates, &params) {
        Ok(f) => (Some(fill_trajectory(&f.model, dive.interval.t_start, dive.interval.t_end)), f.inliers, None),
        Err(e) => (None, vec![false; candidates.len()], Some(e.to_string())),
    };
    let mean_error_px = fit.as_ref().map(|track| {
        track.iter().zip(&dive.truth_points).map(|(p, q)| (p.x - q.x).hypot(p.y - q.y)).sum::<f64>() / track.len() as f64
    });
    to_json(&TrackingView {
        width: spec.frame_width,
        height: spec.frame_height,
        candidates: scene
            .candidates
            .iter()
            .zip(inliers)
            .map(|(c, inlier)| CandidateView { frame: c.candidate.frame, x: c.candidate.x, y: c.candidate.y, outlier: c.outlier, inlier })
            .collect(),
        truth: dive.truth_points.clone(),
        fit,
        error,
        mean_error_px,
    })
}

#[derive(Serialize)]
struct LossView {
    beta: f64,
    prediction: Vec<f64>,
    positive: Vec<f64>,
    negative: Vec<f64>,
}

/// Weighted BCE against prediction for a positive and a negative target.
pub fn loss_curve_json(beta: f64) -> Result<String, String> {
    let prediction: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let curve = |y: f64| prediction.iter().map(|p| weighted_bce(*p, y, beta)).collect::<Result<Vec<_>, _>>();
    let positive = curve(1.0).map_err(|e| e.to_string())?;
    let negative = curve(0.0).map_err(|e| e.to_string())?;
    to_json(&LossView { beta, prediction, positive, negative })
}

#[wasm_bindgen]
pub fn extraction(seed: u32, noise: f64, span_frames: u32, mid_threshold: f64) -> Result<String, JsError> {
    extraction_json(seed.into(), noise, span_frames as usize, mid_threshold).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tracking(seed: u32, outlier_rate: f64, noise_px: f64, tau_px: f64) -> Result<String, JsError> {
    tracking_json(seed.into(), outlier_rate, noise_px, tau_px).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn loss_curve(beta: f64) -> Result<String, JsError> {
    loss_curve_json(beta).map_err(|e| JsError::new(&e))
}

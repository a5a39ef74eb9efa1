//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. Runs without the libtest harness so the
//! lines always reach the terminal.

use std::collections::BTreeMap;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use divetrack::clip::downsample_indices;
use divetrack::divecode::{enumerate_codes, format_code, parse_code};
use divetrack::eval::{clip_mean_error, default_iou_thresholds, f1_iou_sweep, match_intervals, MatchReport};
use divetrack::loss::{gradient_relative_error, weighted_bce};
use divetrack::rng::SimRng;
use divetrack::segmask::{detect_blobs, HotSpotMask};
use divetrack::signal::{smooth_values, HannKernel};
use divetrack::simulator::{render_hotspot, simulate_scene, SceneSpec};
use divetrack::temporal::{extract_dives, interval_iou, DiveInterval};
use divetrack::trajectory::{fill_trajectory, fit_least_squares, msac_fit, LocationCandidate, MsacParams};
use divetrack::Error;

/// Outcome of one criterion: pass flag plus a short measurement summary.
type Outcome = (bool, String);

/// A named criterion check.
type Criterion = (&'static str, fn() -> Outcome);

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

// 1. Smoothing

fn direct_sum(values: &[f64], span: usize, t: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (s, v) in values.iter().enumerate() {
        let k = s as f64 - t as f64;
        if k.abs() <= span as f64 / 2.0 {
            let w = (std::f64::consts::PI * k / span as f64).cos().powi(2);
            num += v * w;
            den += w;
        }
    }
    num / den
}

fn smoothing() -> Outcome {
    let ((worst_oracle, worst_const), elapsed) = {
        let t = Instant::now();
        let mut rng = SimRng::new(101);
        let (mut wo, mut wc) = (0.0f64, 0.0f64);
        for _ in 0..100 {
            let len = 1 + rng.below(100) as usize;
            let span = 2 * (1 + rng.below(15) as usize);
            let kernel = HannKernel::new(span).unwrap();
            let values: Vec<f64> = (0..len).map(|_| rng.uniform()).collect();
            let smoothed = smooth_values(&values, &kernel);
            for (t, g) in smoothed.iter().enumerate() {
                wo = wo.max((g - direct_sum(&values, span, t)).abs());
            }
            let c = rng.uniform();
            for g in smooth_values(&vec![c; len], &kernel) {
                wc = wc.max((g - c).abs());
            }
        }
        ((wo, wc), t.elapsed())
    };
    let pass = worst_oracle <= 1e-9 && worst_const <= 1e-9 && elapsed < Duration::from_secs(1);
    (pass, format!("max oracle gap {worst_oracle:.2e}, max constant drift {worst_const:.2e}, {elapsed:.2?}"))
}

// 2. Loss

fn loss() -> Outcome {
    let mut bce_gap = 0.0f64;
    for i in 0..100 {
        let y = i as f64 / 99.0;
        for j in 0..100 {
            let p = (j as f64 + 0.5) / 100.0;
            let plain = -y * p.ln() - (1.0 - y) * (1.0 - p).ln();
            bce_gap = bce_gap.max((weighted_bce(p, y, 0.5).unwrap() - plain).abs());
        }
    }
    let mut rng = SimRng::new(202);
    let mut grad = 0.0f64;
    for _ in 0..1000 {
        let p = rng.uniform_in(0.01, 0.99);
        let y = if rng.bernoulli(0.5) { 1.0 } else { rng.uniform() };
        let beta = rng.uniform_in(0.05, 0.95);
        grad = grad.max(gradient_relative_error(p, y, beta, 1e-6).unwrap());
    }
    let asymmetric = (1..100).all(|i| {
        let m = i as f64 / 100.0;
        weighted_bce(1.0 - m, 1.0, 0.8).unwrap() > weighted_bce(m, 0.0, 0.8).unwrap()
    });
    let pass = bce_gap <= 1e-12 && grad <= 1e-5 && asymmetric;
    (pass, format!("BCE gap {bce_gap:.2e}, worst gradient error {grad:.2e}, asymmetry {asymmetric}"))
}

// 3. Exact recovery

fn noise_free_dives(count: usize) -> Vec<(divetrack::simulator::SimulatedDive, Vec<LocationCandidate>)> {
    let mut out = Vec::new();
    let mut seed = 300;
    while out.len() < count {
        let scene = simulate_scene(&SceneSpec { seed, dive_count: 3, ..SceneSpec::default() }).unwrap();
        for d in &scene.dives {
            out.push((d.clone(), scene.candidates_in(&d.interval)));
        }
        seed += 1;
    }
    out.truncate(count);
    out
}

fn exact_recovery() -> Outcome {
    let (mut ls_gap, mut msac_gap, mut fill_gap) = (0.0f64, 0.0f64, 0.0f64);
    let dives = noise_free_dives(50);
    for (dive, cands) in &dives {
        let truth = dive.truth_model.params();
        let ls = fit_least_squares(cands).unwrap();
        let fit = msac_fit(cands, &MsacParams::for_frames(dive.interval.frame_count(), 1)).unwrap();
        for (a, (b, t)) in ls.params().iter().zip(fit.model.params().iter().zip(truth)) {
            ls_gap = ls_gap.max((a - t).abs());
            msac_gap = msac_gap.max((b - t).abs());
        }
        for (p, q) in fill_trajectory(&fit.model, dive.interval.t_start, dive.interval.t_end).iter().zip(&dive.truth_points) {
            fill_gap = fill_gap.max((p.x - q.x).hypot(p.y - q.y));
        }
    }
    let pass = ls_gap <= 1e-6 && msac_gap <= 1e-6 && fill_gap <= 1e-6;
    (
        pass,
        format!("{} dives, max parameter gap LS {ls_gap:.2e} MSAC {msac_gap:.2e}, max position gap {fill_gap:.2e} px", dives.len()),
    )
}

// 4. Robustness

fn robustness() -> Outcome {
    let ((good, total, correct_flags, flags, worst), elapsed) = {
        let t = Instant::now();
        let (mut good, mut total, mut correct, mut flags, mut worst) = (0, 0, 0, 0, 0.0f64);
        let mut seed = 400;
        while total < 200 {
            let spec = SceneSpec {
                seed,
                dive_count: 4,
                candidate_noise_sigma_px: 1.0,
                outlier_rate: 0.3,
                miss_rate: 0.1,
                ..SceneSpec::default()
            };
            let scene = simulate_scene(&spec).unwrap();
            for (i, d) in scene.dives.iter().enumerate() {
                if total == 200 {
                    break;
                }
                total += 1;
                let sims: Vec<_> = scene.candidates.iter().filter(|c| c.dive == i).collect();
                let cands: Vec<_> = sims.iter().map(|c| c.candidate).collect();
                let params = MsacParams::for_frames(d.interval.frame_count(), seed * 16 + i as u64);
                let Ok(fit) = msac_fit(&cands, &params) else {
                    flags += sims.len();
                    worst = f64::INFINITY;
                    continue;
                };
                let track = fill_trajectory(&fit.model, d.interval.t_start, d.interval.t_end);
                let err = clip_mean_error(&track, &d.truth_points).unwrap();
                worst = worst.max(err);
                if err < 2.0 {
                    good += 1;
                }
                flags += sims.len();
                correct += sims.iter().zip(&fit.inliers).filter(|(s, inlier)| **inlier != s.outlier).count();
            }
            seed += 1;
        }
        ((good, total, correct, flags, worst), t.elapsed())
    };
    let tracked = good as f64 / total as f64;
    let flag_rate = correct_flags as f64 / flags as f64;
    let pass = tracked >= 0.95 && flag_rate >= 0.99 && elapsed < Duration::from_secs(30);
    (
        pass,
        format!(
            "{good}/{total} dives under 2 px (worst {worst:.3} px), flags correct {correct_flags}/{flags} = {flag_rate:.4}, {elapsed:.2?}"
        ),
    )
}

// 5. Extraction quality

fn extraction() -> Outcome {
    let mut reports = Vec::new();
    let mut monotone = true;
    for seed in 0..100 {
        let spec = SceneSpec { seed: 500 + seed, dive_count: 3, signal_noise_sigma: 0.05, ..SceneSpec::default() };
        let scene = simulate_scene(&spec).unwrap();
        let kernel = HannKernel::new(HannKernel::span_for_duration(spec.frame_rate, 0.5)).unwrap();
        let [s, m, e] = scene.signals().map(|sig| divetrack::signal::smooth(sig, &kernel));
        let predicted = extract_dives(&s, &m, &e, &Default::default()).unwrap();
        let truth = scene.truth_intervals();
        reports.push(match_intervals(&predicted, &truth, 0.5));
        let sweep = f1_iou_sweep(&predicted, &truth, &default_iou_thresholds());
        monotone &= sweep.windows(2).all(|w| w[1].report.f1 <= w[0].report.f1);
    }
    let total = MatchReport::aggregate(&reports);
    let pass = total.precision >= 0.95 && total.recall >= 0.95 && monotone;
    (
        pass,
        format!(
            "precision {:.4} recall {:.4} (TP {} FP {} FN {}), sweeps monotone {monotone}",
            total.precision, total.recall, total.true_positives, total.false_positives, total.false_negatives
        ),
    )
}

// 6. Blob accuracy

fn blobs() -> Outcome {
    let mut rng = SimRng::new(606);
    let mut worst = 0.0f64;
    let mut single_ok = true;
    for _ in 0..100 {
        let (x, y) = (rng.uniform_in(10.0, 110.0), rng.uniform_in(10.0, 70.0));
        let mut mask = HotSpotMask::zeros(0, 120, 80);
        render_hotspot(&mut mask, x, y, 4.0);
        let found = detect_blobs(&mask, 0.5, 4);
        single_ok &= found.len() == 1;
        if let Some(b) = found.first() {
            worst = worst.max((b.centroid_x - x).hypot(b.centroid_y - y));
        }
    }
    let mut multi_ok = 0;
    let trials = 100;
    for _ in 0..trials {
        let k = 2 + rng.below(4) as usize;
        let r = 4.0;
        let mut centers: Vec<(f64, f64)> = Vec::new();
        while centers.len() < k {
            let c = (rng.uniform_in(6.0, 114.0), rng.uniform_in(6.0, 74.0));
            // Gap between disk edges must exceed 2 px.
            if centers.iter().all(|o| (o.0 - c.0).hypot(o.1 - c.1) - 2.0 * r > 2.0) {
                centers.push(c);
            }
        }
        let mut mask = HotSpotMask::zeros(0, 120, 80);
        for (x, y) in &centers {
            render_hotspot(&mut mask, *x, *y, r);
        }
        if detect_blobs(&mask, 0.5, 4).len() == k {
            multi_ok += 1;
        }
    }
    let pass = single_ok && worst <= 0.5 && multi_ok == trials;
    (pass, format!("worst centroid error {worst:.3} px, k-disk masks exact {multi_ok}/{trials}"))
}

// 7. Matching oracle

fn exhaustive(pred: &[DiveInterval], truth: &[DiveInterval], thr: f64) -> (usize, f64) {
    fn go(i: usize, pred: &[DiveInterval], truth: &[DiveInterval], thr: f64, used: &mut [bool]) -> (usize, f64) {
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
                if c + 1 > best.0 || (c + 1 == best.0 && s + iou > best.1) {
                    best = (c + 1, s + iou);
                }
            }
        }
        best
    }
    go(0, pred, truth, thr, &mut vec![false; truth.len()])
}

fn matching() -> Outcome {
    let mut rng = SimRng::new(707);
    let mut agree = 0;
    for _ in 0..500 {
        // Labels never overlap; predictions are unconstrained.
        let nt = rng.below(7) as usize;
        let mut cursor = rng.below(20) as usize;
        let truth: Vec<_> = (0..nt)
            .map(|_| {
                let s = cursor + 1 + rng.below(30) as usize;
                let e = s + 5 + rng.below(60) as usize;
                cursor = e;
                DiveInterval::new(s, e).unwrap()
            })
            .collect();
        let np = rng.below(7) as usize;
        let pred: Vec<_> = (0..np)
            .map(|_| {
                let s = rng.below(cursor as u64 + 20) as usize;
                DiveInterval::new(s, s + 1 + rng.below(80) as usize).unwrap()
            })
            .collect();
        let thr = rng.uniform_in(0.5, 0.95);
        let greedy = match_intervals(&pred, &truth, thr);
        let (count, total) = exhaustive(&pred, &truth, thr);
        let greedy_total: f64 = greedy.pairs.iter().map(|p| p.iou).sum();
        if greedy.true_positives == count && (greedy_total - total).abs() < 1e-9 {
            agree += 1;
        }
    }
    (agree == 500, format!("greedy equals exhaustive on {agree}/500 instances"))
}

// 8. Dive codes

fn dive_codes() -> Outcome {
    let codes = enumerate_codes();
    let round_trips = codes
        .iter()
        .filter(|c| {
            let s = format_code(c).unwrap();
            parse_code(&s).as_ref() == Ok(*c) && format_code(&parse_code(&s).unwrap()).unwrap() == s
        })
        .count();
    let mut rng = SimRng::new(808);
    let mut bad = 0;
    let prev = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    for _ in 0..10_000 {
        let len = rng.below(17) as usize;
        let s: String = (0..len).map(|_| char::from(rng.below(128) as u8)).collect();
        let ok = panic::catch_unwind(|| match parse_code(&s) {
            Ok(c) => format_code(&c).map(|f| f == s).unwrap_or(false),
            Err(Error::Parse { position, .. }) => position >= 1 && position <= s.len() + 1,
            Err(_) => false,
        });
        if !matches!(ok, Ok(true)) {
            bad += 1;
        }
    }
    panic::set_hook(prev);
    let pass = round_trips == codes.len() && bad == 0;
    (pass, format!("{round_trips}/{} codes round-trip, {bad} bad outcomes over 10000 fuzz strings", codes.len()))
}

// 9. Determinism

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_divetrack"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn pipeline(dir: &Path, jobs: &str) -> Result<(), String> {
    let common = ["--seed", "11", "--jobs", jobs];
    let with = |args: &[&'static str]| [args, &common[..]].concat();
    run_cli(
        dir,
        &with(&["simulate", "--dives", "4", "--signal-noise", "0.05", "--candidate-noise", "1", "--outliers", "0.3", "--misses", "0.1", "-o", "scene"]),
    )?;
    run_cli(dir, &with(&["extract", "--signals", "scene/signals.csv", "-o", "run"]))?;
    run_cli(dir, &with(&["track", "--intervals", "run/intervals.csv", "--candidates", "scene/candidates.csv", "-o", "run"]))?;
    run_cli(dir, &with(&["track", "--intervals", "run/intervals.csv", "--masks", "scene/masks", "-o", "run_masks"]))?;
    run_cli(dir, &with(&["eval", "--predictions", "run/intervals.csv", "--labels", "scene/scene.json", "--tracks", "run", "-o", "run"]))
}

/// Every file under `root`, keyed by relative path. Manifests lose their
/// `run` key, which holds the only wall-clock data.
fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let mut bytes = fs::read(&path).unwrap();
            if path.to_string_lossy().ends_with(".manifest.json") {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v.as_object_mut().unwrap().remove("run");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            out.insert(path.strip_prefix(root).unwrap().to_path_buf(), bytes);
        }
    }
    out
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    if let Err(e) = pipeline(a.path(), "1").and_then(|_| pipeline(b.path(), "4")) {
        return (false, e);
    }
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    let differing: Vec<_> = sa
        .keys()
        .chain(sb.keys())
        .filter(|k| sa.get(*k) != sb.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    let primary = ["scene/scene.json", "scene/signals.csv", "run/intervals.csv", "run/sweep.csv", "run/error_curve.csv"];
    let present = primary.iter().all(|p| sa.contains_key(Path::new(p)));
    (
        differing.is_empty() && present,
        format!("{} files compared, {} differ {:?}, primary outputs present {present}", sa.len(), differing.len(), differing),
    )
}

// 10. Downsampling

fn downsampling() -> Outcome {
    let expected = vec![0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30];
    let enumerated = downsample_indices(31, 16) == expected;
    let identity = downsample_indices(16, 16) == (0..16).collect::<Vec<_>>();
    let mut rng = SimRng::new(1010);
    let pinned = (0..1000).all(|_| {
        let len = 1 + rng.below(5000) as usize;
        let idx = downsample_indices(len, 16);
        idx.len() == 16 && idx[0] == 0 && idx[15] == len - 1
    });
    (
        enumerated && identity && pinned,
        format!("31->16 enumerated {enumerated}, identity at 16 {identity}, endpoints pinned on 1000 lengths {pinned}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("smoothing correctness", smoothing),
        ("loss fidelity", loss),
        ("exact recovery", exact_recovery),
        ("robustness", robustness),
        ("extraction quality", extraction),
        ("blob accuracy", blobs),
        ("matching oracle", matching),
        ("dive-code round-trip", dive_codes),
        ("determinism", determinism),
        ("downsampling", downsampling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let ((pass, detail), elapsed) = match panic::catch_unwind(|| timed(check)) {
            Ok(r) => r,
            Err(_) => ((false, "panicked".to_string()), Duration::ZERO),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<22} {}  {detail} [{elapsed:.2?}]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

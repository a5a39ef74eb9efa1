//! Subcommand implementations. Each stage reads files, writes files and a
//! `<command>.manifest.json` into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use divetrack::clip::{crop_track, downsample_indices};
use divetrack::divecode::{format_code, parse_code, DiveCode, Pose, Rotation};
use divetrack::eval::{clip_mean_error, f1_iou_sweep, match_intervals, trajectory_error_curve};
use divetrack::io::{self, BlobRow, SignalSet};
use divetrack::loss::{gradient_check, weighted_bce};
use divetrack::rng::SimRng;
use divetrack::segmask::{blobs_to_candidates, detect_blobs};
use divetrack::signal::smooth as smooth_signal;
use divetrack::simulator::{simulate_scene, SceneFile};
use divetrack::temporal::{extract_dives, DiveInterval};
use divetrack::trajectory::{fill_trajectory, msac_fit, LocationCandidate, TrackPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::PipelineConfig;
use crate::output::{write_atomic, write_json, ManifestBuilder};
use crate::pgm;

fn open_file(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| format!("opening {}", path.display()))
}

// simulate

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of dives to place.
    #[arg(long)]
    pub dives: Option<usize>,
    /// Scene length in frames.
    #[arg(long)]
    pub duration: Option<usize>,
    /// Gaussian noise added to the probability signals.
    #[arg(long)]
    pub signal_noise: Option<f64>,
    /// Gaussian noise on true candidate positions, in pixels.
    #[arg(long)]
    pub candidate_noise: Option<f64>,
    /// Expected fraction of candidates that are outliers.
    #[arg(long)]
    pub outliers: Option<f64>,
    /// Probability that the diver goes undetected in a frame.
    #[arg(long)]
    pub misses: Option<f64>,
    /// Skip writing hot-spot masks.
    #[arg(long)]
    pub no_masks: bool,
}

pub fn simulate(args: SimulateArgs, config: PipelineConfig, out: &Path) -> Result<()> {
    let mut spec = config.simulator;
    if let Some(v) = args.dives {
        spec.dive_count = v;
    }
    if let Some(v) = args.duration {
        spec.duration_frames = v;
    }
    if let Some(v) = args.signal_noise {
        spec.signal_noise_sigma = v;
    }
    if let Some(v) = args.candidate_noise {
        spec.candidate_noise_sigma_px = v;
    }
    if let Some(v) = args.outliers {
        spec.outlier_rate = v;
    }
    if let Some(v) = args.misses {
        spec.miss_rate = v;
    }
    let scene = simulate_scene(&spec)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut manifest = ManifestBuilder::new("simulate", out, json!({ "spec": spec, "masks": !args.no_masks }))?;

    let scene_path = out.join("scene.json");
    write_json(&scene_path, &scene.scene_file())?;
    manifest.output(&scene_path)?;

    let signals_path = out.join("signals.csv");
    let signals = SignalSet { start: scene.start.clone(), mid: scene.mid.clone(), end: scene.end.clone() };
    write_atomic(&signals_path, |w| Ok(io::write_signals_csv(w, &signals)?))?;
    manifest.output(&signals_path)?;

    let candidates_path = out.join("candidates.csv");
    write_atomic(&candidates_path, |w| Ok(io::write_candidates_csv(w, &scene.location_candidates())?))?;
    manifest.output(&candidates_path)?;

    let masks_dir = out.join("masks");
    if !args.no_masks {
        fs::create_dir_all(&masks_dir)?;
        // Drop masks of an earlier scene so the directory matches this one.
        for (_, old) in pgm::list_masks(&masks_dir)? {
            fs::remove_file(old)?;
        }
        let frames = scene.mask_frames();
        frames
            .par_iter()
            .try_for_each(|&f| pgm::write_mask(&masks_dir.join(pgm::mask_file_name(f)), &scene.mask(f)))?;
        for f in frames {
            manifest.output(&masks_dir.join(pgm::mask_file_name(f)))?;
        }
    }
    manifest.finish()?;

    for label in scene.labels() {
        println!("dive {}: frames {}-{} code {}", label.index, label.t_start, label.t_end, label.code);
    }
    println!("{} dives written to {}", scene.dives.len(), out.display());
    Ok(())
}

// signals

#[derive(Debug, Deserialize)]
struct FrameRateSidecar {
    frame_rate: f64,
}

/// Frame rate from the flag, the config, `<stem>.meta.json` next to the
/// signals, or a `scene.json` in the same directory, in that order.
fn resolve_frame_rate(flag: Option<f64>, config: &PipelineConfig, signals: &Path) -> Result<f64> {
    if let Some(rate) = flag.or(config.signal.frame_rate) {
        if !(rate.is_finite() && rate > 0.0) {
            bail!("frame rate must be positive, got {rate}");
        }
        return Ok(rate);
    }
    let meta = signals.with_extension("meta.json");
    if meta.is_file() {
        let sidecar: FrameRateSidecar = serde_json::from_reader(open_file(&meta)?)
            .with_context(|| format!("parsing {}", meta.display()))?;
        return Ok(sidecar.frame_rate);
    }
    if let Some(scene) = read_scene_sidecar(signals)? {
        return Ok(scene.spec.frame_rate);
    }
    bail!(
        "no frame rate for {}: pass --frame-rate or add {}",
        signals.display(),
        meta.display()
    )
}

fn read_scene_sidecar(next_to: &Path) -> Result<Option<SceneFile>> {
    let dir = if next_to.is_dir() { next_to } else { next_to.parent().unwrap_or(Path::new(".")) };
    for candidate in [dir.join("scene.json"), dir.parent().map(|p| p.join("scene.json")).unwrap_or_default()] {
        if candidate.is_file() {
            return Ok(Some(read_scene(&candidate)?));
        }
    }
    Ok(None)
}

fn read_scene(path: &Path) -> Result<SceneFile> {
    serde_json::from_reader(std::io::BufReader::new(open_file(path)?))
        .with_context(|| format!("parsing {}", path.display()))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_signals(path: &Path, frame_rate: f64) -> Result<SignalSet> {
    let file = std::io::BufReader::new(open_file(path)?);
    let set = if is_json(path) { io::read_signals_json(file, frame_rate) } else { io::read_signals_csv(file, frame_rate) };
    let set = set.with_context(|| format!("reading signals {}", path.display()))?;
    if set.mid.len() < 3 {
        bail!("{} has {} frames, need at least 3", path.display(), set.mid.len());
    }
    Ok(set)
}

fn smooth_set(set: &SignalSet, config: &PipelineConfig) -> Result<SignalSet> {
    let kernel = config.signal.kernel(set.frame_rate())?;
    Ok(SignalSet {
        start: smooth_signal(&set.start, &kernel),
        mid: smooth_signal(&set.mid, &kernel),
        end: smooth_signal(&set.end, &kernel),
    })
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    /// Signals file, CSV or JSON array form.
    #[arg(long)]
    pub signals: PathBuf,
    /// Frames per second; otherwise taken from config or a sidecar
    #[arg(long)]
    pub frame_rate: Option<f64>,
    /// Write the JSON array form instead of CSV.
    #[arg(long)]
    pub json: bool,
}

pub fn smooth(args: SmoothArgs, config: PipelineConfig, out: &Path) -> Result<()> {
    let rate = resolve_frame_rate(args.frame_rate, &config, &args.signals)?;
    let smoothed = smooth_set(&read_signals(&args.signals, rate)?, &config)?;
    let span = config.signal.kernel(rate)?.span();
    let mut manifest = ManifestBuilder::new("smooth", out, json!({ "frame_rate": rate, "span_frames": span }))?;
    manifest.input(&args.signals)?;
    let path = if args.json { out.join("smoothed.json") } else { out.join("smoothed.csv") };
    write_atomic(&path, |w| {
        if args.json {
            io::write_signals_json(w, &smoothed)?;
        } else {
            io::write_signals_csv(w, &smoothed)?;
        }
        Ok(())
    })?;
    manifest.output(&path)?;
    manifest.finish()?;
    println!("smoothed {} frames with a {span}-frame window", smoothed.mid.len());
    Ok(())
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Signals file, CSV or JSON array form.
    #[arg(long)]
    pub signals: PathBuf,
    /// Frames per second; otherwise taken from config or a sidecar
    #[arg(long)]
    pub frame_rate: Option<f64>,
    /// The signals are already smoothed.
    #[arg(long)]
    pub presmoothed: bool,
}

pub fn extract(args: ExtractArgs, config: PipelineConfig, out: &Path) -> Result<()> {
    let rate = resolve_frame_rate(args.frame_rate, &config, &args.signals)?;
    let raw = read_signals(&args.signals, rate)?;
    let span = if args.presmoothed { None } else { Some(config.signal.kernel(rate)?.span()) };
    let g = if args.presmoothed { raw } else { smooth_set(&raw, &config)? };
    let intervals = extract_dives(&g.start, &g.mid, &g.end, &config.extraction)?;

    let mut manifest = ManifestBuilder::new(
        "extract",
        out,
        json!({ "frame_rate": rate, "span_frames": span, "extraction": config.extraction }),
    )?;
    manifest.input(&args.signals)?;
    let csv_path = out.join("intervals.csv");
    write_atomic(&csv_path, |w| Ok(io::write_intervals_csv(w, &intervals)?))?;
    manifest.output(&csv_path)?;
    let json_path = out.join("intervals.json");
    write_json(&json_path, &intervals)?;
    manifest.output(&json_path)?;
    manifest.finish()?;
    println!("extracted {} dives from {} frames", intervals.len(), g.mid.len());
    Ok(())
}

// track

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// Intervals CSV from `extract`.
    #[arg(long)]
    pub intervals: PathBuf,
    /// Location candidates CSV.
    #[arg(long, conflicts_with = "masks", required_unless_present = "masks")]
    pub candidates: Option<PathBuf>,
    /// Directory of `mask_<frame>.pgm` hot-spot masks.
    #[arg(long)]
    pub masks: Option<PathBuf>,
    /// Frame width in pixels for crop clamping
    #[arg(long)]
    pub frame_width: Option<usize>,
    /// Frame height in pixels for crop clamping
    #[arg(long)]
    pub frame_height: Option<usize>,
}

#[derive(Debug, Serialize)]
struct DiveOutcome {
    index: usize,
    t_start: usize,
    t_end: usize,
    candidates: usize,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inliers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<f64>,
    #[serde(skip, default)]
    files: Vec<PathBuf>,
}

pub fn dive_dir(root: &Path, index: usize) -> PathBuf {
    root.join("dives").join(format!("dive_{index:03}"))
}

struct TrackInputs {
    candidates: Option<Vec<LocationCandidate>>,
    masks: Option<std::collections::BTreeMap<usize, PathBuf>>,
    frame_size: Option<(usize, usize)>,
}

/// Candidates, their source blobs and the frame size for one dive.
type Gathered = (Vec<LocationCandidate>, Option<Vec<BlobRow>>, Option<(usize, usize)>);

impl TrackInputs {
    /// Candidates for one dive and, with masks, the blobs they came from.
    fn gather(&self, iv: &DiveInterval, config: &PipelineConfig) -> Result<Gathered> {
        if let Some(all) = &self.candidates {
            let c = all.iter().filter(|c| iv.contains(c.frame)).copied().collect();
            return Ok((c, None, self.frame_size));
        }
        let masks = self.masks.as_ref().expect("either candidates or masks");
        let per_frame: Vec<_> = masks
            .range(iv.t_start..=iv.t_end)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|(&frame, path)| {
                let mask = pgm::read_mask(path, frame)?;
                let blobs = detect_blobs(&mask, config.blobs.threshold, config.blobs.min_area);
                Ok((frame, blobs, (mask.width(), mask.height())))
            })
            .collect::<Result<_>>()?;
        let mut candidates = Vec::new();
        let mut rows = Vec::new();
        let mut size = self.frame_size;
        for (frame, blobs, dims) in per_frame {
            candidates.extend(blobs_to_candidates(&blobs, frame));
            rows.extend(blobs.iter().map(|b| BlobRow::new(frame, b)));
            size.get_or_insert(dims);
        }
        Ok((candidates, Some(rows), size))
    }
}

fn track_one(index: usize, iv: &DiveInterval, inputs: &TrackInputs, config: &PipelineConfig, out: &Path) -> Result<DiveOutcome> {
    let (candidates, blobs, size) = inputs.gather(iv, config)?;
    let dir = dive_dir(out, index);
    let mut outcome = DiveOutcome {
        index,
        t_start: iv.t_start,
        t_end: iv.t_end,
        candidates: candidates.len(),
        status: "ok",
        error: None,
        inliers: None,
        cost: None,
        files: Vec::new(),
    };
    let fitted = msac_fit(&candidates, &config.msac.params_for(iv.frame_count(), index))
        .map_err(anyhow::Error::from)
        .and_then(|fit| {
            let (w, h) = size.context("frame size unknown: pass --frame-width/--frame-height")?;
            let track = fill_trajectory(&fit.model, iv.t_start, iv.t_end);
            let clip = crop_track(&track, w, h, config.clip.crop_size)?.with_source(*iv);
            Ok((fit, track, clip))
        });
    let (fit, track, clip) = match fitted {
        Ok(v) => v,
        Err(e) => {
            outcome.status = "failed";
            outcome.error = Some(format!("{e:#}"));
            if dir.exists() {
                fs::remove_dir_all(&dir)?;
            }
            return Ok(outcome);
        }
    };
    outcome.inliers = Some(fit.inlier_count());
    outcome.cost = Some(fit.cost);

    let model_path = dir.join("model.json");
    write_json(&model_path, &fit.model)?;
    let track_path = dir.join("trajectory.csv");
    write_atomic(&track_path, |w| Ok(io::write_trajectory_csv(w, &track)?))?;
    let crop_path = dir.join("crop_plan.csv");
    write_atomic(&crop_path, |w| Ok(io::write_crop_plan_csv(w, &clip.boxes)?))?;
    let ds_path = dir.join("downsample.json");
    let indices = downsample_indices(iv.frame_count(), config.clip.downsample_target);
    write_atomic(&ds_path, |w| Ok(io::write_indices_json(w, &indices)?))?;
    outcome.files = vec![model_path, track_path, crop_path, ds_path];
    if let Some(rows) = blobs {
        let blob_path = dir.join("blobs.csv");
        write_atomic(&blob_path, |w| Ok(io::write_blobs_csv(w, &rows)?))?;
        outcome.files.push(blob_path);
    }
    Ok(outcome)
}

pub fn track(args: TrackArgs, config: PipelineConfig, out: &Path) -> Result<()> {
    let intervals = io::read_intervals_csv(open_file(&args.intervals)?)
        .with_context(|| format!("reading intervals {}", args.intervals.display()))?;
    let mut manifest = ManifestBuilder::new(
        "track",
        out,
        json!({ "msac": config.msac, "blobs": config.blobs, "clip": config.clip }),
    )?;
    manifest.input(&args.intervals)?;

    let source = args.candidates.as_deref().or(args.masks.as_deref()).expect("clap enforces one source");
    let sidecar = read_scene_sidecar(source)?.map(|s| (s.spec.frame_width, s.spec.frame_height));
    let frame_size = match (args.frame_width.or(config.clip.frame_width), args.frame_height.or(config.clip.frame_height)) {
        (Some(w), Some(h)) => Some((w, h)),
        (None, None) => sidecar,
        _ => bail!("give both frame width and frame height"),
    };
    let inputs = match (&args.candidates, &args.masks) {
        (Some(path), _) => {
            manifest.input(path)?;
            let c = io::read_candidates_csv(open_file(path)?)
                .with_context(|| format!("reading candidates {}", path.display()))?;
            TrackInputs { candidates: Some(c), masks: None, frame_size }
        }
        (None, Some(dir)) => {
            let masks = pgm::list_masks(dir)?;
            for path in masks.values() {
                manifest.input(path)?;
            }
            TrackInputs { candidates: None, masks: Some(masks), frame_size }
        }
        (None, None) => unreachable!("clap enforces one source"),
    };

    let outcomes = intervals
        .par_iter()
        .enumerate()
        .map(|(i, iv)| track_one(i, iv, &inputs, &config, out))
        .collect::<Result<Vec<_>>>()?;
    for o in &outcomes {
        for f in &o.files {
            manifest.output(f)?;
        }
    }
    let failed = outcomes.iter().filter(|o| o.status == "failed").count();
    manifest.details(json!({ "tracked": outcomes.len() - failed, "failed": failed, "dives": outcomes }))?;
    manifest.finish()?;
    for o in outcomes.iter().filter(|o| o.status == "failed") {
        eprintln!("dive {} (frames {}-{}) failed: {}", o.index, o.t_start, o.t_end, o.error.as_deref().unwrap_or(""));
    }
    println!("tracked {} of {} dives, {failed} failed", outcomes.len() - failed, outcomes.len());
    Ok(())
}

// eval

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted intervals CSV.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Labels: a `scene.json` or an intervals CSV.
    #[arg(long)]
    pub labels: PathBuf,
    /// Output directory of `track`; enables the trajectory error curve.
    #[arg(long)]
    pub tracks: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ClipError {
    prediction: usize,
    label: usize,
    frames: usize,
    mean_error_px: f64,
}

pub fn eval(args: EvalArgs, config: PipelineConfig, out: &Path) -> Result<()> {
    let predicted = io::read_intervals_csv(open_file(&args.predictions)?)
        .with_context(|| format!("reading predictions {}", args.predictions.display()))?;
    let (truth, models) = if is_json(&args.labels) {
        let scene = read_scene(&args.labels)?;
        let truth = scene.labels.iter().map(|l| l.interval()).collect::<divetrack::Result<Vec<_>>>()?;
        (truth, Some(scene.labels.iter().map(|l| l.truth_model).collect::<Vec<_>>()))
    } else {
        let truth = io::read_intervals_csv(open_file(&args.labels)?)
            .with_context(|| format!("reading labels {}", args.labels.display()))?;
        (truth, None)
    };
    let mut manifest = ManifestBuilder::new("eval", out, json!({ "eval": config.eval }))?;
    manifest.input(&args.predictions)?;
    manifest.input(&args.labels)?;

    let sweep = f1_iou_sweep(&predicted, &truth, &config.eval.iou_thresholds);
    let sweep_path = out.join("sweep.csv");
    write_atomic(&sweep_path, |w| Ok(io::write_sweep_csv(w, &sweep)?))?;
    manifest.output(&sweep_path)?;
    let report = match_intervals(&predicted, &truth, config.eval.match_threshold);

    let mut trajectory = serde_json::Value::Null;
    if let Some(tracks) = &args.tracks {
        let Some(models) = &models else {
            bail!("trajectory scoring needs labels from a scene.json with truth models");
        };
        let mut errors = Vec::new();
        let mut untracked = Vec::new();
        for pair in &report.pairs {
            let path = dive_dir(tracks, pair.predicted).join("trajectory.csv");
            if !path.is_file() {
                untracked.push(pair.predicted);
                continue;
            }
            manifest.input(&path)?;
            let label = &truth[pair.truth];
            let pred: Vec<TrackPoint> = io::read_trajectory_csv(open_file(&path)?)
                .with_context(|| format!("reading {}", path.display()))?
                .into_iter()
                .filter(|p| label.contains(p.frame))
                .collect();
            let (Some(first), Some(last)) = (pred.first(), pred.last()) else { continue };
            let reference = fill_trajectory(&models[pair.truth], first.frame, last.frame);
            errors.push(ClipError {
                prediction: pair.predicted,
                label: pair.truth,
                frames: pred.len(),
                mean_error_px: clip_mean_error(&pred, &reference)?,
            });
        }
        let means: Vec<f64> = errors.iter().map(|e| e.mean_error_px).collect();
        let curve = if means.is_empty() {
            Vec::new()
        } else {
            trajectory_error_curve(&means, &config.eval.error_thresholds_px)?
        };
        let curve_path = out.join("error_curve.csv");
        write_atomic(&curve_path, |w| Ok(io::write_curve_csv(w, &curve)?))?;
        manifest.output(&curve_path)?;
        trajectory = json!({ "clips": errors, "untracked": untracked, "curve": curve });
    }

    let summary_path = out.join("eval_summary.json");
    write_json(
        &summary_path,
        &json!({
            "match_threshold": config.eval.match_threshold,
            "report": report,
            "sweep": sweep,
            "trajectory": trajectory,
        }),
    )?;
    manifest.output(&summary_path)?;
    manifest.finish()?;
    println!(
        "precision {:.4} recall {:.4} f1 {:.4} at IoU {}",
        report.precision, report.recall, report.f1, config.eval.match_threshold
    );
    Ok(())
}

// loss-check

#[derive(Debug, Args)]
pub struct LossCheckArgs {
    /// Random (prediction, target, beta) samples.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-6)]
    pub step: f64,
    /// Largest acceptable relative gradient error.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
}

pub fn loss_check(args: LossCheckArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    if !(args.step > 0.0 && args.step < 1e-2) {
        bail!("step must lie in (0, 0.01)");
    }
    let mut rng = SimRng::new(seed);
    let samples: Vec<_> = (0..args.samples)
        .map(|_| (rng.uniform_in(0.01, 0.99), if rng.bernoulli(0.5) { 1.0 } else { 0.0 }, rng.uniform_in(0.05, 0.95)))
        .collect();
    let check = gradient_check(&samples, args.step)?;
    // At beta = 0.5 the loss must be plain cross-entropy.
    let mut bce_gap: f64 = 0.0;
    for i in 1..100 {
        let p = i as f64 / 100.0;
        for y in [0.0, 1.0] {
            let plain = -y * p.ln() - (1.0 - y) * (1.0 - p).ln();
            bce_gap = bce_gap.max((weighted_bce(p, y, 0.5)? - plain).abs());
        }
    }
    let report = json!({
        "seed": seed,
        "gradient": check,
        "tolerance": args.tolerance,
        "max_gap_to_plain_bce_at_half_beta": bce_gap,
        "passed": check.max_relative_error <= args.tolerance && bce_gap <= 1e-12,
    });
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(dir) = out {
        write_atomic(&dir.join("loss_check.json"), |w| Ok(writeln!(w, "{text}")?))?;
    }
    println!("{text}");
    Ok(())
}

// code

#[derive(Debug, Subcommand)]
pub enum CodeCommand {
    /// Print the properties of a code as JSON.
    Parse { code: String },
    /// Build a code from its properties.
    Format(FormatArgs),
}

fn parse_enum<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase())).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    /// forward, back, reverse or inward.
    #[arg(long, value_parser = parse_enum::<Rotation>)]
    pub rotation: Rotation,
    /// Half somersaults, 1-9.
    #[arg(long)]
    pub somersaults: u8,
    /// Half twists, 0-9.
    #[arg(long, default_value_t = 0)]
    pub twists: u8,
    /// straight, pike, tuck or free.
    #[arg(long, value_parser = parse_enum::<Pose>)]
    pub pose: Pose,
    /// Armstand start (group 6)
    #[arg(long)]
    pub handstand: bool,
    /// Flying variant (second digit 1)
    #[arg(long)]
    pub flying: bool,
}

pub fn code(cmd: CodeCommand) -> Result<()> {
    match cmd {
        CodeCommand::Parse { code } => {
            let parsed = parse_code(&code)?;
            println!("{}", serde_json::to_string(&json!({ "code": code, "properties": parsed }))?);
        }
        CodeCommand::Format(a) => {
            let c = DiveCode {
                rotation: a.rotation,
                somersault_halves: a.somersaults,
                twist_halves: a.twists,
                pose: a.pose,
                handstand: a.handstand,
                flying: a.flying,
            };
            println!("{}", format_code(&c)?);
        }
    }
    Ok(())
}

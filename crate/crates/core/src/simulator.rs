//! Synthetic diving scenes with exact ground truth.
//!
//! Each dive launches from a platform, moves at constant horizontal speed and
//! falls under constant gravity until it reaches the water line, so its path
//! is exactly a [`TrajectoryModel`]. Around the dives the simulator emits the
//! three event probability signals a detector would produce, contaminated
//! location candidates, and hot-spot masks.
//!
//! Random draws come from [`SimRng`] streams derived from `spec.seed`:
//! stream 0 places dives, stream 1 adds signal noise, and dive `i` uses
//! stream `16 + 2i` for its kinematics and code and `17 + 2i` for its
//! candidates. Dives can therefore be generated independently.

use serde::{Deserialize, Serialize};

use crate::divecode::{DiveCode, Pose, Rotation};
use crate::error::{Error, Result};
use crate::rng::{SimRng, RNG_ALGORITHM};
use crate::segmask::HotSpotMask;
use crate::signal::{EventKind, ProbabilitySignal};
use crate::temporal::DiveInterval;
use crate::trajectory::{fill_trajectory, LocationCandidate, TrackPoint, TrajectoryModel};

const STREAM_PLACEMENT: u64 = 0;
const STREAM_SIGNAL_NOISE: u64 = 1;
const PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub frame_rate: f64,
    pub frame_width: usize,
    pub frame_height: usize,
    pub duration_frames: usize,
    /// Take-off points in image coordinates (y grows downward).
    pub platforms: Vec<(f64, f64)>,
    pub water_y: f64,
    /// Pixels per frame squared.
    pub gravity: f64,
    pub dive_count: usize,
    pub signal_noise_sigma: f64,
    pub candidate_noise_sigma_px: f64,
    /// Expected fraction of candidates that are outliers.
    pub outlier_rate: f64,
    /// Probability that a frame has no detection of the diver.
    pub miss_rate: f64,
    pub hotspot_radius_px: f64,
    pub seed: u64,
    pub ramp_frames: usize,
    /// Odd width of the start/end bumps.
    pub bump_frames: usize,
    pub vx_min: f64,
    pub vx_max: f64,
    /// Launch vertical speed range; negative is upward.
    pub vy_min: f64,
    pub vy_max: f64,
    pub min_gap_frames: usize,
    pub edge_margin_frames: usize,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            frame_rate: 30.0,
            frame_width: 320,
            frame_height: 180,
            duration_frames: 900,
            platforms: vec![
                (40.0, 40.0),
                (60.0, 70.0),
                (80.0, 100.0),
                (100.0, 125.0),
                (120.0, 140.0),
                (280.0, 35.0),
                (255.0, 65.0),
                (230.0, 95.0),
                (210.0, 120.0),
            ],
            water_y: 165.0,
            gravity: 0.13,
            dive_count: 3,
            signal_noise_sigma: 0.0,
            candidate_noise_sigma_px: 0.0,
            outlier_rate: 0.0,
            miss_rate: 0.0,
            hotspot_radius_px: 4.0,
            seed: 0,
            ramp_frames: 5,
            bump_frames: 9,
            vx_min: 0.5,
            vx_max: 1.5,
            vy_min: -2.5,
            vy_max: -1.0,
            min_gap_frames: 60,
            edge_margin_frames: 30,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let p = |m: &str| Err(Error::param(m.to_string()));
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return p("frame_rate must be positive");
        }
        if self.frame_width == 0 || self.frame_height == 0 {
            return p("frame dimensions must be positive");
        }
        if self.duration_frames < 3 {
            return p("duration_frames must be at least 3");
        }
        if !(self.gravity.is_finite() && self.gravity > 0.0) {
            return p("gravity must be positive");
        }
        if self.dive_count > 0 && self.platforms.is_empty() {
            return p("at least one platform is required");
        }
        if self.platforms.iter().any(|(_, y)| *y >= self.water_y) {
            return p("water_y must lie below every platform");
        }
        for (name, v) in [
            ("signal_noise_sigma", self.signal_noise_sigma),
            ("candidate_noise_sigma_px", self.candidate_noise_sigma_px),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return p(&format!("{name} must be non-negative"));
            }
        }
        for (name, v) in [("outlier_rate", self.outlier_rate), ("miss_rate", self.miss_rate)] {
            if !(0.0..1.0).contains(&v) {
                return p(&format!("{name} must lie in [0, 1)"));
            }
        }
        if self.hotspot_radius_px.is_nan() || self.hotspot_radius_px <= 0.0 {
            return p("hotspot_radius_px must be positive");
        }
        if self.bump_frames == 0 || self.bump_frames.is_multiple_of(2) {
            return p("bump_frames must be odd");
        }
        if !(self.vx_min > 0.0 && self.vx_max >= self.vx_min) {
            return p("need 0 < vx_min <= vx_max");
        }
        if self.vy_min.is_nan() || self.vy_max.is_nan() || self.vy_min > self.vy_max {
            return p("need vy_min <= vy_max");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedDive {
    pub interval: DiveInterval,
    pub truth_model: TrajectoryModel,
    pub truth_points: Vec<TrackPoint>,
    pub code: DiveCode,
    pub platform: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimCandidate {
    pub candidate: LocationCandidate,
    pub dive: usize,
    pub outlier: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedScene {
    pub spec: SceneSpec,
    /// Chronological.
    pub dives: Vec<SimulatedDive>,
    pub start: ProbabilitySignal,
    pub mid: ProbabilitySignal,
    pub end: ProbabilitySignal,
    /// Sorted by frame.
    pub candidates: Vec<SimCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub index: usize,
    pub t_start: usize,
    pub t_end: usize,
    pub code: String,
    pub truth_model: TrajectoryModel,
}

impl LabelRecord {
    pub fn interval(&self) -> Result<DiveInterval> {
        DiveInterval::new(self.t_start, self.t_end)
    }
}

/// Contents of `scene.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub rng: String,
    pub spec: SceneSpec,
    pub labels: Vec<LabelRecord>,
}

struct DivePlan {
    platform: usize,
    vx: f64,
    vy: f64,
    code: DiveCode,
    duration: usize,
}

fn sample_code(rng: &mut SimRng) -> DiveCode {
    const HALVES: [f64; 9] = [3.0, 3.0, 3.0, 2.0, 1.0, 0.5, 0.2, 0.1, 0.05];
    const TWISTS: [f64; 9] = [3.0, 3.0, 2.0, 2.0, 1.0, 0.5, 0.2, 0.1, 0.05];
    const POSES: [f64; 4] = [1.0, 3.0, 3.0, 0.5];
    let family = rng.weighted_index(&[0.84, 0.12, 0.04]);
    let somersault_halves = rng.weighted_index(&HALVES) as u8 + 1;
    let pose = Pose::ALL[rng.weighted_index(&POSES)];
    match family {
        0 => DiveCode {
            rotation: Rotation::ALL[rng.below(4) as usize],
            somersault_halves,
            twist_halves: 0,
            pose,
            handstand: false,
            flying: rng.bernoulli(0.05),
        },
        1 => DiveCode {
            rotation: Rotation::ALL[rng.below(4) as usize],
            somersault_halves,
            twist_halves: rng.weighted_index(&TWISTS) as u8 + 1,
            pose,
            handstand: false,
            flying: false,
        },
        _ => DiveCode {
            rotation: Rotation::ALL[rng.below(3) as usize],
            somersault_halves,
            twist_halves: 0,
            pose,
            handstand: true,
            flying: false,
        },
    }
}

/// Closed-form model of a launch from `(x0, y0)` at frame `t0`.
pub fn kinematic_model(x0: f64, y0: f64, vx: f64, vy: f64, gravity: f64, t0: f64) -> TrajectoryModel {
    let b2 = gravity / (2.0 * vx * vx);
    let slope = vy / vx;
    TrajectoryModel {
        a0: x0 - vx * t0,
        a1: vx,
        b0: y0 - slope * x0 + b2 * x0 * x0,
        b1: slope - 2.0 * b2 * x0,
        b2,
    }
}

/// First frame after `t0` at which the model reaches `water_y`.
fn entry_frame(model: &TrajectoryModel, t0: usize, water_y: f64) -> Option<usize> {
    (t0 + 1..t0 + 100_000).find(|t| model.position(*t as f64).1 >= water_y)
}

fn plan_dive(spec: &SceneSpec, index: usize) -> Result<DivePlan> {
    let mut rng = SimRng::with_stream(spec.seed, 16 + 2 * index as u64);
    let platform = rng.below(spec.platforms.len() as u64) as usize;
    let (x0, y0) = spec.platforms[platform];
    let speed = rng.uniform_in(spec.vx_min, spec.vx_max);
    let vx = if x0 <= spec.frame_width as f64 / 2.0 { speed } else { -speed };
    let vy = rng.uniform_in(spec.vy_min, spec.vy_max);
    let code = sample_code(&mut rng);
    let model = kinematic_model(x0, y0, vx, vy, spec.gravity, 0.0);
    let duration = entry_frame(&model, 0, spec.water_y)
        .ok_or_else(|| Error::param("dive never reaches the water"))?;
    Ok(DivePlan { platform, vx, vy, code, duration })
}

fn place(spec: &SceneSpec, plans: &[DivePlan]) -> Result<Vec<usize>> {
    let mut rng = SimRng::with_stream(spec.seed, STREAM_PLACEMENT);
    let mut placed: Vec<(usize, usize)> = Vec::new();
    let mut starts = Vec::with_capacity(plans.len());
    let fail = || Error::Placement { requested: spec.dive_count, duration: spec.duration_frames };
    for plan in plans {
        // One spare frame covers rounding differences once the launch is shifted.
        let len = plan.duration + 1;
        let lo = spec.edge_margin_frames;
        let hi = spec
            .duration_frames
            .checked_sub(1 + spec.edge_margin_frames + len)
            .filter(|hi| *hi >= lo)
            .ok_or_else(fail)?;
        let mut chosen = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let t0 = lo + rng.below((hi - lo + 1) as u64) as usize;
            let t1 = t0 + len;
            let clear = placed
                .iter()
                .all(|&(s, e)| t0 > e + spec.min_gap_frames || t1 + spec.min_gap_frames < s);
            if clear {
                chosen = Some(t0);
                break;
            }
        }
        let t0 = chosen.ok_or_else(fail)?;
        placed.push((t0, t0 + len));
        starts.push(t0);
    }
    Ok(starts)
}

fn mid_shape(t: usize, t0: usize, t1: usize, ramp: usize) -> f64 {
    if t < t0 || t > t1 {
        return 0.0;
    }
    if ramp == 0 {
        return 1.0;
    }
    let ramp_value = |k: usize| {
        if k >= ramp {
            1.0
        } else {
            0.5 - 0.5 * (std::f64::consts::PI * k as f64 / ramp as f64).cos()
        }
    };
    ramp_value(t - t0).min(ramp_value(t1 - t))
}

fn bump_shape(t: usize, center: usize, width: usize) -> f64 {
    let half = (width / 2) as i64;
    let k = t as i64 - center as i64;
    if k.abs() > half {
        0.0
    } else {
        (std::f64::consts::PI * k as f64 / (width + 1) as f64).cos().powi(2)
    }
}

/// Soft-edged disk: full intensity inside `radius`, linear fall-off over one pixel.
pub fn render_hotspot(mask: &mut HotSpotMask, x: f64, y: f64, radius: f64) {
    let reach = radius + 1.0;
    let (w, h) = (mask.width() as f64, mask.height() as f64);
    let c_lo = (x - reach).floor().max(0.0);
    let c_hi = (x + reach).ceil().min(w - 1.0);
    let r_lo = (y - reach).floor().max(0.0);
    let r_hi = (y + reach).ceil().min(h - 1.0);
    if c_lo > c_hi || r_lo > r_hi {
        return;
    }
    for row in r_lo as usize..=r_hi as usize {
        for col in c_lo as usize..=c_hi as usize {
            let d = (col as f64 - x).hypot(row as f64 - y);
            let v = (radius + 0.5 - d).clamp(0.0, 1.0);
            if v > 0.0 {
                mask.max_assign(col, row, v);
            }
        }
    }
}

pub fn simulate_scene(spec: &SceneSpec) -> Result<SimulatedScene> {
    spec.validate()?;
    let plans = (0..spec.dive_count).map(|i| plan_dive(spec, i)).collect::<Result<Vec<_>>>()?;
    let starts = place(spec, &plans)?;

    let mut dives = Vec::with_capacity(plans.len());
    for (stream_index, (plan, &t0)) in plans.iter().zip(&starts).enumerate() {
        let (x0, y0) = spec.platforms[plan.platform];
        let truth_model = kinematic_model(x0, y0, plan.vx, plan.vy, spec.gravity, t0 as f64);
        let t1 = entry_frame(&truth_model, t0, spec.water_y)
            .ok_or_else(|| Error::param("dive never reaches the water"))?;
        dives.push((
            SimulatedDive {
                interval: DiveInterval::new(t0, t1)?,
                truth_model,
                truth_points: fill_trajectory(&truth_model, t0, t1),
                code: plan.code,
                platform: plan.platform,
            },
            stream_index,
        ));
    }
    dives.sort_by_key(|(d, _)| d.interval.t_start);

    let n = spec.duration_frames;
    let mut raw = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (d, _) in &dives {
        let (t0, t1) = (d.interval.t_start, d.interval.t_end);
        let [s, m, e] = &mut raw;
        for (t, ((s, m), e)) in s.iter_mut().zip(m.iter_mut()).zip(e.iter_mut()).enumerate() {
            *s = f64::max(*s, bump_shape(t, t0, spec.bump_frames));
            *m = f64::max(*m, mid_shape(t, t0, t1, spec.ramp_frames));
            *e = f64::max(*e, bump_shape(t, t1, spec.bump_frames));
        }
    }
    let mut noise = SimRng::with_stream(spec.seed, STREAM_SIGNAL_NOISE);
    for signal in raw.iter_mut() {
        for v in signal.iter_mut() {
            *v = (*v + spec.signal_noise_sigma * noise.normal()).clamp(0.0, 1.0);
        }
    }
    let [s, m, e] = raw;

    let expected_outliers = spec.outlier_rate * (1.0 - spec.miss_rate) / (1.0 - spec.outlier_rate);
    let more_outliers = expected_outliers / (1.0 + expected_outliers);
    let mut candidates = Vec::new();
    for (order, (d, stream_index)) in dives.iter().enumerate() {
        let mut rng = SimRng::with_stream(spec.seed, 17 + 2 * *stream_index as u64);
        for p in &d.truth_points {
            let (nx, ny) = (rng.normal(), rng.normal());
            let confidence = rng.uniform_in(0.5, 1.0);
            if !rng.bernoulli(spec.miss_rate) {
                candidates.push(SimCandidate {
                    candidate: LocationCandidate {
                        frame: p.frame,
                        x: p.x + spec.candidate_noise_sigma_px * nx,
                        y: p.y + spec.candidate_noise_sigma_px * ny,
                        confidence,
                    },
                    dive: order,
                    outlier: false,
                });
            }
            while rng.bernoulli(more_outliers) {
                candidates.push(SimCandidate {
                    candidate: LocationCandidate {
                        frame: p.frame,
                        x: rng.uniform_in(0.0, spec.frame_width as f64),
                        y: rng.uniform_in(0.0, spec.frame_height as f64),
                        confidence: rng.uniform_in(0.5, 1.0),
                    },
                    dive: order,
                    outlier: true,
                });
            }
        }
    }

    Ok(SimulatedScene {
        spec: spec.clone(),
        dives: dives.into_iter().map(|(d, _)| d).collect(),
        start: ProbabilitySignal::new(EventKind::Start, spec.frame_rate, s)?,
        mid: ProbabilitySignal::new(EventKind::Mid, spec.frame_rate, m)?,
        end: ProbabilitySignal::new(EventKind::End, spec.frame_rate, e)?,
        candidates,
    })
}

impl SimulatedScene {
    pub fn signals(&self) -> [&ProbabilitySignal; 3] {
        [&self.start, &self.mid, &self.end]
    }

    pub fn labels(&self) -> Vec<LabelRecord> {
        scene_to_labels(self)
    }

    pub fn truth_intervals(&self) -> Vec<DiveInterval> {
        self.dives.iter().map(|d| d.interval).collect()
    }

    pub fn location_candidates(&self) -> Vec<LocationCandidate> {
        self.candidates.iter().map(|c| c.candidate).collect()
    }

    /// Candidates whose frame lies inside `interval`.
    pub fn candidates_in(&self, interval: &DiveInterval) -> Vec<LocationCandidate> {
        self.candidates
            .iter()
            .filter(|c| interval.contains(c.candidate.frame))
            .map(|c| c.candidate)
            .collect()
    }

    /// Frames that carry a hot spot.
    pub fn mask_frames(&self) -> Vec<usize> {
        self.dives.iter().flat_map(|d| d.interval.frames()).collect()
    }

    /// Hot-spot mask for `frame`; all zero outside dives.
    pub fn mask(&self, frame: usize) -> HotSpotMask {
        let mut mask = HotSpotMask::zeros(frame, self.spec.frame_width, self.spec.frame_height);
        for d in &self.dives {
            if d.interval.contains(frame) {
                let p = d.truth_points[frame - d.interval.t_start];
                render_hotspot(&mut mask, p.x, p.y, self.spec.hotspot_radius_px);
            }
        }
        mask
    }

    pub fn scene_file(&self) -> SceneFile {
        SceneFile { rng: RNG_ALGORITHM.to_string(), spec: self.spec.clone(), labels: self.labels() }
    }
}

pub fn scene_to_labels(scene: &SimulatedScene) -> Vec<LabelRecord> {
    let mut labels: Vec<LabelRecord> = scene
        .dives
        .iter()
        .enumerate()
        .map(|(index, d)| LabelRecord {
            index,
            t_start: d.interval.t_start,
            t_end: d.interval.t_end,
            code: d.code.to_string(),
            truth_model: d.truth_model,
        })
        .collect();
    labels.sort_by_key(|l| l.t_start);
    labels
}

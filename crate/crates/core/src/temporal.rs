//! Dive interval extraction from the smoothed start/mid/end signals.
//!
//! Candidates are peaks of the mid signal. Each candidate owns the run of
//! frames around its peak where the mid signal stays at or above
//! `mid_threshold`; the start is the strongest start peak found between
//! `scan_radius` frames before that run and the mid peak, and the end is the
//! strongest end peak between the mid peak and `scan_radius` frames after the
//! run. Candidates missing either edge are dropped.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ProbabilitySignal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frame: usize,
    pub height: f64,
}

/// Peaks that produced an extracted interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalPeaks {
    pub start: Peak,
    pub mid: Peak,
    pub end: Peak,
}

/// Closed frame range `[t_start, t_end]`, optionally with the peaks it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiveInterval {
    pub t_start: usize,
    pub t_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peaks: Option<IntervalPeaks>,
}

impl DiveInterval {
    pub fn new(t_start: usize, t_end: usize) -> Result<Self> {
        if t_start >= t_end {
            return Err(Error::input(format!(
                "interval start {t_start} must precede end {t_end}"
            )));
        }
        Ok(Self { t_start, t_end, peaks: None })
    }

    pub fn from_peaks(peaks: IntervalPeaks) -> Result<Self> {
        let mut iv = Self::new(peaks.start.frame, peaks.end.frame)?;
        if !(iv.t_start <= peaks.mid.frame && peaks.mid.frame <= iv.t_end) {
            return Err(Error::input("mid peak lies outside its interval"));
        }
        iv.peaks = Some(peaks);
        Ok(iv)
    }

    pub fn length(&self) -> usize {
        self.t_end - self.t_start
    }

    pub fn frame_count(&self) -> usize {
        self.t_end - self.t_start + 1
    }

    pub fn contains(&self, frame: usize) -> bool {
        self.t_start <= frame && frame <= self.t_end
    }

    pub fn overlaps(&self, other: &DiveInterval) -> bool {
        self.t_start <= other.t_end && other.t_start <= self.t_end
    }

    pub fn frames(&self) -> std::ops::RangeInclusive<usize> {
        self.t_start..=self.t_end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionParams {
    pub mid_threshold: f64,
    pub edge_threshold: f64,
    pub scan_radius_seconds: f64,
    /// `None` means "use the scan radius in frames".
    #[serde(default)]
    pub min_peak_separation_frames: Option<usize>,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        Self {
            mid_threshold: 0.5,
            edge_threshold: 0.5,
            scan_radius_seconds: 1.0,
            min_peak_separation_frames: None,
        }
    }
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mid_threshold", self.mid_threshold), ("edge_threshold", self.edge_threshold)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.scan_radius_seconds.is_finite() && self.scan_radius_seconds > 0.0) {
            return Err(Error::param("scan_radius_seconds must be positive"));
        }
        if self.min_peak_separation_frames == Some(0) {
            return Err(Error::param("min_peak_separation_frames must be positive"));
        }
        Ok(())
    }

    pub fn scan_radius_frames(&self, frame_rate: f64) -> usize {
        (frame_rate * self.scan_radius_seconds).round().max(0.0) as usize
    }

    pub fn separation_frames(&self, frame_rate: f64) -> usize {
        self.min_peak_separation_frames
            .unwrap_or_else(|| self.scan_radius_frames(frame_rate))
            .max(1)
    }
}

pub fn find_peaks(signal: &ProbabilitySignal, min_height: f64, min_separation: usize) -> Vec<Peak> {
    find_peaks_in(signal.values(), min_height, min_separation)
}

/// Strict interior local maxima at or above `min_height`.
///
/// A plateau counts once, at its leftmost frame, when both sides drop away.
/// Of two peaks closer than `min_separation` frames only the higher one is
/// kept (the earlier one on ties).
pub fn find_peaks_in(values: &[f64], min_height: f64, min_separation: usize) -> Vec<Peak> {
    let n = values.len();
    let mut raw = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] && values[i] >= min_height {
                raw.push(Peak { frame: i, height: values[i] });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    if min_separation <= 1 {
        return raw;
    }

    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        raw[b]
            .height
            .partial_cmp(&raw[a].height)
            .unwrap_or(Ordering::Equal)
            .then(raw[a].frame.cmp(&raw[b].frame))
    });
    let mut kept: Vec<Peak> = Vec::new();
    for idx in order {
        let p = raw[idx];
        if kept.iter().all(|q| p.frame.abs_diff(q.frame) >= min_separation) {
            kept.push(p);
        }
    }
    kept.sort_by_key(|p| p.frame);
    kept
}

/// Highest peak with frame in `lo..=hi`; ties go to the earlier frame.
fn strongest_in(peaks: &[Peak], lo: usize, hi: usize) -> Option<Peak> {
    peaks
        .iter()
        .filter(|p| p.frame >= lo && p.frame <= hi)
        .fold(None, |best: Option<Peak>, p| match best {
            Some(b) if b.height >= p.height => Some(b),
            _ => Some(*p),
        })
}

/// Bounds of the run around `frame` where `values >= threshold`.
fn support_run(values: &[f64], frame: usize, threshold: f64) -> (usize, usize) {
    let mut lo = frame;
    while lo > 0 && values[lo - 1] >= threshold {
        lo -= 1;
    }
    let mut hi = frame;
    while hi + 1 < values.len() && values[hi + 1] >= threshold {
        hi += 1;
    }
    (lo, hi)
}

pub fn extract_dives(
    g_start: &ProbabilitySignal,
    g_mid: &ProbabilitySignal,
    g_end: &ProbabilitySignal,
    params: &ExtractionParams,
) -> Result<Vec<DiveInterval>> {
    params.validate()?;
    let n = g_mid.len();
    if g_start.len() != n || g_end.len() != n {
        return Err(Error::input(format!(
            "signal lengths differ: start {}, mid {}, end {}",
            g_start.len(),
            n,
            g_end.len()
        )));
    }
    let rate = g_mid.frame_rate();
    if g_start.frame_rate() != rate || g_end.frame_rate() != rate {
        return Err(Error::input("signal frame rates differ"));
    }

    let radius = params.scan_radius_frames(rate);
    let mids = find_peaks(g_mid, params.mid_threshold, params.separation_frames(rate));
    let starts = find_peaks(g_start, params.edge_threshold, 1);
    let ends = find_peaks(g_end, params.edge_threshold, 1);

    let mut candidates = Vec::new();
    for mid in mids {
        let (run_lo, run_hi) = support_run(g_mid.values(), mid.frame, params.mid_threshold);
        let start = strongest_in(&starts, run_lo.saturating_sub(radius), mid.frame);
        let end = strongest_in(&ends, mid.frame, (run_hi + radius).min(n - 1));
        if let (Some(start), Some(end)) = (start, end) {
            if let Ok(iv) = DiveInterval::from_peaks(IntervalPeaks { start, mid, end }) {
                candidates.push(iv);
            }
        }
    }

    // Overlapping candidates are duplicates of one dive: keep the stronger mid peak.
    candidates.sort_by(|a, b| {
        let (pa, pb) = (a.peaks.unwrap().mid, b.peaks.unwrap().mid);
        pb.height
            .partial_cmp(&pa.height)
            .unwrap_or(Ordering::Equal)
            .then(pa.frame.cmp(&pb.frame))
    });
    let mut kept: Vec<DiveInterval> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| !k.overlaps(&c)) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|iv| (iv.t_start, iv.t_end));
    Ok(kept)
}

/// Intersection over union of two intervals measured by length `t_end - t_start`.
pub fn interval_iou(a: &DiveInterval, b: &DiveInterval) -> f64 {
    let lo = a.t_start.max(b.t_start);
    let hi = a.t_end.min(b.t_end);
    let inter = hi.saturating_sub(lo) as f64;
    let union = a.length() as f64 + b.length() as f64 - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

//! CSV and JSON file formats shared by the command-line tool and fixtures.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back gives bit-identical values and repeated runs give identical bytes.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::clip::CropBox;
use crate::error::{Error, Result};
use crate::eval::{CurvePoint, SweepPoint};
use crate::segmask::Blob;
use crate::signal::{EventKind, ProbabilitySignal};
use crate::temporal::{DiveInterval, IntervalPeaks, Peak};
use crate::trajectory::{LocationCandidate, TrackPoint};

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

fn write_rows<W: Write, T: Serialize>(writer: W, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    // Written by hand so that empty files still carry a header.
    w.write_record(header).map_err(format_err)?;
    for row in rows {
        w.serialize(row).map_err(format_err)?;
    }
    w.flush().map_err(format_err)
}

fn read_rows<R: Read, T: DeserializeOwned>(reader: R, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found = r.headers().map_err(format_err)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Format(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Format(format!("row {}: {e}", i + 2))))
        .collect()
}

pub const SIGNALS_HEADER: [&str; 4] = ["frame", "start", "mid", "end"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalRow {
    pub frame: usize,
    pub start: f64,
    pub mid: f64,
    pub end: f64,
}

/// The three event signals of one recording, frame-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    pub start: ProbabilitySignal,
    pub mid: ProbabilitySignal,
    pub end: ProbabilitySignal,
}

impl SignalSet {
    pub fn from_rows(rows: &[SignalRow], frame_rate: f64) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.frame != i {
                return Err(Error::Format(format!("row {i} has frame {}, frames must count up from 0", r.frame)));
            }
        }
        let column = |f: fn(&SignalRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        Ok(Self {
            start: ProbabilitySignal::new(EventKind::Start, frame_rate, column(|r| r.start))?,
            mid: ProbabilitySignal::new(EventKind::Mid, frame_rate, column(|r| r.mid))?,
            end: ProbabilitySignal::new(EventKind::End, frame_rate, column(|r| r.end))?,
        })
    }

    pub fn rows(&self) -> Vec<SignalRow> {
        (0..self.mid.len())
            .map(|frame| SignalRow {
                frame,
                start: self.start.values()[frame],
                mid: self.mid.values()[frame],
                end: self.end.values()[frame],
            })
            .collect()
    }

    pub fn frame_rate(&self) -> f64 {
        self.mid.frame_rate()
    }
}

pub fn write_signals_csv<W: Write>(w: W, signals: &SignalSet) -> Result<()> {
    write_rows(w, &SIGNALS_HEADER, signals.rows())
}

pub fn read_signals_csv<R: Read>(r: R, frame_rate: f64) -> Result<SignalSet> {
    SignalSet::from_rows(&read_rows::<_, SignalRow>(r, &SIGNALS_HEADER)?, frame_rate)
}

/// JSON form: an array of `{frame, start, mid, end}` records.
pub fn write_signals_json<W: Write>(w: W, signals: &SignalSet) -> Result<()> {
    serde_json::to_writer_pretty(w, &signals.rows()).map_err(format_err)
}

pub fn read_signals_json<R: Read>(r: R, frame_rate: f64) -> Result<SignalSet> {
    let rows: Vec<SignalRow> = serde_json::from_reader(r).map_err(format_err)?;
    SignalSet::from_rows(&rows, frame_rate)
}

pub const INTERVALS_HEADER: [&str; 6] = ["t_start", "t_end", "mid_frame", "mid_height", "start_height", "end_height"];

/// Peak columns are empty for intervals that did not come from extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct IntervalRow {
    t_start: usize,
    t_end: usize,
    mid_frame: Option<usize>,
    mid_height: Option<f64>,
    start_height: Option<f64>,
    end_height: Option<f64>,
}

pub fn write_intervals_csv<W: Write>(w: W, intervals: &[DiveInterval]) -> Result<()> {
    write_rows(
        w,
        &INTERVALS_HEADER,
        intervals.iter().map(|iv| IntervalRow {
            t_start: iv.t_start,
            t_end: iv.t_end,
            mid_frame: iv.peaks.map(|p| p.mid.frame),
            mid_height: iv.peaks.map(|p| p.mid.height),
            start_height: iv.peaks.map(|p| p.start.height),
            end_height: iv.peaks.map(|p| p.end.height),
        }),
    )
}

pub fn read_intervals_csv<R: Read>(r: R) -> Result<Vec<DiveInterval>> {
    read_rows::<_, IntervalRow>(r, &INTERVALS_HEADER)?
        .into_iter()
        .map(|row| match (row.mid_frame, row.mid_height, row.start_height, row.end_height) {
            (Some(mf), Some(mh), Some(sh), Some(eh)) => DiveInterval::from_peaks(IntervalPeaks {
                start: Peak { frame: row.t_start, height: sh },
                mid: Peak { frame: mf, height: mh },
                end: Peak { frame: row.t_end, height: eh },
            }),
            (None, None, None, None) => DiveInterval::new(row.t_start, row.t_end),
            _ => Err(Error::Format(format!(
                "interval {}..{} has partial peak columns",
                row.t_start, row.t_end
            ))),
        })
        .collect()
}

pub const CANDIDATES_HEADER: [&str; 4] = ["frame", "x", "y", "confidence"];

pub fn write_candidates_csv<W: Write>(w: W, candidates: &[LocationCandidate]) -> Result<()> {
    write_rows(w, &CANDIDATES_HEADER, candidates)
}

pub fn read_candidates_csv<R: Read>(r: R) -> Result<Vec<LocationCandidate>> {
    read_rows(r, &CANDIDATES_HEADER)
}

pub const TRAJECTORY_HEADER: [&str; 3] = ["frame", "x", "y"];

pub fn write_trajectory_csv<W: Write>(w: W, track: &[TrackPoint]) -> Result<()> {
    write_rows(w, &TRAJECTORY_HEADER, track)
}

pub fn read_trajectory_csv<R: Read>(r: R) -> Result<Vec<TrackPoint>> {
    read_rows(r, &TRAJECTORY_HEADER)
}

pub const CROP_PLAN_HEADER: [&str; 4] = ["frame", "left", "top", "size"];

pub fn write_crop_plan_csv<W: Write>(w: W, boxes: &[CropBox]) -> Result<()> {
    write_rows(w, &CROP_PLAN_HEADER, boxes)
}

pub fn read_crop_plan_csv<R: Read>(r: R) -> Result<Vec<CropBox>> {
    read_rows(r, &CROP_PLAN_HEADER)
}

pub const BLOBS_HEADER: [&str; 5] = ["frame", "x", "y", "area", "confidence"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobRow {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub area: usize,
    pub confidence: f64,
}

impl BlobRow {
    pub fn new(frame: usize, blob: &Blob) -> Self {
        Self { frame, x: blob.centroid_x, y: blob.centroid_y, area: blob.area, confidence: blob.mean_intensity }
    }
}

pub fn write_blobs_csv<W: Write>(w: W, rows: &[BlobRow]) -> Result<()> {
    write_rows(w, &BLOBS_HEADER, rows)
}

pub fn read_blobs_csv<R: Read>(r: R) -> Result<Vec<BlobRow>> {
    read_rows(r, &BLOBS_HEADER)
}

pub const SWEEP_HEADER: [&str; 4] = ["threshold", "precision", "recall", "f1"];

pub fn write_sweep_csv<W: Write>(w: W, sweep: &[SweepPoint]) -> Result<()> {
    write_rows(
        w,
        &SWEEP_HEADER,
        sweep.iter().map(|p| (p.threshold, p.report.precision, p.report.recall, p.report.f1)),
    )
}

pub const CURVE_HEADER: [&str; 2] = ["threshold", "fraction"];

pub fn write_curve_csv<W: Write>(w: W, curve: &[CurvePoint]) -> Result<()> {
    write_rows(w, &CURVE_HEADER, curve)
}

/// Downsample plans are bare JSON integer arrays.
pub fn write_indices_json<W: Write>(w: W, indices: &[usize]) -> Result<()> {
    serde_json::to_writer(w, indices).map_err(format_err)
}

pub fn read_indices_json<R: Read>(r: R) -> Result<Vec<usize>> {
    serde_json::from_reader(r).map_err(format_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{f1_iou_sweep, trajectory_error_curve};
    use crate::trajectory::TrajectoryModel;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    fn signals() -> SignalSet {
        SignalSet {
            start: ProbabilitySignal::new(EventKind::Start, 30.0, vec![0.0, 0.1, 1.0 / 3.0]).unwrap(),
            mid: ProbabilitySignal::new(EventKind::Mid, 30.0, vec![0.5, 0.25, 1.0]).unwrap(),
            end: ProbabilitySignal::new(EventKind::End, 30.0, vec![1.0, 0.0, 0.125]).unwrap(),
        }
    }

    #[test]
    fn signals_round_trip() {
        let s = signals();
        let csv = text(|b| write_signals_csv(b, &s));
        assert!(csv.starts_with("frame,start,mid,end\n0,0.0,0.5,1.0\n"));
        assert_eq!(read_signals_csv(csv.as_bytes(), 30.0).unwrap(), s);
        let json = text(|b| write_signals_json(b, &s));
        assert_eq!(read_signals_json(json.as_bytes(), 30.0).unwrap(), s);
    }

    #[test]
    fn signals_reject_bad_files() {
        assert!(read_signals_csv("frame,mid,start,end\n".as_bytes(), 30.0).is_err());
        assert!(read_signals_csv("frame,start,mid,end\n1,0,0,0\n".as_bytes(), 30.0).is_err());
        assert!(read_signals_csv("frame,start,mid,end\n0,0,1.5,0\n".as_bytes(), 30.0).is_err());
        assert!(read_signals_csv("frame,start,mid,end\n0,0,x,0\n".as_bytes(), 30.0).is_err());
    }

    #[test]
    fn empty_intervals_have_header_only() {
        assert_eq!(text(|b| write_intervals_csv(b, &[])), "t_start,t_end,mid_frame,mid_height,start_height,end_height\n");
        assert!(read_intervals_csv(text(|b| write_intervals_csv(b, &[])).as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn intervals_round_trip() {
        let peaks = IntervalPeaks {
            start: Peak { frame: 10, height: 0.6 },
            mid: Peak { frame: 20, height: 0.9 },
            end: Peak { frame: 30, height: 0.7 },
        };
        let ivs = vec![DiveInterval::from_peaks(peaks).unwrap(), DiveInterval::new(40, 50).unwrap()];
        let csv = text(|b| write_intervals_csv(b, &ivs));
        assert!(csv.contains("10,30,20,0.9,0.6,0.7\n40,50,,,,\n"));
        assert_eq!(read_intervals_csv(csv.as_bytes()).unwrap(), ivs);
        assert!(read_intervals_csv("t_start,t_end,mid_frame,mid_height,start_height,end_height\n1,5,3,,,\n".as_bytes()).is_err());
    }

    #[test]
    fn track_formats_round_trip() {
        let cands = vec![LocationCandidate { frame: 3, x: 1.5, y: -2.25, confidence: 0.75 }];
        assert_eq!(read_candidates_csv(text(|b| write_candidates_csv(b, &cands)).as_bytes()).unwrap(), cands);
        let track = vec![TrackPoint { frame: 0, x: 0.1, y: 0.2 }, TrackPoint { frame: 1, x: 1e-17, y: 3.0 }];
        assert_eq!(read_trajectory_csv(text(|b| write_trajectory_csv(b, &track)).as_bytes()).unwrap(), track);
        let boxes = vec![CropBox { frame: 2, left: 3, top: 4, size: 64 }];
        let csv = text(|b| write_crop_plan_csv(b, &boxes));
        assert_eq!(csv, "frame,left,top,size\n2,3,4,64\n");
        assert_eq!(read_crop_plan_csv(csv.as_bytes()).unwrap(), boxes);
        let blobs = vec![BlobRow { frame: 1, x: 2.0, y: 3.0, area: 12, confidence: 0.5 }];
        assert_eq!(read_blobs_csv(text(|b| write_blobs_csv(b, &blobs)).as_bytes()).unwrap(), blobs);
        let idx = vec![0, 2, 4];
        let json = text(|b| write_indices_json(b, &idx));
        assert_eq!(json, "[0,2,4]");
        assert_eq!(read_indices_json(json.as_bytes()).unwrap(), idx);
    }

    #[test]
    fn model_json_field_names() {
        let m = TrajectoryModel { a0: 1.0, a1: 2.0, b0: 3.0, b1: 4.0, b2: 5.0 };
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"a0":1.0,"a1":2.0,"b0":3.0,"b1":4.0,"b2":5.0}"#);
    }

    #[test]
    fn report_csvs() {
        let iv = DiveInterval::new(0, 10).unwrap();
        let sweep = f1_iou_sweep(&[iv], &[iv], &[0.5, 0.9]);
        assert_eq!(text(|b| write_sweep_csv(b, &sweep)), "threshold,precision,recall,f1\n0.5,1.0,1.0,1.0\n0.9,1.0,1.0,1.0\n");
        let curve = trajectory_error_curve(&[1.0, 3.0], &[2.0]).unwrap();
        assert_eq!(text(|b| write_curve_csv(b, &curve)), "threshold,fraction\n2.0,0.5\n");
    }
}

//! Output records and their CSV / JSON-lines serialization.

use std::io::Write;

use eyescore_core::{IrisEstimate, PupilEstimate};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::{AppError, AppResult};
use crate::pipeline::{error_name, FrameOutcome};

/// Streams serializable rows in the configured format. CSV gets one header line.
pub struct RecordWriter<W: Write> {
    inner: Sink<W>,
}

enum Sink<W: Write> {
    Csv(Box<csv::Writer<W>>),
    Jsonl(W),
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, format: OutputFormat) -> Self {
        let inner = match format {
            OutputFormat::Csv => Sink::Csv(Box::new(csv::Writer::from_writer(out))),
            OutputFormat::Jsonl => Sink::Jsonl(out),
        };
        Self { inner }
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> AppResult<()> {
        let fail = |e: &dyn std::fmt::Display| AppError::io(std::path::Path::new("<output>"), e);
        match &mut self.inner {
            Sink::Csv(w) => w.serialize(row).map_err(|e| fail(&e)),
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, row).map_err(|e| fail(&e))?;
                w.write_all(b"\n").map_err(|e| fail(&e))
            }
        }
    }

    pub fn flush(&mut self) -> AppResult<()> {
        let r = match &mut self.inner {
            Sink::Csv(w) => w.flush(),
            Sink::Jsonl(w) => w.flush(),
        };
        r.map_err(|e| AppError::io(std::path::Path::new("<output>"), e))
    }
}

/// One eye's detection fields; empty when the detection failed.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct EyeFields {
    pub ex: Option<u32>,
    pub ey: Option<u32>,
    pub er: Option<u32>,
    pub l: Option<f64>,
    pub s: Option<f64>,
    pub h: Option<f64>,
    pub c: Option<f64>,
    pub px: Option<u32>,
    pub py: Option<u32>,
    pub pr: Option<u32>,
    pub g: Option<f64>,
    pub error: Option<&'static str>,
}

impl EyeFields {
    pub fn new(iris: Option<&IrisEstimate>, pupil: Option<&PupilEstimate>, error: Option<eyescore_core::Error>) -> Self {
        Self {
            ex: iris.map(|i| i.ex),
            ey: iris.map(|i| i.ey),
            er: iris.map(|i| i.er),
            l: iris.map(|i| i.l),
            s: iris.map(|i| i.s),
            h: iris.map(|i| i.h),
            c: iris.map(|i| i.c),
            px: pupil.map(|p| p.px),
            py: pupil.map(|p| p.py),
            pr: pupil.map(|p| p.pr),
            g: pupil.map(|p| p.g),
            error: error.as_ref().map(error_name),
        }
    }
}

/// `detect` output row. Serialized flat, with `left_`/`right_` prefixes.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectRecord {
    pub frame_id: String,
    pub frame_index: u64,
    pub left: EyeFields,
    pub right: EyeFields,
    pub confidence: f64,
    pub roi_clipped: bool,
}

impl DetectRecord {
    pub fn new(frame_id: String, o: &FrameOutcome) -> Self {
        let r = &o.result;
        Self {
            frame_id,
            frame_index: r.frame_index,
            left: EyeFields::new(r.left.as_ref(), r.left_pupil.as_ref(), o.left_error),
            right: EyeFields::new(r.right.as_ref(), r.right_pupil.as_ref(), o.right_error),
            confidence: r.confidence,
            roi_clipped: o.rois.clipped,
        }
    }
}

impl Serialize for DetectRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DetectRecord", 28)?;
        st.serialize_field("frame_id", &self.frame_id)?;
        st.serialize_field("frame_index", &self.frame_index)?;
        macro_rules! eye {
            ($e:expr, $($name:literal => $f:ident),*) => {
                $(st.serialize_field($name, &$e.$f)?;)*
            };
        }
        eye!(self.left, "left_ex" => ex, "left_ey" => ey, "left_er" => er, "left_l" => l, "left_s" => s,
            "left_h" => h, "left_c" => c, "left_px" => px, "left_py" => py, "left_pr" => pr, "left_g" => g,
            "left_error" => error);
        eye!(self.right, "right_ex" => ex, "right_ey" => ey, "right_er" => er, "right_l" => l, "right_s" => s,
            "right_h" => h, "right_c" => c, "right_px" => px, "right_py" => py, "right_pr" => pr, "right_g" => g,
            "right_error" => error);
        st.serialize_field("confidence", &self.confidence)?;
        st.serialize_field("roi_clipped", &self.roi_clipped)?;
        st.end()
    }
}

/// `stream` output row: the best frame of one window.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WindowReport {
    pub window_id: u64,
    /// 1-based position of the window's first input frame.
    pub first_frame: u64,
    pub frames: u64,
    /// Why the window closed: `window`, `reset` or `end`.
    pub closed_by: &'static str,
    pub best_frame: Option<u64>,
    pub best_frame_id: Option<String>,
    pub confidence: Option<f64>,
    pub left_pr: Option<u32>,
    pub right_pr: Option<u32>,
    /// Raw left/right dissimilarities of iris radius, iris row and pupil row.
    pub dis_radius: Option<f64>,
    pub dis_iris_row: Option<f64>,
    pub dis_pupil_row: Option<f64>,
    /// Left/right pupil radius dissimilarity; not part of the confidence.
    pub dis_pupil_radius: Option<f64>,
    pub no_confident_frame: bool,
}

/// `eval` output row.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MetricRow {
    pub section: String,
    pub metric: String,
    pub value: f64,
    /// Published figure for the same quantity, when there is one.
    pub published: Option<f64>,
}

impl MetricRow {
    pub fn new(section: &str, metric: impl Into<String>, value: f64, published: Option<f64>) -> Self {
        Self { section: section.into(), metric: metric.into(), value, published }
    }
}

//! Per-frame confidence and streaming best-frame retention.

use crate::error::{Error, Result};
use crate::iris::IrisEstimate;
use crate::pupil::PupilEstimate;

/// Left/right dissimilarity `|l - r| / max(l, r)`.
pub fn dissimilarity(l: f64, r: f64) -> Result<f64> {
    let m = l.max(r);
    if m <= 0.0 {
        return Err(Error::BothZero);
    }
    Ok((l - r).abs() / m)
}

/// `1 - |l - r| / max(l, r)`: 1 for equal measures, 0 when one of them is zero.
pub fn equality_factor(l: f64, r: f64) -> Result<f64> {
    dissimilarity(l, r).map(|d| 1.0 - d)
}

/// Product of the rectified iris scores and the radius, iris-row and pupil-row
/// equality factors. An undefined factor yields zero.
pub fn confidence(left: &IrisEstimate, right: &IrisEstimate, lp: &PupilEstimate, rp: &PupilEstimate) -> f64 {
    let factors = [
        Ok(left.c.max(0.0)),
        Ok(right.c.max(0.0)),
        equality_factor(left.er as f64, right.er as f64),
        equality_factor(left.ey as f64, right.ey as f64),
        equality_factor(lp.py as f64, rp.py as f64),
    ];
    let mut product = 1.0;
    for f in factors {
        match f {
            Ok(v) => product *= v,
            Err(_) => return 0.0,
        }
    }
    product
}

/// The three raw left/right dissimilarities (radius, iris row, pupil row), as diagnostics.
pub fn raw_dissimilarities(
    left: &IrisEstimate,
    right: &IrisEstimate,
    lp: &PupilEstimate,
    rp: &PupilEstimate,
) -> [Option<f64>; 3] {
    [
        dissimilarity(left.er as f64, right.er as f64).ok(),
        dissimilarity(left.ey as f64, right.ey as f64).ok(),
        dissimilarity(lp.py as f64, rp.py as f64).ok(),
    ]
}

/// Detections for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub frame_index: u64,
    pub left: Option<IrisEstimate>,
    pub right: Option<IrisEstimate>,
    pub left_pupil: Option<PupilEstimate>,
    pub right_pupil: Option<PupilEstimate>,
    pub confidence: f64,
}

impl FrameResult {
    /// Assembles a result; confidence is zero unless all four detections exist.
    pub fn new(
        frame_index: u64,
        left: Option<IrisEstimate>,
        right: Option<IrisEstimate>,
        left_pupil: Option<PupilEstimate>,
        right_pupil: Option<PupilEstimate>,
    ) -> Self {
        let confidence = match (&left, &right, &left_pupil, &right_pupil) {
            (Some(l), Some(r), Some(lp), Some(rp)) => confidence(l, r, lp, rp),
            _ => 0.0,
        };
        Self {
            frame_index,
            left,
            right,
            left_pupil,
            right_pupil,
            confidence,
        }
    }

    pub fn dissimilarities(&self) -> [Option<f64>; 3] {
        match (&self.left, &self.right, &self.left_pupil, &self.right_pupil) {
            (Some(l), Some(r), Some(lp), Some(rp)) => raw_dissimilarities(l, r, lp, rp),
            _ => [None; 3],
        }
    }
}

/// Running maximum of frame confidence within a window.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BestFrameState {
    pub best: Option<FrameResult>,
    /// Index of the first frame of the current window.
    pub window_start: u64,
    /// Frames seen in the current window.
    pub frames_seen: u64,
    /// Window length in frames; 0 means unbounded.
    pub window_length: u64,
}

impl BestFrameState {
    pub fn new(window_length: u64) -> Self {
        Self {
            window_length,
            ..Default::default()
        }
    }

    /// Keeps `result` iff there is no best yet or it is strictly more confident.
    pub fn update_best(&mut self, result: FrameResult) {
        self.frames_seen += 1;
        let replace = match &self.best {
            None => true,
            Some(b) => result.confidence > b.confidence,
        };
        if replace {
            self.best = Some(result);
        }
    }

    /// Whether the window has reached its configured length.
    pub fn window_full(&self) -> bool {
        self.window_length > 0 && self.frames_seen >= self.window_length
    }

    /// Clears the best frame and starts a new window at `next_start`.
    /// Returns the best of the closed window.
    pub fn reset(&mut self, next_start: u64) -> Option<FrameResult> {
        self.window_start = next_start;
        self.frames_seen = 0;
        self.best.take()
    }
}

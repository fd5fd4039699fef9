//! Per-frame detection and region lookup shared by the subcommands.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use eyescore_core::pupil::default_neighborhood;
use eyescore_core::roi::{roi_provider, RoiMode, RoiPair};
use eyescore_core::{detect_pupil, EyeAnnotation, EyeRegion, Frame, FrameResult, IrisDetector, IrisEstimate, PupilEstimate, Side};

use crate::config::{RoiModeKind, RunConfig};
use crate::datasets::{load_annotation_csv, load_truth, parse_eye_file, synth_stem, TRUTH};
use crate::error::{AppError, AppResult};

/// Iris search for one region under the configured radius policy, stride and engine.
pub fn detect_iris_in(frame: &Frame, roi: &EyeRegion, cfg: &RunConfig) -> eyescore_core::Result<IrisEstimate> {
    let (r_min, r_max) = cfg.radius.range(roi.w);
    IrisDetector::new(r_min, r_max)?
        .with_stride(cfg.stride)
        .with_engine(cfg.engine)
        .detect(frame, roi)
}

/// Iris then pupil for one eye.
pub fn detect_eye(
    frame: &Frame,
    roi: &EyeRegion,
    cfg: &RunConfig,
) -> (eyescore_core::Result<IrisEstimate>, Option<eyescore_core::Result<PupilEstimate>>) {
    match detect_iris_in(frame, roi, cfg) {
        Ok(iris) => {
            let nb = cfg.neighborhood.unwrap_or_else(|| default_neighborhood(iris.er));
            (Ok(iris), Some(detect_pupil(frame, &iris, nb)))
        }
        Err(e) => (Err(e), None),
    }
}

/// Detections for both eyes plus the failure codes, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub result: FrameResult,
    pub left_error: Option<eyescore_core::Error>,
    pub right_error: Option<eyescore_core::Error>,
    pub rois: RoiPair,
}

pub fn process_frame(frame: &Frame, rois: RoiPair, cfg: &RunConfig) -> FrameOutcome {
    let (li, lp) = detect_eye(frame, &rois.left, cfg);
    let (ri, rp) = detect_eye(frame, &rois.right, cfg);
    let err = |i: &eyescore_core::Result<IrisEstimate>, p: &Option<eyescore_core::Result<PupilEstimate>>| match (i, p) {
        (Err(e), _) | (_, Some(Err(e))) => Some(*e),
        _ => None,
    };
    let (left_error, right_error) = (err(&li, &lp), err(&ri, &rp));
    let result = FrameResult::new(
        frame.frame_index,
        li.ok(),
        ri.ok(),
        lp.and_then(Result::ok),
        rp.and_then(Result::ok),
    );
    FrameOutcome { result, left_error, right_error, rois }
}

/// Stable name of a core error for output records.
pub fn error_name(e: &eyescore_core::Error) -> &'static str {
    use eyescore_core::Error::*;
    match e {
        RadiusTooSmall(_) => "RadiusTooSmall",
        OutOfBounds => "OutOfBounds",
        DimensionMismatch => "DimensionMismatch",
        NoValidCandidate => "NoValidCandidate",
        NoPupilContrast => "NoPupilContrast",
        EmptyRing(_) => "EmptyRing",
        BothZero => "BothZero",
        MalformedAnnotation => "MalformedAnnotation",
        EmptyDataset => "EmptyDataset",
        DegenerateAnnotation => "DegenerateAnnotation",
        TooFewAnnotators => "TooFewAnnotators",
        InvalidSpec => "InvalidSpec",
        InvalidRegion => "InvalidRegion",
    }
}

/// Left and right halves of the frame.
pub fn half_regions(width: u32, height: u32) -> AppResult<RoiPair> {
    let half = width / 2;
    let left = EyeRegion { x: 0, y: 0, w: half, h: height, side: Side::Left };
    let right = EyeRegion { x: half, y: 0, w: width - half, h: height, side: Side::Right };
    left.validate(width, height)?;
    right.validate(width, height)?;
    Ok(RoiPair { left, right, clipped: false })
}

/// Where eye regions come from.
#[derive(Debug, Default)]
pub struct RoiSource {
    /// Annotations given up front, by sample id.
    explicit: HashMap<String, EyeAnnotation>,
    /// Regions from a sidecar file, by sample id and side.
    boxes: HashMap<(String, Side), EyeRegion>,
    /// Annotations discovered next to images, per directory.
    discovered: Mutex<HashMap<PathBuf, HashMap<String, EyeAnnotation>>>,
}

impl RoiSource {
    pub fn with_annotations(explicit: HashMap<String, EyeAnnotation>) -> Self {
        Self { explicit, ..Default::default() }
    }

    pub fn with_boxes(boxes: HashMap<(String, Side), EyeRegion>) -> Self {
        Self { boxes, ..Default::default() }
    }

    /// Annotations from a `.eye` directory, an annotation CSV or a synthetic truth CSV.
    pub fn load_annotations(path: &Path) -> AppResult<HashMap<String, EyeAnnotation>> {
        if path.is_dir() {
            let mut out = HashMap::new();
            let entries = std::fs::read_dir(path).map_err(|e| AppError::unreadable(path, e))?;
            for entry in entries {
                let p = entry.map_err(|e| AppError::unreadable(path, e))?.path();
                if p.extension().and_then(|e| e.to_str()) == Some("eye") {
                    let text = std::fs::read_to_string(&p).map_err(|e| AppError::unreadable(&p, e))?;
                    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                    out.insert(stem, parse_eye_file(&text, &p)?);
                }
            }
            return Ok(out);
        }
        let header = std::fs::read_to_string(path).map_err(|e| AppError::unreadable(path, e))?;
        let header = header.lines().next().unwrap_or_default();
        if header.contains("annotator_id") {
            Ok(load_annotation_csv(path)?
                .into_iter()
                .filter_map(|(id, c)| c.eye_annotation().map(|a| (id, a)))
                .collect())
        } else if header.contains("iris_x") {
            Ok(load_truth(path)?
                .into_iter()
                .filter_map(|(id, [l, r])| {
                    EyeAnnotation::new(l.iris_x as f64, l.iris_y as f64, r.iris_x as f64, r.iris_y as f64)
                        .ok()
                        .map(|a| (synth_stem(id), a))
                })
                .collect())
        } else {
            Err(AppError::malformed(path, "unrecognized annotation file"))
        }
    }

    fn discover(&self, image: &Path, id: &str) -> AppResult<Option<EyeAnnotation>> {
        let sidecar = image.with_extension("eye");
        if sidecar.is_file() {
            let text = std::fs::read_to_string(&sidecar).map_err(|e| AppError::unreadable(&sidecar, e))?;
            return parse_eye_file(&text, &sidecar).map(Some);
        }
        let dir = image.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut cache = self.discovered.lock().map_err(|_| AppError::Internal("annotation cache poisoned".into()))?;
        if !cache.contains_key(&dir) {
            let mut found = HashMap::new();
            for name in [TRUTH, "annotations.csv"] {
                let p = dir.join(name);
                if p.is_file() {
                    found = Self::load_annotations(&p)?;
                    break;
                }
            }
            cache.insert(dir.clone(), found);
        }
        Ok(cache[&dir].get(id).copied())
    }

    /// Regions for one image. `index` keys the jitter stream.
    pub fn regions(&self, cfg: &RunConfig, image: &Path, frame: &Frame, index: u64) -> AppResult<RoiPair> {
        let id = sample_id(image);
        let (w, h) = (frame.width(), frame.height());
        match cfg.roi_mode {
            RoiModeKind::Halves => half_regions(w, h),
            RoiModeKind::File => {
                let get = |side| {
                    self.boxes
                        .get(&(id.clone(), side))
                        .copied()
                        .ok_or_else(|| AppError::malformed(image, format!("no {} region for '{id}' in the ROI file", side.as_str())))
                };
                let (left, right) = (get(Side::Left)?, get(Side::Right)?);
                left.validate(w, h).map_err(|_| AppError::malformed(image, "left region outside the frame"))?;
                right.validate(w, h).map_err(|_| AppError::malformed(image, "right region outside the frame"))?;
                Ok(RoiPair { left, right, clipped: false })
            }
            RoiModeKind::Centered | RoiModeKind::Jittered => {
                let ann = match self.explicit.get(&id) {
                    Some(a) => *a,
                    None => self
                        .discover(image, &id)?
                        .ok_or_else(|| AppError::malformed(image, format!("no eye annotation for '{id}'")))?,
                };
                let mode = if cfg.roi_mode == RoiModeKind::Jittered {
                    RoiMode::Jittered { seed: cfg.jitter_seed }
                } else {
                    RoiMode::Centered
                };
                Ok(roi_provider(&ann, mode, cfg.roi_pad, index, w, h)?)
            }
        }
    }
}

/// Sample id of an image: its file stem.
pub fn sample_id(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string()
}

/// Runs `f` on a pool of `workers` threads.
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> AppResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Internal(e.to_string()))?;
    Ok(pool.install(f))
}

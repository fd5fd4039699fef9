//! Annotation and dataset file formats.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use eyescore_core::metrics::Circle;
use eyescore_core::{EyeAnnotation, EyeRegion, Side};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Parses a BioID `.eye` file: a `#LX LY RX RY` header and one line of four integers.
pub fn parse_eye_file(text: &str, path: &Path) -> AppResult<EyeAnnotation> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some(h) if h.starts_with('#') => {}
        _ => return Err(AppError::malformed(path, "missing '#LX LY RX RY' header")),
    }
    let values = lines.next().ok_or_else(|| AppError::malformed(path, "missing coordinate line"))?;
    let nums: Vec<i64> = values
        .split_whitespace()
        .map(|t| t.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| AppError::malformed(path, format!("non-integer coordinate in '{values}'")))?;
    if nums.len() != 4 {
        return Err(AppError::malformed(path, format!("expected 4 coordinates, got {}", nums.len())));
    }
    EyeAnnotation::new(nums[0] as f64, nums[1] as f64, nums[2] as f64, nums[3] as f64)
        .map_err(|_| AppError::malformed(path, "coincident eye centers"))
}

/// One annotated image.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub image: PathBuf,
    pub annotation: EyeAnnotation,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BioIdDataset {
    /// Ordered by sample id.
    pub samples: Vec<Sample>,
    /// Files without a partner, by name.
    pub unpaired: Vec<String>,
}

/// Pairs `BioID_NNNN.pgm` with `BioID_NNNN.eye` by stem.
pub fn load_bioid(dir: &Path) -> AppResult<BioIdDataset> {
    let entries = std::fs::read_dir(dir).map_err(|e| AppError::unreadable(dir, e))?;
    let mut images = BTreeMap::new();
    let mut eyes = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| AppError::unreadable(dir, e))?.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else { continue };
        match path.extension().and_then(|e| e.to_str()) {
            Some("pgm") => {
                images.insert(stem, path);
            }
            Some("eye") => {
                eyes.insert(stem, path);
            }
            _ => {}
        }
    }
    let mut ds = BioIdDataset::default();
    for (stem, image) in &images {
        match eyes.get(stem) {
            Some(eye) => {
                let text = std::fs::read_to_string(eye).map_err(|e| AppError::unreadable(eye, e))?;
                ds.samples.push(Sample {
                    id: stem.clone(),
                    image: image.clone(),
                    annotation: parse_eye_file(&text, eye)?,
                });
            }
            None => ds.unpaired.push(format!("{stem}.pgm")),
        }
    }
    ds.unpaired.extend(eyes.keys().filter(|s| !images.contains_key(*s)).map(|s| format!("{s}.eye")));
    if ds.samples.is_empty() {
        return Err(AppError::EmptyDataset(format!("no .pgm/.eye pairs in {}", dir.display())));
    }
    Ok(ds)
}

fn csv_reader(path: &Path) -> AppResult<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| AppError::unreadable(path, e))
}

fn parse_side(s: &str, path: &Path) -> AppResult<Side> {
    Side::parse(s).ok_or_else(|| AppError::malformed(path, format!("side must be left or right, got '{s}'")))
}

#[derive(Debug, Deserialize)]
struct RoiRow {
    sample_id: String,
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    side: String,
}

/// ROI sidecar: `sample_id,x,y,w,h,side`.
pub fn load_roi_file(path: &Path) -> AppResult<HashMap<(String, Side), EyeRegion>> {
    let mut out = HashMap::new();
    for row in csv_reader(path)?.deserialize::<RoiRow>() {
        let row = row.map_err(|e| AppError::malformed(path, e.to_string()))?;
        let side = parse_side(&row.side, path)?;
        out.insert(
            (row.sample_id, side),
            EyeRegion { x: row.x, y: row.y, w: row.w, h: row.h, side },
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CircleKind {
    Iris,
    Pupil,
}

#[derive(Debug, Deserialize)]
struct AnnotationRow {
    sample_id: String,
    annotator_id: String,
    side: String,
    kind: String,
    cx: f64,
    cy: f64,
    r: f64,
}

/// Circles of one sample, per annotator, keyed by eye and kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotatedCircles {
    pub circles: BTreeMap<(Side, CircleKind), Vec<(String, Circle)>>,
}

impl AnnotatedCircles {
    pub fn get(&self, side: Side, kind: CircleKind) -> &[(String, Circle)] {
        self.circles.get(&(side, kind)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Mean center and radius over annotators.
    pub fn consensus(&self, side: Side, kind: CircleKind) -> Option<Circle> {
        let cs = self.get(side, kind);
        if cs.is_empty() {
            return None;
        }
        let n = cs.len() as f64;
        let sum = cs.iter().fold((0.0, 0.0, 0.0), |a, (_, c)| (a.0 + c.cx, a.1 + c.cy, a.2 + c.r));
        Some(Circle::new(sum.0 / n, sum.1 / n, sum.2 / n))
    }

    /// Eye centers from the consensus iris circles.
    pub fn eye_annotation(&self) -> Option<EyeAnnotation> {
        let l = self.consensus(Side::Left, CircleKind::Iris)?;
        let r = self.consensus(Side::Right, CircleKind::Iris)?;
        EyeAnnotation::new(l.cx, l.cy, r.cx, r.cy).ok()
    }
}


/// Annotation CSV: `sample_id,annotator_id,side,kind,cx,cy,r` with kind `iris` or `pupil`.
pub fn load_annotation_csv(path: &Path) -> AppResult<BTreeMap<String, AnnotatedCircles>> {
    let mut out: BTreeMap<String, AnnotatedCircles> = BTreeMap::new();
    for row in csv_reader(path)?.deserialize::<AnnotationRow>() {
        let row = row.map_err(|e| AppError::malformed(path, e.to_string()))?;
        let side = parse_side(&row.side, path)?;
        let kind = match row.kind.as_str() {
            "iris" => CircleKind::Iris,
            "pupil" => CircleKind::Pupil,
            k => return Err(AppError::malformed(path, format!("kind must be iris or pupil, got '{k}'"))),
        };
        if row.r.is_nan() || row.r <= 0.0 {
            return Err(AppError::malformed(path, format!("non-positive radius for {}", row.sample_id)));
        }
        out.entry(row.sample_id)
            .or_default()
            .circles
            .entry((side, kind))
            .or_default()
            .push((row.annotator_id, Circle::new(row.cx, row.cy, row.r)));
    }
    if out.is_empty() {
        return Err(AppError::EmptyDataset(format!("no annotations in {}", path.display())));
    }
    Ok(out)
}

/// Ground truth of one synthetic eye.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub sample_id: u32,
    pub side: SideName,
    pub iris_x: u32,
    pub iris_y: u32,
    pub iris_r: u32,
    pub pupil_x: u32,
    pub pupil_y: u32,
    pub pupil_r: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideName {
    Left,
    Right,
}

impl From<SideName> for Side {
    fn from(s: SideName) -> Side {
        match s {
            SideName::Left => Side::Left,
            SideName::Right => Side::Right,
        }
    }
}

impl From<Side> for SideName {
    fn from(s: Side) -> SideName {
        match s {
            Side::Left => SideName::Left,
            Side::Right => SideName::Right,
        }
    }
}

/// One manifest line of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub sample_id: u32,
    pub file: String,
    pub preset: String,
    pub seed: u64,
}

pub const MANIFEST: &str = "manifest.csv";
pub const TRUTH: &str = "truth.csv";

/// File stem used for synthetic sample `id`.
pub fn synth_stem(id: u32) -> String {
    format!("synth_{id:05}")
}

/// A synthetic dataset read back from its manifest and truth files.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    pub rows: Vec<ManifestRow>,
    pub truth: BTreeMap<u32, [TruthRow; 2]>,
    pub dir: PathBuf,
}

impl SynthDataset {
    pub fn image_path(&self, row: &ManifestRow) -> PathBuf {
        self.dir.join(&row.file)
    }

    pub fn annotation(&self, id: u32) -> Option<EyeAnnotation> {
        let [l, r] = self.truth.get(&id)?;
        EyeAnnotation::new(l.iris_x as f64, l.iris_y as f64, r.iris_x as f64, r.iris_y as f64).ok()
    }
}

pub fn load_truth(path: &Path) -> AppResult<BTreeMap<u32, [TruthRow; 2]>> {
    let mut partial: BTreeMap<u32, (Option<TruthRow>, Option<TruthRow>)> = BTreeMap::new();
    for row in csv_reader(path)?.deserialize::<TruthRow>() {
        let row = row.map_err(|e| AppError::malformed(path, e.to_string()))?;
        let slot = partial.entry(row.sample_id).or_default();
        match row.side {
            SideName::Left => slot.0 = Some(row),
            SideName::Right => slot.1 = Some(row),
        }
    }
    partial
        .into_iter()
        .map(|(id, pair)| match pair {
            (Some(l), Some(r)) => Ok((id, [l, r])),
            _ => Err(AppError::malformed(path, format!("sample {id} lacks one eye"))),
        })
        .collect()
}

pub fn load_synth(dir: &Path) -> AppResult<SynthDataset> {
    let mpath = dir.join(MANIFEST);
    let mut rows = Vec::new();
    for row in csv_reader(&mpath)?.deserialize::<ManifestRow>() {
        rows.push(row.map_err(|e| AppError::malformed(&mpath, e.to_string()))?);
    }
    if rows.is_empty() {
        return Err(AppError::EmptyDataset(format!("{} lists no samples", mpath.display())));
    }
    let truth = load_truth(&dir.join(TRUTH))?;
    if let Some(r) = rows.iter().find(|r| !truth.contains_key(&r.sample_id)) {
        return Err(AppError::malformed(&mpath, format!("sample {} has no truth rows", r.sample_id)));
    }
    Ok(SynthDataset { rows, truth, dir: dir.to_path_buf() })
}

//! The subcommands, written against generic readers and writers so they can be
//! driven from tests without a process boundary.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use eyescore_core::metrics::{
    aggregate_errors, circle_overlap, diameter_accuracy, inter_annotator, mean_prf, pupil_prf, relative_errors,
    tolerance_accuracy, Circle, Prf, RelativeErrors,
};
use eyescore_core::synth::{synth_face, Preset, SynthEyeSpec};
use eyescore_core::{build_mask, BestFrameState, EyeAnnotation, FrameResult, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RoiModeKind, RunConfig};
use crate::datasets::{
    load_annotation_csv, load_bioid, load_synth, synth_stem, CircleKind, ManifestRow, TruthRow, MANIFEST, TRUTH,
};
use crate::decode::{is_image_path, load_frame, write_png};
use crate::error::{AppError, AppResult};
use crate::pipeline::{process_frame, sample_id, with_pool, FrameOutcome, RoiSource};
use crate::report::{DetectRecord, MetricRow, RecordWriter, WindowReport};

/// Frames decoded and processed together before their records are written.
const CHUNK_PER_WORKER: usize = 8;

/// Expands directories into their image files, sorted by name.
pub fn collect_images(inputs: &[PathBuf]) -> AppResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| AppError::unreadable(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_image_path(p))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(input.clone());
        }
    }
    if out.is_empty() {
        return Err(AppError::EmptyDataset("no input images".into()));
    }
    Ok(out)
}

/// Loads and processes the frames at `positions` (1-based) in parallel, keeping input order.
fn run_frames(
    images: &[PathBuf],
    positions: &[u64],
    roi: &RoiSource,
    cfg: &RunConfig,
) -> AppResult<Vec<FrameOutcome>> {
    positions
        .par_iter()
        .map(|&pos| {
            let path = &images[pos as usize - 1];
            let frame = load_frame(path)?.with_index(pos);
            let rois = roi.regions(cfg, path, &frame, pos - 1)?;
            Ok(process_frame(&frame, rois, cfg))
        })
        .collect()
}

/// One record per processed frame, in input order.
pub fn cmd_detect<W: Write + Send>(inputs: &[PathBuf], roi: &RoiSource, cfg: &RunConfig, out: W) -> AppResult<()> {
    let images = collect_images(inputs)?;
    let positions: Vec<u64> = (1..=images.len() as u64)
        .filter(|p| (p - 1).is_multiple_of(cfg.frame_stride as u64))
        .collect();
    let mut writer = RecordWriter::new(out, cfg.format);
    let chunk = cfg.workers * CHUNK_PER_WORKER;
    with_pool(cfg.workers, || -> AppResult<()> {
        for group in positions.chunks(chunk) {
            for o in run_frames(&images, group, roi, cfg)? {
                let id = sample_id(&images[o.result.frame_index as usize - 1]);
                writer.write(&DetectRecord::new(id, &o))?;
            }
            writer.flush()?;
        }
        Ok(())
    })?
}

enum StreamEvent {
    Frame(u64),
    Reset,
}

fn window_report(
    id: u64,
    first_frame: u64,
    frames: u64,
    closed_by: &'static str,
    best: Option<FrameResult>,
    names: &[String],
) -> WindowReport {
    let best = best.filter(|b| b.confidence > 0.0);
    let dis = best.as_ref().map(|b| b.dissimilarities()).unwrap_or([None; 3]);
    let pupil_radius = best.as_ref().and_then(|b| {
        let (l, r) = (b.left_pupil?.pr as f64, b.right_pupil?.pr as f64);
        eyescore_core::select::dissimilarity(l, r).ok()
    });
    WindowReport {
        window_id: id,
        first_frame,
        frames,
        closed_by,
        best_frame: best.as_ref().map(|b| b.frame_index),
        best_frame_id: best.as_ref().map(|b| names[b.frame_index as usize - 1].clone()),
        confidence: best.as_ref().map(|b| b.confidence),
        left_pr: best.as_ref().and_then(|b| b.left_pupil.map(|p| p.pr)),
        right_pr: best.as_ref().and_then(|b| b.right_pupil.map(|p| p.pr)),
        dis_radius: dis[0],
        dis_iris_row: dis[1],
        dis_pupil_row: dis[2],
        dis_pupil_radius: pupil_radius,
        no_confident_frame: best.is_none(),
    }
}

/// Best-frame selection over a list of image paths read from `input`.
///
/// A line `RESET` ends the current window immediately. Windows also close after
/// `cfg.window` input frames and at end of input. Frames skipped by the frame
/// stride still count toward the window length.
pub fn cmd_stream<R: BufRead, W: Write + Send>(input: R, roi: &RoiSource, cfg: &RunConfig, out: W) -> AppResult<()> {
    let mut images = Vec::new();
    let mut events = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| AppError::unreadable(Path::new("<stdin>"), e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "RESET" {
            events.push(StreamEvent::Reset);
        } else {
            images.push(PathBuf::from(line));
            events.push(StreamEvent::Frame(images.len() as u64));
        }
    }
    let names: Vec<String> = images.iter().map(|p| sample_id(p)).collect();
    let selected = |pos: u64| (pos - 1).is_multiple_of(cfg.frame_stride as u64);
    let positions: Vec<u64> = (1..=images.len() as u64).filter(|&p| selected(p)).collect();

    let mut writer = RecordWriter::new(out, cfg.format);
    let mut state = BestFrameState::new(cfg.window);
    state.window_start = 1;
    let mut window_id = 0u64;
    let mut close = |state: &mut BestFrameState, next: u64, why: &'static str, w: &mut RecordWriter<W>| -> AppResult<()> {
        if state.frames_seen == 0 {
            state.reset(next);
            return Ok(());
        }
        window_id += 1;
        let (first, frames) = (state.window_start, state.frames_seen);
        let best = state.reset(next);
        w.write(&window_report(window_id, first, frames, why, best, &names))?;
        w.flush()
    };

    let chunk = cfg.workers * CHUNK_PER_WORKER;
    let mut results = std::collections::VecDeque::new();
    let mut next_chunk = positions.chunks(chunk);
    with_pool(cfg.workers, || -> AppResult<()> {
        for ev in &events {
            match *ev {
                StreamEvent::Reset => {
                    let next = state.window_start + state.frames_seen;
                    close(&mut state, next, "reset", &mut writer)?;
                }
                StreamEvent::Frame(pos) => {
                    if selected(pos) {
                        if results.is_empty() {
                            let group = next_chunk.next().ok_or_else(|| AppError::Internal("frame queue underrun".into()))?;
                            results.extend(run_frames(&images, group, roi, cfg)?);
                        }
                        let o: FrameOutcome = results.pop_front().ok_or_else(|| AppError::Internal("missing frame result".into()))?;
                        state.update_best(o.result);
                    } else {
                        state.frames_seen += 1;
                    }
                    if state.window_full() {
                        close(&mut state, pos + 1, "window", &mut writer)?;
                    }
                }
            }
        }
        let next = state.window_start + state.frames_seen;
        close(&mut state, next, "end", &mut writer)
    })?
}

/// Dataset layouts understood by `eval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    BioId,
    PupilCsv,
    SynthManifest,
}

impl DatasetKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "bioid" => Self::BioId,
            "pupil-csv" => Self::PupilCsv,
            "synth-manifest" => Self::SynthManifest,
            _ => return None,
        })
    }
}

/// Published iris figures: relative errors (E_l, E_r, E) of the method and of the
/// rough-box baseline, and A_T at T = 0.05, 0.1, 0.25.
pub const PUBLISHED_ERRORS: [f64; 3] = [0.035, 0.021, 0.028];
pub const PUBLISHED_ROUGH_ERRORS: [f64; 3] = [0.054, 0.053, 0.053];
pub const PUBLISHED_ACCURACY: [(f64, f64); 3] = [(0.05, 0.47), (0.1, 0.92), (0.25, 0.99)];
/// Published pupil figures (P, R, F1), inter-annotator agreement and diameter accuracy.
pub const PUBLISHED_PUPIL_PRF: [f64; 3] = [0.66, 0.68, 0.67];
pub const PUBLISHED_AGREEMENT_PRF: [f64; 3] = [0.82, 0.84, 0.79];
pub const PUBLISHED_DIAMETER_ACCURACY: f64 = 0.85;

/// Per-sample evaluation values.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct EvalRecord {
    pub sample_id: String,
    pub e_l: f64,
    pub e_r: f64,
    pub e: f64,
    pub iris_failures: u32,
    pub roi_clipped: bool,
    pub left_ex: Option<u32>,
    pub left_ey: Option<u32>,
    pub left_er: Option<u32>,
    pub right_ex: Option<u32>,
    pub right_ey: Option<u32>,
    pub right_er: Option<u32>,
    pub left_a_a: Option<u64>,
    pub left_a_e: Option<u64>,
    pub left_a_c: Option<u64>,
    pub right_a_a: Option<u64>,
    pub right_a_e: Option<u64>,
    pub right_a_c: Option<u64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Evaluation of one sample, kept in memory for the aggregate rows.
#[derive(Debug, Clone, Default)]
struct Evaluated {
    record: EvalRecord,
    errors: RelativeErrors,
    baseline: RelativeErrors,
    /// Per eye: center error and radius error in pixels against ground truth.
    iris_px: Vec<(f64, u32)>,
    pupil_radius_px: Vec<Option<u32>>,
    pupil: Vec<Prf>,
    diameter: Vec<f64>,
    agreement: Vec<Prf>,
}

fn accuracy_rows(rows: &mut Vec<MetricRow>, section: &str, recs: &[RelativeErrors], cfg: &RunConfig, published: bool) -> AppResult<()> {
    for &t in &cfg.tolerances {
        let a = tolerance_accuracy(recs, t)?;
        let p = PUBLISHED_ACCURACY.iter().find(|(pt, _)| *pt == t).map(|(_, v)| *v).filter(|_| published);
        rows.push(MetricRow::new(section, format!("A_{t}"), a, p));
    }
    Ok(())
}

fn error_rows(rows: &mut Vec<MetricRow>, section: &str, agg: &RelativeErrors, published: Option<[f64; 3]>) {
    let p = |i: usize| published.map(|v| v[i]);
    rows.push(MetricRow::new(section, "E_l", agg.e_l, p(0)));
    rows.push(MetricRow::new(section, "E_r", agg.e_r, p(1)));
    rows.push(MetricRow::new(section, "E", agg.e, p(2)));
}

fn prf_rows(rows: &mut Vec<MetricRow>, section: &str, prf: &Prf, published: [f64; 3]) {
    rows.push(MetricRow::new(section, "P", prf.precision, Some(published[0])));
    rows.push(MetricRow::new(section, "R", prf.recall, Some(published[1])));
    rows.push(MetricRow::new(section, "F1", prf.f1, Some(published[2])));
}

fn histogram_rows(rows: &mut Vec<MetricRow>, section: &str, values: impl Iterator<Item = u32>) {
    let mut bins = [0u64; 4];
    for v in values {
        bins[(v as usize).min(3)] += 1;
    }
    for (i, n) in bins.iter().enumerate() {
        let label = if i == 3 { "3+".to_string() } else { i.to_string() };
        rows.push(MetricRow::new(section, label, *n as f64, None));
    }
}

/// Detects both eyes of one annotated frame and scores iris centers against the annotation.
fn evaluate_frame(
    id: &str,
    image: &Path,
    ann: &EyeAnnotation,
    index: u64,
    roi: &RoiSource,
    cfg: &RunConfig,
) -> AppResult<(Evaluated, FrameOutcome, (u32, u32))> {
    let frame = load_frame(image)?;
    let dims = (frame.width(), frame.height());
    let rois = roi.regions(cfg, image, &frame, index)?;
    let o = process_frame(&frame, rois, cfg);
    let center = |r: &eyescore_core::EyeRegion| {
        let (x, y) = r.center();
        (x as f64, y as f64)
    };
    let mut failures = 0;
    let mut det = |i: Option<&eyescore_core::IrisEstimate>, r: &eyescore_core::EyeRegion| match i {
        Some(i) => (i.ex as f64, i.ey as f64),
        None => {
            failures += 1;
            center(r)
        }
    };
    let dl = det(o.result.left.as_ref(), &rois.left);
    let dr = det(o.result.right.as_ref(), &rois.right);
    let errors = relative_errors(dl, dr, ann)?;
    let baseline = relative_errors(center(&rois.left), center(&rois.right), ann)?;
    let record = EvalRecord {
        sample_id: id.to_string(),
        e_l: errors.e_l,
        e_r: errors.e_r,
        e: errors.e,
        iris_failures: failures,
        roi_clipped: rois.clipped,
        left_ex: o.result.left.map(|i| i.ex),
        left_ey: o.result.left.map(|i| i.ey),
        left_er: o.result.left.map(|i| i.er),
        right_ex: o.result.right.map(|i| i.ex),
        right_ey: o.result.right.map(|i| i.ey),
        right_er: o.result.right.map(|i| i.er),
        ..Default::default()
    };
    Ok((Evaluated { record, errors, baseline, ..Default::default() }, o, dims))
}

/// Pupil overlap of one eye; a missing estimate counts as an empty circle.
fn score_pupil(ev: &mut Evaluated, side: Side, o: &FrameOutcome, truth: &Circle, w: u32, h: u32) -> AppResult<()> {
    let est = match side {
        Side::Left => o.result.left_pupil,
        Side::Right => o.result.right_pupil,
    };
    let overlap = match est {
        Some(p) => circle_overlap(truth, &Circle::new(p.px as f64, p.py as f64, p.pr as f64), w, h),
        None => eyescore_core::Overlap { annotated: truth.raster_area(w, h), estimated: 0, common: 0 },
    };
    let prf = pupil_prf(&overlap)?;
    let r = &mut ev.record;
    match side {
        Side::Left => (r.left_a_a, r.left_a_e, r.left_a_c) = (Some(overlap.annotated), Some(overlap.estimated), Some(overlap.common)),
        Side::Right => (r.right_a_a, r.right_a_e, r.right_a_c) = (Some(overlap.annotated), Some(overlap.estimated), Some(overlap.common)),
    }
    ev.pupil.push(prf);
    ev.diameter.push(match est {
        Some(p) => diameter_accuracy(p.pr as f64, truth.r)?,
        None => 0.0,
    });
    Ok(())
}

fn finish_record(ev: &mut Evaluated) {
    if let Ok(m) = mean_prf(&ev.pupil) {
        (ev.record.precision, ev.record.recall, ev.record.f1) = (Some(m.precision), Some(m.recall), Some(m.f1));
    }
}

/// Dataset metrics report; optional per-sample records go to `records`.
pub fn cmd_eval<W: Write + Send>(
    dir: &Path,
    kind: DatasetKind,
    roi_file: Option<&Path>,
    cfg: &RunConfig,
    out: W,
    records: Option<&Path>,
) -> AppResult<()> {
    let mut rows = Vec::new();
    let evaluated = with_pool(cfg.workers, || match kind {
        DatasetKind::BioId => eval_bioid(dir, roi_file, cfg, &mut rows),
        DatasetKind::SynthManifest => eval_synth(dir, roi_file, cfg, &mut rows),
        DatasetKind::PupilCsv => eval_pupil_csv(dir, roi_file, cfg, &mut rows),
    })??;

    let errors: Vec<RelativeErrors> = evaluated.iter().map(|e| e.errors).collect();
    let published = kind == DatasetKind::BioId;
    let agg = aggregate_errors(&errors)?;
    rows.push(MetricRow::new("dataset", "samples", evaluated.len() as f64, None));
    rows.push(MetricRow::new(
        "dataset",
        "iris_failures",
        evaluated.iter().map(|e| e.record.iris_failures as f64).sum(),
        None,
    ));
    rows.push(MetricRow::new(
        "dataset",
        "clipped_rois",
        evaluated.iter().filter(|e| e.record.roi_clipped).count() as f64,
        None,
    ));
    error_rows(&mut rows, "iris", &agg, published.then_some(PUBLISHED_ERRORS));
    accuracy_rows(&mut rows, "iris", &errors, cfg, published)?;
    let baseline: Vec<RelativeErrors> = evaluated.iter().map(|e| e.baseline).collect();
    error_rows(&mut rows, "roi_center", &aggregate_errors(&baseline)?, published.then_some(PUBLISHED_ROUGH_ERRORS));
    accuracy_rows(&mut rows, "roi_center", &baseline, cfg, false)?;

    let pupils: Vec<Prf> = evaluated.iter().flat_map(|e| e.pupil.iter().copied()).collect();
    if !pupils.is_empty() {
        prf_rows(&mut rows, "pupil", &mean_prf(&pupils)?, PUBLISHED_PUPIL_PRF);
        let d: Vec<f64> = evaluated.iter().flat_map(|e| e.diameter.iter().copied()).collect();
        rows.push(MetricRow::new(
            "pupil",
            "diameter_accuracy",
            d.iter().sum::<f64>() / d.len() as f64,
            Some(PUBLISHED_DIAMETER_ACCURACY),
        ));
    }
    let agreement: Vec<Prf> = evaluated.iter().flat_map(|e| e.agreement.iter().copied()).collect();
    if !agreement.is_empty() {
        prf_rows(&mut rows, "inter_annotator", &mean_prf(&agreement)?, PUBLISHED_AGREEMENT_PRF);
    }
    if kind == DatasetKind::SynthManifest {
        let iris: Vec<(f64, u32)> = evaluated.iter().flat_map(|e| e.iris_px.iter().copied()).collect();
        histogram_rows(&mut rows, "iris_center_error_px", iris.iter().map(|(d, _)| d.ceil() as u32));
        histogram_rows(&mut rows, "iris_radius_error_px", iris.iter().map(|(_, r)| *r));
        histogram_rows(
            &mut rows,
            "pupil_radius_error_px",
            evaluated.iter().flat_map(|e| e.pupil_radius_px.iter().map(|p| p.unwrap_or(u32::MAX))),
        );
    }

    let mut w = RecordWriter::new(out, cfg.format);
    for r in &rows {
        w.write(r)?;
    }
    w.flush()?;
    if let Some(path) = records {
        let file = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
        let mut w = RecordWriter::new(std::io::BufWriter::new(file), cfg.format);
        for e in &evaluated {
            w.write(&e.record)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn roi_source(explicit: std::collections::HashMap<String, EyeAnnotation>, roi_file: Option<&Path>, cfg: &RunConfig) -> AppResult<RoiSource> {
    if cfg.roi_mode == RoiModeKind::File {
        let path = roi_file.ok_or_else(|| AppError::Usage("--roi-mode file needs --roi-file".into()))?;
        return Ok(RoiSource::with_boxes(crate::datasets::load_roi_file(path)?));
    }
    Ok(RoiSource::with_annotations(explicit))
}

fn eval_bioid(dir: &Path, roi_file: Option<&Path>, cfg: &RunConfig, rows: &mut Vec<MetricRow>) -> AppResult<Vec<Evaluated>> {
    let ds = load_bioid(dir)?;
    rows.push(MetricRow::new("dataset", "unpaired_files", ds.unpaired.len() as f64, None));
    let roi = roi_source(ds.samples.iter().map(|s| (s.id.clone(), s.annotation)).collect(), roi_file, cfg)?;
    ds.samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| evaluate_frame(&s.id, &s.image, &s.annotation, i as u64, &roi, cfg).map(|(mut ev, _, _)| {
            finish_record(&mut ev);
            ev
        }))
        .collect()
}

fn eval_synth(dir: &Path, roi_file: Option<&Path>, cfg: &RunConfig, _rows: &mut Vec<MetricRow>) -> AppResult<Vec<Evaluated>> {
    let ds = load_synth(dir)?;
    let explicit = ds
        .rows
        .iter()
        .filter_map(|r| ds.annotation(r.sample_id).map(|a| (sample_id(Path::new(&r.file)), a)))
        .collect();
    let roi = roi_source(explicit, roi_file, cfg)?;
    ds.rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let ann = ds
                .annotation(row.sample_id)
                .ok_or_else(|| AppError::malformed(&dir.join(TRUTH), format!("sample {}", row.sample_id)))?;
            let image = ds.image_path(row);
            let (mut ev, o, (w, h)) = evaluate_frame(&sample_id(&image), &image, &ann, i as u64, &roi, cfg)?;
            let truth = &ds.truth[&row.sample_id];
            for (t, side) in truth.iter().zip([Side::Left, Side::Right]) {
                let (iris, pupil) = match side {
                    Side::Left => (o.result.left, o.result.left_pupil),
                    Side::Right => (o.result.right, o.result.right_pupil),
                };
                if let Some(i) = iris {
                    let d = ((i.ex as f64 - t.iris_x as f64).powi(2) + (i.ey as f64 - t.iris_y as f64).powi(2)).sqrt();
                    ev.iris_px.push((d, i.er.abs_diff(t.iris_r)));
                } else {
                    ev.iris_px.push((f64::INFINITY, u32::MAX));
                }
                ev.pupil_radius_px.push(pupil.map(|p| p.pr.abs_diff(t.pupil_r)));
                let circle = Circle::new(t.pupil_x as f64, t.pupil_y as f64, t.pupil_r as f64);
                score_pupil(&mut ev, side, &o, &circle, w, h)?;
            }
            finish_record(&mut ev);
            Ok(ev)
        })
        .collect()
}

fn eval_pupil_csv(dir: &Path, roi_file: Option<&Path>, cfg: &RunConfig, rows: &mut Vec<MetricRow>) -> AppResult<Vec<Evaluated>> {
    let apath = dir.join("annotations.csv");
    let annotations = load_annotation_csv(&apath)?;
    let images: std::collections::HashMap<String, PathBuf> = collect_images(&[dir.to_path_buf()])?
        .into_iter()
        .map(|p| (sample_id(&p), p))
        .collect();
    let mut samples = Vec::new();
    let mut skipped = 0;
    for (id, circles) in &annotations {
        match (images.get(id), circles.eye_annotation()) {
            (Some(img), Some(ann)) => samples.push((id.clone(), img.clone(), ann, circles)),
            _ => skipped += 1,
        }
    }
    rows.push(MetricRow::new("dataset", "skipped_samples", skipped as f64, None));
    if samples.is_empty() {
        return Err(AppError::EmptyDataset(format!("no annotated images in {}", dir.display())));
    }
    let roi = roi_source(samples.iter().map(|(id, _, a, _)| (id.clone(), *a)).collect(), roi_file, cfg)?;
    samples
        .par_iter()
        .enumerate()
        .map(|(i, (id, image, ann, circles))| {
            let (mut ev, o, dims) = evaluate_frame(id, image, ann, i as u64, &roi, cfg)?;
            for side in [Side::Left, Side::Right] {
                let Some(consensus) = circles.consensus(side, CircleKind::Pupil) else { continue };
                score_pupil(&mut ev, side, &o, &consensus, dims.0, dims.1)?;
                let annotators: Vec<Circle> = circles.get(side, CircleKind::Pupil).iter().map(|(_, c)| *c).collect();
                if annotators.len() >= 2 {
                    ev.agreement.push(inter_annotator(&annotators, dims.0, dims.1)?.mean);
                }
            }
            finish_record(&mut ev);
            Ok(ev)
        })
        .collect()
}

/// Settings of the synthetic face generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub count: u32,
    pub preset: Preset,
    pub seed: u64,
    pub eye_width: u32,
    pub eye_height: u32,
    pub radii: (u32, u32),
    /// Adds a one-pixel reflection inside each pupil.
    pub highlight: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { count: 1, preset: Preset::Clean, seed: 0, eye_width: 96, eye_height: 64, radii: (6, 14), highlight: false }
    }
}

/// Specs and noise seed of face `index`; depends only on `(seed, index)`.
pub fn synth_specs(opts: &SynthOptions, index: u32) -> (SynthEyeSpec, SynthEyeSpec, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    let eye = |rng: &mut ChaCha8Rng| SynthEyeSpec::random(rng, opts.eye_width, opts.eye_height, opts.radii, opts.preset);
    let (mut l, mut r) = (eye(&mut rng), eye(&mut rng));
    let seed = rng.random();
    // Highlights draw last so the same seed yields the same faces with or without them.
    if opts.highlight {
        l.add_pupil_highlight(&mut rng);
        r.add_pupil_highlight(&mut rng);
    }
    (l, r, seed)
}

/// Writes `count` face images, `truth.csv` and `manifest.csv` into `out`.
pub fn cmd_synth(opts: &SynthOptions, out: &Path, workers: usize) -> AppResult<()> {
    if opts.radii.0 < 4 || opts.radii.0 > opts.radii.1 {
        return Err(AppError::Usage("synthetic iris radii need 4 <= min <= max".into()));
    }
    if opts.count == 0 {
        return Err(AppError::Usage("count must be positive".into()));
    }
    std::fs::create_dir_all(out).map_err(|e| AppError::io(out, e))?;
    let made: Vec<(ManifestRow, [TruthRow; 2])> = with_pool(workers, || {
        (0..opts.count)
            .into_par_iter()
            .map(|i| {
                let (l, r, seed) = synth_specs(opts, i);
                let (img, truth) = synth_face(&l, &r, seed)?;
                let file = format!("{}.png", synth_stem(i));
                write_png(&out.join(&file), img.width, img.height, &img.rgb)?;
                let row = |t: &eyescore_core::synth::EyeTruth, side: Side| TruthRow {
                    sample_id: i,
                    side: side.into(),
                    iris_x: t.iris_x,
                    iris_y: t.iris_y,
                    iris_r: t.iris_r,
                    pupil_x: t.pupil_x,
                    pupil_y: t.pupil_y,
                    pupil_r: t.pupil_r,
                };
                let manifest = ManifestRow { sample_id: i, file, preset: opts.preset.as_str().into(), seed };
                Ok((manifest, [row(&truth[0], Side::Left), row(&truth[1], Side::Right)]))
            })
            .collect::<AppResult<Vec<_>>>()
    })??;
    let csv_at = |name: &str| -> AppResult<(csv::Writer<std::fs::File>, PathBuf)> {
        let p = out.join(name);
        Ok((csv::Writer::from_path(&p).map_err(|e| AppError::io(&p, e))?, p))
    };
    let (mut mw, mp) = csv_at(MANIFEST)?;
    let (mut tw, tp) = csv_at(TRUTH)?;
    for (m, t) in &made {
        mw.serialize(m).map_err(|e| AppError::io(&mp, e))?;
        for row in t {
            tw.serialize(row).map_err(|e| AppError::io(&tp, e))?;
        }
    }
    mw.flush().map_err(|e| AppError::io(&mp, e))?;
    tw.flush().map_err(|e| AppError::io(&tp, e))?;
    Ok(())
}

/// Text rendering of the radius-`r` mask.
pub fn cmd_maskdump<W: Write>(r: u32, mut out: W) -> AppResult<()> {
    let m = build_mask(r)?;
    out.write_all(m.render().as_bytes()).map_err(|e| AppError::io(Path::new("<output>"), e))
}

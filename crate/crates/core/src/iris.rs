//! Iris localization by exhaustive filter-bank scoring.
//!
//! Every candidate `(center, radius)` is scored in one pass over the cells of the
//! radius-`r` mask. The three criteria share the pass: region sums of luma and
//! V-plane values plus the mirrored absolute differences are accumulated with
//! additions only, and the handful of multiplications happen once at the end.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::image::{EyeRegion, Frame, Side};
use crate::mask::{CellLabel, MaskBank, MaskSet};
use crate::num::round_half_up;

/// Observer of the scoring work, used to audit the one-pass cost model.
pub trait Probe {
    fn visit(&mut self);
    fn mul(&mut self, n: u32);
}

/// Probe that records nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoProbe;

impl Probe for NoProbe {
    #[inline(always)]
    fn visit(&mut self) {}
    #[inline(always)]
    fn mul(&mut self, _n: u32) {}
}

/// Counts cell visits and multiplications.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CountingProbe {
    pub visits: u64,
    pub multiplications: u64,
}

impl Probe for CountingProbe {
    fn visit(&mut self) {
        self.visits += 1;
    }
    fn mul(&mut self, n: u32) {
        self.multiplications += n as u64;
    }
}

/// Sums gathered in the single pass over a mask footprint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoreAccumulators {
    /// Luma sum per distance tag; index `k - 1` holds ring `k`.
    pub lum_ring_sum: Vec<u64>,
    pub lum_ring_count: Vec<u32>,
    pub lum_sclera_sum: u64,
    pub sat_iris_sum: u64,
    pub sat_skin_sum: u64,
    pub sat_sclera_sum: u64,
    /// `|L - L^H| + |S - S^H|` summed over iris and sclera cells.
    pub sym_sum: u64,
}

impl ScoreAccumulators {
    pub fn lum_iris_sum(&self) -> u64 {
        self.lum_ring_sum.iter().sum()
    }

    fn totals(&self) -> RegionTotals {
        RegionTotals {
            lum_iris: self.lum_iris_sum(),
            lum_sclera: self.lum_sclera_sum,
            sat_iris: self.sat_iris_sum,
            sat_skin: self.sat_skin_sum,
            sat_sclera: self.sat_sclera_sum,
            sym: self.sym_sum,
        }
    }
}

/// Region totals; all the scores need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionTotals {
    pub lum_iris: u64,
    pub lum_sclera: u64,
    pub sat_iris: u64,
    pub sat_skin: u64,
    pub sat_sclera: u64,
    pub sym: u64,
}

/// Component and total scores of one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub l: f64,
    pub s: f64,
    pub h: f64,
    pub c: f64,
}

#[inline]
fn footprint_fits(frame: &Frame, cx: u32, cy: u32, mask: &MaskSet) -> bool {
    frame
        .luma
        .contains_box(cx as i64, cy as i64, mask.half_w() as i64, mask.half_h() as i64)
}

/// Fills every accumulator in one row-major pass over the mask cells centered at `(cx, cy)`.
pub fn accumulate(frame: &Frame, cx: u32, cy: u32, mask: &MaskSet) -> Result<ScoreAccumulators> {
    accumulate_probed(frame, cx, cy, mask, &mut NoProbe)
}

pub fn accumulate_probed<P: Probe>(
    frame: &Frame,
    cx: u32,
    cy: u32,
    mask: &MaskSet,
    probe: &mut P,
) -> Result<ScoreAccumulators> {
    if !footprint_fits(frame, cx, cy, mask) {
        return Err(Error::OutOfBounds);
    }
    let r = mask.r as usize;
    let mut acc = ScoreAccumulators {
        lum_ring_sum: vec![0; r],
        lum_ring_count: vec![0; r],
        ..Default::default()
    };
    let (hw, hh) = (mask.half_w() as usize, mask.half_h() as usize);
    let x0 = cx as usize - hw;
    let gw = mask.grid_w as usize;
    for (row_idx, labels) in mask.labels().chunks_exact(gw).enumerate() {
        let y = (cy as usize + row_idx) - hh;
        let lrow = &frame.luma.row(y as u32)[x0..x0 + gw];
        let srow = &frame.satv.row(y as u32)[x0..x0 + gw];
        for (col, &label) in labels.iter().enumerate() {
            probe.visit();
            let (l, s) = (lrow[col] as u64, srow[col] as u64);
            let mirror = gw - 1 - col;
            match label {
                CellLabel::IrisRing(k) => {
                    acc.lum_ring_sum[k as usize - 1] += l;
                    acc.lum_ring_count[k as usize - 1] += 1;
                    acc.sat_iris_sum += s;
                }
                CellLabel::Sclera => {
                    acc.lum_sclera_sum += l;
                    acc.sat_sclera_sum += s;
                }
                CellLabel::Skin => {
                    acc.sat_skin_sum += s;
                    continue;
                }
            }
            acc.sym_sum += l.abs_diff(lrow[mirror] as u64) + s.abs_diff(srow[mirror] as u64);
        }
    }
    Ok(acc)
}

/// Region totals for the candidate, computed span by span.
///
/// Same single pass as [`accumulate`] but driven by the mask's row spans, which
/// lets the hot loop run over contiguous slices. Per-ring sums are not kept.
/// Each mirrored pair is differenced once and counted for both of its cells.
#[inline]
pub fn region_totals(frame: &Frame, cx: u32, cy: u32, mask: &MaskSet) -> Result<RegionTotals> {
    if !footprint_fits(frame, cx, cy, mask) {
        return Err(Error::OutOfBounds);
    }
    Ok(region_totals_unchecked(frame, cx as usize, cy as usize, mask))
}

#[inline]
fn sum_u8(xs: &[u8]) -> u64 {
    xs.iter().map(|&v| v as u32).sum::<u32>() as u64
}

#[inline]
fn mirrored_abs_diff(row: &[u8], c: usize, half: usize) -> u64 {
    let right = &row[c + 1..=c + half];
    let left = &row[c - half..c];
    right
        .iter()
        .zip(left.iter().rev())
        .map(|(&a, &b)| a.abs_diff(b) as u32)
        .sum::<u32>() as u64
}

fn region_totals_unchecked(frame: &Frame, cx: usize, cy: usize, mask: &MaskSet) -> RegionTotals {
    let hw = mask.half_w() as usize;
    let mut t = RegionTotals::default();
    for span in mask.rows() {
        let y = (cy as i64 + span.dy as i64) as u32;
        let lrow = frame.luma.row(y);
        let srow = frame.satv.row(y);
        let (ih, eh) = (span.iris_half as usize, span.ellipse_half as usize);

        let iris = cx - ih..=cx + ih;
        t.lum_iris += sum_u8(&lrow[iris.clone()]);
        t.sat_iris += sum_u8(&srow[iris]);

        if eh > ih {
            let left = cx - eh..cx - ih;
            let right = cx + ih + 1..=cx + eh;
            t.lum_sclera += sum_u8(&lrow[left.clone()]) + sum_u8(&lrow[right.clone()]);
            t.sat_sclera += sum_u8(&srow[left]) + sum_u8(&srow[right]);
        }

        t.sat_skin += sum_u8(&srow[cx - hw..cx - eh]) + sum_u8(&srow[cx + eh + 1..=cx + hw]);

        if eh > 0 {
            t.sym += 2 * (mirrored_abs_diff(lrow, cx, eh) + mirrored_abs_diff(srow, cx, eh));
        }
    }
    t
}

/// `l = w_iris * Σ iris luma + w_sclera * Σ sclera luma`.
pub fn luminosity_score(acc: &ScoreAccumulators, mask: &MaskSet) -> f64 {
    lum_from_totals(&acc.totals(), mask)
}

/// `s = w_iris_skin * (Σ iris + Σ skin) + w_sclera * Σ sclera`, over V-plane values.
pub fn saturation_score(acc: &ScoreAccumulators, mask: &MaskSet) -> f64 {
    sat_from_totals(&acc.totals(), mask)
}

/// `h = w_sym * Σ (|L - L^H| + |S - S^H|)`; never positive.
pub fn symmetry_score(acc: &ScoreAccumulators, mask: &MaskSet) -> f64 {
    sym_from_totals(&acc.totals(), mask)
}

pub fn total_score(l: f64, s: f64, h: f64) -> f64 {
    l + s + h
}

// The unit-mass weights are applied as divisions by the region counts, which
// keeps uniform regions at exactly zero.

#[inline]
fn lum_from_totals(t: &RegionTotals, m: &MaskSet) -> f64 {
    t.lum_sclera as f64 / m.n_sclera as f64 - t.lum_iris as f64 / m.n_iris as f64
}

#[inline]
fn sat_from_totals(t: &RegionTotals, m: &MaskSet) -> f64 {
    (t.sat_iris + t.sat_skin) as f64 / (m.n_iris + m.n_skin) as f64 - t.sat_sclera as f64 / m.n_sclera as f64
}

#[inline]
fn sym_from_totals(t: &RegionTotals, m: &MaskSet) -> f64 {
    -(t.sym as f64) / (m.n_iris + m.n_sclera) as f64
}

/// All three scores and their sum. Five normalizing divisions regardless of radius.
#[inline]
pub fn scores_from_totals<P: Probe>(t: &RegionTotals, mask: &MaskSet, probe: &mut P) -> Scores {
    let l = lum_from_totals(t, mask);
    let s = sat_from_totals(t, mask);
    let h = sym_from_totals(t, mask);
    probe.mul(5);
    Scores {
        l,
        s,
        h,
        c: total_score(l, s, h),
    }
}

pub fn scores(acc: &ScoreAccumulators, mask: &MaskSet) -> Scores {
    scores_probed(acc, mask, &mut NoProbe)
}

pub fn scores_probed<P: Probe>(acc: &ScoreAccumulators, mask: &MaskSet, probe: &mut P) -> Scores {
    scores_from_totals(&acc.totals(), mask, probe)
}

/// Best-scoring iris candidate for one eye.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrisEstimate {
    pub ex: u32,
    pub ey: u32,
    pub er: u32,
    pub l: f64,
    pub s: f64,
    pub h: f64,
    pub c: f64,
    pub side: Side,
}

impl IrisEstimate {
    /// Total order used for the argmax: higher score first, then smaller radius,
    /// then raster order of the center.
    pub fn rank(&self, other: &Self) -> Ordering {
        self.c
            .total_cmp(&other.c)
            .then_with(|| other.er.cmp(&self.er))
            .then_with(|| other.ey.cmp(&self.ey))
            .then_with(|| other.ex.cmp(&self.ex))
    }

    fn better(self, other: Self) -> Self {
        if other.rank(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

fn best_of(a: Option<IrisEstimate>, b: Option<IrisEstimate>) -> Option<IrisEstimate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.better(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// How the search radius range is chosen for a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusPolicy {
    #[default]
    /// `r_min = max(2, round(0.08 w))`, `r_max = round(0.35 w)` for a region of width `w`.
    Proportional,
    Fixed { r_min: u32, r_max: u32 },
}

impl RadiusPolicy {
    pub fn range(&self, region_w: u32) -> (u32, u32) {
        match *self {
            RadiusPolicy::Proportional => {
                let w = region_w as f64;
                let lo = (round_half_up(0.08 * w) as u32).max(2);
                let hi = (round_half_up(0.35 * w) as u32).max(lo);
                (lo, hi)
            }
            RadiusPolicy::Fixed { r_min, r_max } => (r_min, r_max.max(r_min)),
        }
    }
}

/// How candidate region totals are computed during the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanEngine {
    /// One pass over every mask cell of every candidate.
    OnePass,
    /// Per center column, tables of centered row sums and mirrored differences
    /// indexed by half-width. The totals of every candidate in the column then
    /// accumulate one mask row at a time. They are the same integers as the
    /// one-pass totals, so scores and the argmax are identical.
    #[default]
    ColumnTables,
}

/// Centered sums around column `cx` for rows `y0..y0 + rows`, stored
/// half-width major so that entry `(a, y)` is at `a * rows + (y - y0)`.
///
/// `luma` and `satv` hold the channel sum over columns `[cx - a, cx + a]`;
/// `sym` holds `2 * sum_{t=1..=a} |L(cx+t) - L(cx-t)| + |S(cx+t) - S(cx-t)|`.
struct ColumnTables {
    y0: usize,
    rows: usize,
    luma: Vec<u32>,
    satv: Vec<u32>,
    sym: Vec<u32>,
}

impl ColumnTables {
    fn new(frame: &Frame, cx: usize, y0: usize, y1: usize, a_max: usize) -> Self {
        let rows = y1 + 1 - y0;
        let n = (a_max + 1) * rows;
        let (mut luma, mut satv, mut sym) = (vec![0u32; n], vec![0u32; n], vec![0u32; n]);
        for y in y0..=y1 {
            let (l, s) = (frame.luma.row(y as u32), frame.satv.row(y as u32));
            let i = y - y0;
            let (mut sl, mut ss, mut sm) = (l[cx] as u32, s[cx] as u32, 0u32);
            luma[i] = sl;
            satv[i] = ss;
            for a in 1..=a_max {
                let (lp, lm, sp, sn) = (l[cx + a], l[cx - a], s[cx + a], s[cx - a]);
                sl += lp as u32 + lm as u32;
                ss += sp as u32 + sn as u32;
                sm += 2 * (lp.abs_diff(lm) as u32 + sp.abs_diff(sn) as u32);
                let k = a * rows + i;
                luma[k] = sl;
                satv[k] = ss;
                sym[k] = sm;
            }
        }
        Self { y0, rows, luma, satv, sym }
    }

    /// Entries of half-width `a` from row `y` on.
    #[inline(always)]
    fn from<'a>(&self, table: &'a [u32], a: usize, y: usize) -> &'a [u32] {
        &table[a * self.rows + (y - self.y0)..(a + 1) * self.rows]
    }
}

/// `acc[i] += src[i * stride]` for every `i` in `acc`.
#[inline(always)]
fn add_strided(acc: &mut [u64], src: &[u32], stride: usize) {
    if stride == 1 {
        for (a, &v) in acc.iter_mut().zip(src) {
            *a += v as u64;
        }
    } else {
        for (a, &v) in acc.iter_mut().zip(src.iter().step_by(stride)) {
            *a += v as u64;
        }
    }
}

/// Exhaustive search over centers and radii.
#[derive(Debug, Clone)]
pub struct IrisDetector {
    bank: MaskBank,
    stride: u32,
    engine: ScanEngine,
}

impl IrisDetector {
    pub fn new(r_min: u32, r_max: u32) -> Result<Self> {
        Ok(Self::from_bank(MaskBank::new(r_min, r_max.max(r_min))?))
    }

    pub fn from_bank(bank: MaskBank) -> Self {
        Self {
            bank,
            stride: 1,
            engine: ScanEngine::default(),
        }
    }

    /// Center grid step in pixels (1 = every pixel of the region).
    pub fn with_stride(mut self, stride: u32) -> Self {
        self.stride = stride.max(1);
        self
    }

    pub fn with_engine(mut self, engine: ScanEngine) -> Self {
        self.engine = engine;
        self
    }

    pub fn engine(&self) -> ScanEngine {
        self.engine
    }

    pub fn bank(&self) -> &MaskBank {
        &self.bank
    }

    fn check(&self, frame: &Frame, roi: &EyeRegion) -> Result<()> {
        if roi.x as u64 + roi.w as u64 > frame.width() as u64
            || roi.y as u64 + roi.h as u64 > frame.height() as u64
        {
            return Err(Error::InvalidRegion);
        }
        Ok(())
    }

    fn candidate(roi: &EyeRegion, x: u32, y: u32, mask: &MaskSet, t: &RegionTotals) -> IrisEstimate {
        let sc = scores_from_totals(t, mask, &mut NoProbe);
        IrisEstimate {
            ex: x,
            ey: y,
            er: mask.r,
            l: sc.l,
            s: sc.s,
            h: sc.h,
            c: sc.c,
            side: roi.side,
        }
    }

    /// One-pass engine: every candidate in row `y` for one mask.
    fn scan_row(&self, frame: &Frame, roi: &EyeRegion, mask: &MaskSet, y: u32) -> Option<IrisEstimate> {
        let (hw, hh) = (mask.half_w(), mask.half_h());
        if y < hh || y + hh >= frame.height() {
            return None;
        }
        let mut best: Option<IrisEstimate> = None;
        for x in self.columns(roi) {
            if x >= hw && x + hw < frame.width() {
                let t = region_totals_unchecked(frame, x as usize, y as usize, mask);
                best = best_of(best, Some(Self::candidate(roi, x, y, mask, &t)));
            }
        }
        best
    }

    /// Table engine: every candidate in column `x`, all rows and radii.
    fn scan_column(&self, frame: &Frame, roi: &EyeRegion, x: u32) -> Option<IrisEstimate> {
        let (w, h) = (frame.width(), frame.height());
        let fits = |m: &&MaskSet| x >= m.half_w() && x + m.half_w() < w;
        let a_max = self.bank.iter().filter(fits).map(|m| m.half_w()).max()? as usize;
        let hh_max = self.bank.iter().map(|m| m.half_h()).max()?;
        let y0 = roi.y.saturating_sub(hh_max) as usize;
        let y1 = ((roi.y + roi.h - 1 + hh_max).min(h - 1)) as usize;
        let tables = ColumnTables::new(frame, x as usize, y0, y1, a_max);
        let stride = self.stride as usize;
        let ys: Vec<u32> = self.rows(roi).collect();
        let mut acc = [(); 6].map(|_| vec![0u64; ys.len()]);
        let mut best: Option<IrisEstimate> = None;
        for mask in self.bank.iter().filter(fits) {
            let hh = mask.half_h();
            let lo = ys.partition_point(|&y| y < hh);
            let hi = ys.partition_point(|&y| y + hh < h);
            if lo >= hi {
                continue;
            }
            let cand = &ys[lo..hi];
            let [lum_i, sat_i, lum_e, sat_e, sat_a, sym] = acc.each_mut().map(|v| &mut v[..cand.len()]);
            for v in [&mut *lum_i, &mut *sat_i, &mut *lum_e, &mut *sat_e, &mut *sat_a, &mut *sym] {
                v.fill(0);
            }
            let hw = mask.half_w() as usize;
            for span in mask.rows() {
                let y = (cand[0] as i64 + span.dy as i64) as usize;
                let (ih, eh) = (span.iris_half as usize, span.ellipse_half as usize);
                add_strided(lum_i, tables.from(&tables.luma, ih, y), stride);
                add_strided(sat_i, tables.from(&tables.satv, ih, y), stride);
                add_strided(lum_e, tables.from(&tables.luma, eh, y), stride);
                add_strided(sat_e, tables.from(&tables.satv, eh, y), stride);
                add_strided(sat_a, tables.from(&tables.satv, hw, y), stride);
                add_strided(sym, tables.from(&tables.sym, eh, y), stride);
            }
            for (i, &cy) in cand.iter().enumerate() {
                let t = RegionTotals {
                    lum_iris: lum_i[i],
                    lum_sclera: lum_e[i] - lum_i[i],
                    sat_iris: sat_i[i],
                    sat_skin: sat_a[i] - sat_e[i],
                    sat_sclera: sat_e[i] - sat_i[i],
                    sym: sym[i],
                };
                best = best_of(best, Some(Self::candidate(roi, x, cy, mask, &t)));
            }
        }
        best
    }

    fn rows(&self, roi: &EyeRegion) -> impl Iterator<Item = u32> + Clone {
        (roi.y..roi.y + roi.h).step_by(self.stride as usize)
    }

    fn columns(&self, roi: &EyeRegion) -> impl Iterator<Item = u32> + Clone {
        (roi.x..roi.x + roi.w).step_by(self.stride as usize)
    }

    /// Argmax of the total score over the region's centers and the bank's radii.
    pub fn detect(&self, frame: &Frame, roi: &EyeRegion) -> Result<IrisEstimate> {
        self.check(frame, roi)?;
        let mut best = None;
        match self.engine {
            ScanEngine::OnePass => {
                for mask in self.bank.iter() {
                    for y in self.rows(roi) {
                        best = best_of(best, self.scan_row(frame, roi, mask, y));
                    }
                }
            }
            ScanEngine::ColumnTables => {
                for x in self.columns(roi) {
                    best = best_of(best, self.scan_column(frame, roi, x));
                }
            }
        }
        best.ok_or(Error::NoValidCandidate)
    }

    /// Parallel variant of [`IrisDetector::detect`]; identical result.
    #[cfg(feature = "rayon")]
    pub fn detect_par(&self, frame: &Frame, roi: &EyeRegion) -> Result<IrisEstimate> {
        use rayon::prelude::*;
        self.check(frame, roi)?;
        let best = match self.engine {
            ScanEngine::OnePass => {
                let rows: Vec<u32> = self.rows(roi).collect();
                let masks: Vec<&MaskSet> = self.bank.iter().collect();
                masks
                    .par_iter()
                    .flat_map_iter(|m| rows.iter().map(move |&y| (*m, y)))
                    .map(|(m, y)| self.scan_row(frame, roi, m, y))
                    .reduce(|| None, best_of)
            }
            ScanEngine::ColumnTables => {
                let cols: Vec<u32> = self.columns(roi).collect();
                cols.par_iter()
                    .map(|&x| self.scan_column(frame, roi, x))
                    .reduce(|| None, best_of)
            }
        };
        best.ok_or(Error::NoValidCandidate)
    }
}

/// One-shot search with radius range `[r_min, r_max]` and unit stride.
pub fn detect_iris(frame: &Frame, roi: &EyeRegion, r_min: u32, r_max: u32) -> Result<IrisEstimate> {
    IrisDetector::new(r_min, r_max)?.detect(frame, roi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Channel;
    use crate::mask::build_mask;

    fn const_frame(w: u32, h: u32, v: u8) -> Frame {
        Frame::from_gray(Channel::filled(w, h, v))
    }

    #[test]
    fn constant_frame_accumulators() {
        let f = const_frame(64, 64, 128);
        let m = build_mask(8).unwrap();
        let acc = accumulate(&f, 32, 32, &m).unwrap();
        for k in 0..8 {
            assert_eq!(acc.lum_ring_sum[k], 128 * acc.lum_ring_count[k] as u64);
        }
        assert_eq!(acc.lum_ring_count.iter().sum::<u32>(), m.n_iris);
        assert_eq!(acc.sym_sum, 0);
        let sc = scores(&acc, &m);
        assert_eq!((sc.l, sc.s, sc.h), (0.0, 0.0, 0.0));
    }

    #[test]
    fn out_of_bounds_candidate() {
        let f = const_frame(39, 15, 0);
        let m = build_mask(8).unwrap();
        assert!(accumulate(&f, 19, 7, &m).is_ok());
        assert_eq!(accumulate(&f, 18, 7, &m).unwrap_err(), Error::OutOfBounds);
        assert_eq!(region_totals(&f, 19, 8, &m).unwrap_err(), Error::OutOfBounds);
    }

    fn region_frame(m: &MaskSet, iris: u8, sclera: u8, skin: u8) -> Frame {
        let (hw, hh) = (m.half_w() as i32, m.half_h() as i32);
        let ch = Channel::from_fn(m.grid_w, m.grid_h, |x, y| match m.label(x as i32 - hw, y as i32 - hh) {
            CellLabel::IrisRing(_) => iris,
            CellLabel::Sclera => sclera,
            CellLabel::Skin => skin,
        });
        Frame::new(ch.clone(), ch, 0).unwrap()
    }

    #[test]
    fn luminosity_extremes() {
        let m = build_mask(8).unwrap();
        let (cx, cy) = (m.half_w(), m.half_h());
        let f = region_frame(&m, 0, 255, 77);
        let acc = accumulate(&f, cx, cy, &m).unwrap();
        assert!((luminosity_score(&acc, &m) - 255.0).abs() < 1e-9);
        let f = region_frame(&m, 255, 0, 77);
        let acc = accumulate(&f, cx, cy, &m).unwrap();
        assert!((luminosity_score(&acc, &m) + 255.0).abs() < 1e-9);
    }

    #[test]
    fn saturation_example() {
        let m = build_mask(8).unwrap();
        let f = region_frame(&m, 200, 40, 200);
        let acc = accumulate(&f, m.half_w(), m.half_h(), &m).unwrap();
        assert!((saturation_score(&acc, &m) - 160.0).abs() < 1e-9);
        let g = const_frame(m.grid_w, m.grid_h, 10);
        let acc = accumulate(&g, m.half_w(), m.half_h(), &m).unwrap();
        assert_eq!(saturation_score(&acc, &m), 0.0);
    }

    #[test]
    fn symmetry_half_split() {
        let m = build_mask(8).unwrap();
        let (hw, hh) = (m.half_w(), m.half_h());
        let ch = Channel::from_fn(m.grid_w, m.grid_h, |x, _| if x > hw { 255 } else { 0 });
        let f = Frame::new(ch.clone(), ch, 0).unwrap();
        let acc = accumulate(&f, hw, hh, &m).unwrap();
        // cells off the center column each see |0 - 255| in both channels
        let mut off_center = 0u32;
        for dy in -(hh as i32)..=hh as i32 {
            for dx in -(hw as i32)..=hw as i32 {
                if dx != 0 && m.label(dx, dy) != CellLabel::Skin {
                    off_center += 1;
                }
            }
        }
        let expect = -510.0 * off_center as f64 / (m.n_iris + m.n_sclera) as f64;
        let h = symmetry_score(&acc, &m);
        assert!((h - expect).abs() < 1e-9, "{h} vs {expect}");
        assert!(h < -450.0);
    }

    #[test]
    fn mirror_symmetric_frame_has_zero_sym() {
        let m = build_mask(6).unwrap();
        let (hw, hh) = (m.half_w(), m.half_h());
        let ch = Channel::from_fn(m.grid_w + 4, m.grid_h + 2, |x, y| {
            let dx = (x as i32 - (hw as i32 + 2)).unsigned_abs();
            ((dx * 37 + y * 11) % 251) as u8
        });
        let f = Frame::new(ch.clone(), ch, 0).unwrap();
        let acc = accumulate(&f, hw + 2, hh + 1, &m).unwrap();
        assert_eq!(acc.sym_sum, 0);
    }

    #[test]
    fn total_score_examples() {
        assert_eq!(total_score(0.0, 0.0, 0.0), 0.0);
        assert_eq!(total_score(255.0, 160.0, 0.0), 415.0);
        assert_eq!(total_score(255.0, 0.0, -510.0), -255.0);
    }

    #[test]
    fn constant_roi_tie_break() {
        let f = const_frame(80, 40, 90);
        let roi = EyeRegion { x: 20, y: 10, w: 30, h: 20, side: Side::Left };
        let est = detect_iris(&f, &roi, 3, 6).unwrap();
        assert_eq!(est.c, 0.0);
        // smallest radius, then the first in-frame center in raster order
        let m = build_mask(3).unwrap();
        assert_eq!(est.er, 3);
        assert_eq!((est.ex, est.ey), (roi.x.max(m.half_w()), roi.y.max(m.half_h())));
    }

    #[test]
    fn singleton_search_space() {
        let m = build_mask(5).unwrap();
        let f = const_frame(m.grid_w, m.grid_h, 1);
        let roi = EyeRegion { x: m.half_w(), y: m.half_h(), w: 1, h: 1, side: Side::Right };
        let est = detect_iris(&f, &roi, 5, 5).unwrap();
        assert_eq!((est.ex, est.ey, est.er, est.side), (m.half_w(), m.half_h(), 5, Side::Right));
    }

    #[test]
    fn no_valid_candidate() {
        let f = const_frame(20, 20, 1);
        let roi = EyeRegion { x: 0, y: 0, w: 20, h: 20, side: Side::Left };
        assert_eq!(detect_iris(&f, &roi, 8, 9).unwrap_err(), Error::NoValidCandidate);
    }

    #[test]
    fn radius_policy() {
        assert_eq!(RadiusPolicy::Proportional.range(80), (6, 28));
        assert_eq!(RadiusPolicy::Proportional.range(15), (2, 5));
        assert_eq!(RadiusPolicy::Fixed { r_min: 5, r_max: 3 }.range(10), (5, 5));
    }

    #[test]
    fn probe_counts() {
        let f = const_frame(100, 40, 3);
        for r in [2u32, 5, 9] {
            let m = build_mask(r).unwrap();
            let mut p = CountingProbe::default();
            let acc = accumulate_probed(&f, 50, 20, &m, &mut p).unwrap();
            scores_from_totals(&acc.totals(), &m, &mut p);
            assert_eq!(p.visits, ((2 * r - 1) * (4 * r + 7)) as u64);
            assert_eq!(p.multiplications, 5);
        }
    }
}

//! Three-region iris/sclera/skin masks.
//!
//! A mask of radius `r` is a `(2r-1) x (4r+7)` grid centered on a candidate iris
//! center. With `R = r - 1`:
//!
//! * iris: cells with `dx² + dy² <= R²`, tagged with the ring index `ceil(d) + 1`;
//! * sclera: the remaining cells of the ellipse `dx² + 4dy² <= 4R²`
//!   (horizontal semi-axis `2R`, vertical `R`);
//! * skin: everything else.
//!
//! At `r = 8` this reproduces the published 15x39 radius-8 mask cell for cell.
//! Labels and weights are kept apart: the ring index is a distance tag, while
//! each scoring criterion applies a single region-normalized weight.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};
use crate::num::{ceil_sqrt, isqrt};

pub const MIN_RADIUS: u32 = 2;

/// Region membership of one mask cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellLabel {
    /// Iris cell at distance tag `k` (1 at the center).
    IrisRing(u32),
    Sclera,
    Skin,
}

impl CellLabel {
    /// Encoding of the published mask listing: ring digit, `-1` for sclera, `0` for skin.
    pub fn code(self) -> i32 {
        match self {
            CellLabel::IrisRing(k) => k as i32,
            CellLabel::Sclera => -1,
            CellLabel::Skin => 0,
        }
    }

    pub fn is_iris(self) -> bool {
        matches!(self, CellLabel::IrisRing(_))
    }
}

/// Label of the cell at offset `(dx, dy)` in the mask of radius `r`.
///
/// Precondition: `|dx| <= 2r+3`, `|dy| <= r-1`.
pub fn classify_cell(dx: i32, dy: i32, r: u32) -> CellLabel {
    debug_assert!(dx.unsigned_abs() <= 2 * r + 3 && dy.unsigned_abs() < r);
    let rr = r as u64 - 1;
    let (dx2, dy2) = ((dx as i64).pow(2) as u64, (dy as i64).pow(2) as u64);
    let d2 = dx2 + dy2;
    if d2 <= rr * rr {
        CellLabel::IrisRing(ceil_sqrt(d2) as u32 + 1)
    } else if dx2 + 4 * dy2 <= 4 * rr * rr {
        CellLabel::Sclera
    } else {
        CellLabel::Skin
    }
}

/// Horizontal extents of the iris and iris-plus-sclera spans of one mask row.
///
/// The row is symmetric: iris covers `|dx| <= iris_half`, the sclera covers
/// `iris_half < |dx| <= ellipse_half`, skin the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowSpan {
    pub dy: i32,
    pub iris_half: u32,
    pub ellipse_half: u32,
}

/// Label grid and per-criterion weights for one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet {
    pub r: u32,
    pub grid_w: u32,
    pub grid_h: u32,
    labels: Vec<CellLabel>,
    rows: Vec<RowSpan>,
    pub n_iris: u32,
    pub n_sclera: u32,
    pub n_skin: u32,
    pub w_lum_iris: f64,
    pub w_lum_sclera: f64,
    pub w_sat_iris_skin: f64,
    pub w_sat_sclera: f64,
    pub w_sym: f64,
}

impl MaskSet {
    pub fn build(r: u32) -> Result<Self> {
        build_mask(r)
    }

    #[inline]
    pub fn half_w(&self) -> u32 {
        self.grid_w / 2
    }

    #[inline]
    pub fn half_h(&self) -> u32 {
        self.grid_h / 2
    }

    /// Cell count of the whole grid.
    #[inline]
    pub fn cells(&self) -> u32 {
        self.grid_w * self.grid_h
    }

    /// Label at grid offset `(dx, dy)` from the center.
    pub fn label(&self, dx: i32, dy: i32) -> CellLabel {
        let col = (dx + self.half_w() as i32) as usize;
        let row = (dy + self.half_h() as i32) as usize;
        self.labels[row * self.grid_w as usize + col]
    }

    /// Labels in row-major order.
    pub fn labels(&self) -> &[CellLabel] {
        &self.labels
    }

    /// Per-row spans, top row first.
    pub fn rows(&self) -> &[RowSpan] {
        &self.rows
    }

    /// Luminosity weight of a cell label.
    pub fn lum_weight(&self, label: CellLabel) -> f64 {
        match label {
            CellLabel::IrisRing(_) => self.w_lum_iris,
            CellLabel::Sclera => self.w_lum_sclera,
            CellLabel::Skin => 0.0,
        }
    }

    pub fn sat_weight(&self, label: CellLabel) -> f64 {
        match label {
            CellLabel::IrisRing(_) | CellLabel::Skin => self.w_sat_iris_skin,
            CellLabel::Sclera => self.w_sat_sclera,
        }
    }

    pub fn sym_weight(&self, label: CellLabel) -> f64 {
        match label {
            CellLabel::Skin => 0.0,
            _ => self.w_sym,
        }
    }

    /// Text rendering in the published encoding: ring digits, `-` for sclera,
    /// `0` for skin, cells separated by single spaces, one line per row.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.labels.len() * 2 + self.grid_h as usize);
        for row in self.labels.chunks_exact(self.grid_w as usize) {
            for (i, label) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match label {
                    CellLabel::IrisRing(k) => {
                        let _ = write!(out, "{k}");
                    }
                    CellLabel::Sclera => out.push('-'),
                    CellLabel::Skin => out.push('0'),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the mask of radius `r`.
pub fn build_mask(r: u32) -> Result<MaskSet> {
    if r < MIN_RADIUS {
        return Err(Error::RadiusTooSmall(r));
    }
    let grid_w = 4 * r + 7;
    let grid_h = 2 * r - 1;
    let (hw, hh) = ((grid_w / 2) as i32, (grid_h / 2) as i32);

    let mut labels = Vec::with_capacity((grid_w * grid_h) as usize);
    let (mut n_iris, mut n_sclera, mut n_skin) = (0u32, 0u32, 0u32);
    for dy in -hh..=hh {
        for dx in -hw..=hw {
            let label = classify_cell(dx, dy, r);
            match label {
                CellLabel::IrisRing(_) => n_iris += 1,
                CellLabel::Sclera => n_sclera += 1,
                CellLabel::Skin => n_skin += 1,
            }
            labels.push(label);
        }
    }

    let rr = (r - 1) as u64;
    let rows = (-hh..=hh)
        .map(|dy| {
            let rem = rr * rr - (dy as i64 * dy as i64) as u64;
            RowSpan {
                dy,
                iris_half: isqrt(rem) as u32,
                ellipse_half: isqrt(4 * rem) as u32,
            }
        })
        .collect();

    let n_is = (n_iris + n_sclera) as f64;
    Ok(MaskSet {
        r,
        grid_w,
        grid_h,
        labels,
        rows,
        n_iris,
        n_sclera,
        n_skin,
        w_lum_iris: -1.0 / n_iris as f64,
        w_lum_sclera: 1.0 / n_sclera as f64,
        w_sat_iris_skin: 1.0 / (n_iris + n_skin) as f64,
        w_sat_sclera: -1.0 / n_sclera as f64,
        w_sym: -1.0 / n_is,
    })
}

/// Masks for every radius in `[r_min, r_max]`, built once and shared read-only.
#[derive(Debug, Clone)]
pub struct MaskBank {
    r_min: u32,
    masks: Vec<MaskSet>,
}

impl MaskBank {
    pub fn new(r_min: u32, r_max: u32) -> Result<Self> {
        if r_min < MIN_RADIUS {
            return Err(Error::RadiusTooSmall(r_min));
        }
        let masks = (r_min..=r_max).map(build_mask).collect::<Result<Vec<_>>>()?;
        Ok(Self { r_min, masks })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn r_min(&self) -> u32 {
        self.r_min
    }

    pub fn r_max(&self) -> u32 {
        self.r_min + self.masks.len() as u32 - 1
    }

    pub fn get(&self, r: u32) -> Option<&MaskSet> {
        r.checked_sub(self.r_min)
            .and_then(|i| self.masks.get(i as usize))
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaskSet> {
        self.masks.iter()
    }
}

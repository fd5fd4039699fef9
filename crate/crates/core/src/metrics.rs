//! Evaluation metrics: inter-ocular relative errors, tolerance accuracy and
//! pixel-area precision/recall/F1 for pupil circles.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Annotated iris centers of both eyes, in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeAnnotation {
    pub lx: f64,
    pub ly: f64,
    pub rx: f64,
    pub ry: f64,
}

impl EyeAnnotation {
    pub fn new(lx: f64, ly: f64, rx: f64, ry: f64) -> Result<Self> {
        let a = Self { lx, ly, rx, ry };
        if a.d_lr() > 0.0 {
            Ok(a)
        } else {
            Err(Error::MalformedAnnotation)
        }
    }

    /// Inter-ocular distance.
    pub fn d_lr(&self) -> f64 {
        libm::hypot(self.rx - self.lx, self.ry - self.ly)
    }
}

/// Per-sample relative errors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelativeErrors {
    pub e_l: f64,
    pub e_r: f64,
    pub e: f64,
}

pub fn relative_errors(det_l: (f64, f64), det_r: (f64, f64), ann: &EyeAnnotation) -> Result<RelativeErrors> {
    let d_lr = ann.d_lr();
    if d_lr <= 0.0 {
        return Err(Error::MalformedAnnotation);
    }
    let e_l = libm::hypot(det_l.0 - ann.lx, det_l.1 - ann.ly) / d_lr;
    let e_r = libm::hypot(det_r.0 - ann.rx, det_r.1 - ann.ry) / d_lr;
    Ok(RelativeErrors {
        e_l,
        e_r,
        e: (e_l + e_r) / 2.0,
    })
}

/// Dataset means `(E_l, E_r, E)` with `E = (E_l + E_r) / 2`.
pub fn aggregate_errors(records: &[RelativeErrors]) -> Result<RelativeErrors> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = records.len() as f64;
    let e_l = records.iter().map(|r| r.e_l).sum::<f64>() / n;
    let e_r = records.iter().map(|r| r.e_r).sum::<f64>() / n;
    Ok(RelativeErrors {
        e_l,
        e_r,
        e: (e_l + e_r) / 2.0,
    })
}

/// Fraction of samples whose worse eye has relative error at most `t`.
pub fn tolerance_accuracy(records: &[RelativeErrors], t: f64) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let hits = records.iter().filter(|r| r.e_l.max(r.e_r) <= t).count();
    Ok(hits as f64 / records.len() as f64)
}

/// Circle in pixel-index coordinates (pixel `i` has its center at `i`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Self { cx, cy, r }
    }

    #[inline]
    pub fn contains_pixel(&self, i: i64, j: i64) -> bool {
        let (dx, dy) = (i as f64 - self.cx, j as f64 - self.cy);
        dx * dx + dy * dy <= self.r * self.r
    }

    /// Pixel-index bounding box clipped to `[0, w) x [0, h)`.
    fn pixel_box(&self, w: u32, h: u32) -> (i64, i64, i64, i64) {
        let x0 = (libm::floor(self.cx - self.r) as i64).max(0);
        let y0 = (libm::floor(self.cy - self.r) as i64).max(0);
        let x1 = (libm::ceil(self.cx + self.r) as i64).min(w as i64 - 1);
        let y1 = (libm::ceil(self.cy + self.r) as i64).min(h as i64 - 1);
        (x0, y0, x1, y1)
    }

    pub fn raster_area(&self, w: u32, h: u32) -> u64 {
        let (x0, y0, x1, y1) = self.pixel_box(w, h);
        let mut n = 0;
        for j in y0..=y1 {
            for i in x0..=x1 {
                n += self.contains_pixel(i, j) as u64;
            }
        }
        n
    }
}

/// Rasterized areas of an annotated circle, an estimated circle and their intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Overlap {
    pub annotated: u64,
    pub estimated: u64,
    pub common: u64,
}

/// Pixel-count areas over a `width x height` frame.
pub fn circle_overlap(annotated: &Circle, estimated: &Circle, width: u32, height: u32) -> Overlap {
    let (x0, y0, x1, y1) = annotated.pixel_box(width, height);
    let mut common = 0;
    for j in y0..=y1 {
        for i in x0..=x1 {
            common += (annotated.contains_pixel(i, j) && estimated.contains_pixel(i, j)) as u64;
        }
    }
    Overlap {
        annotated: annotated.raster_area(width, height),
        estimated: estimated.raster_area(width, height),
        common,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// `R = A_c / A_a`, `P = A_c / A_e`, `F1 = 2RP / (R + P)`.
pub fn pupil_prf(o: &Overlap) -> Result<Prf> {
    if o.annotated == 0 {
        return Err(Error::DegenerateAnnotation);
    }
    let recall = o.common as f64 / o.annotated as f64;
    let precision = if o.estimated == 0 {
        0.0
    } else {
        o.common as f64 / o.estimated as f64
    };
    let f1 = if recall + precision == 0.0 {
        0.0
    } else {
        2.0 * recall * precision / (recall + precision)
    };
    Ok(Prf { precision, recall, f1 })
}

/// Component-wise mean of a set of rates.
pub fn mean_prf(items: &[Prf]) -> Result<Prf> {
    if items.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = items.len() as f64;
    Ok(Prf {
        precision: items.iter().map(|p| p.precision).sum::<f64>() / n,
        recall: items.iter().map(|p| p.recall).sum::<f64>() / n,
        f1: items.iter().map(|p| p.f1).sum::<f64>() / n,
    })
}

/// Agreement among annotators of one pupil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    /// Mean rates over all ordered annotator pairs.
    pub mean: Prf,
    /// Mean center and mean radius.
    pub consensus: Circle,
}

pub fn inter_annotator(circles: &[Circle], width: u32, height: u32) -> Result<Agreement> {
    if circles.len() < 2 {
        return Err(Error::TooFewAnnotators);
    }
    let mut pairs = Vec::with_capacity(circles.len() * (circles.len() - 1));
    for (i, a) in circles.iter().enumerate() {
        for (j, b) in circles.iter().enumerate() {
            if i != j {
                pairs.push(pupil_prf(&circle_overlap(a, b, width, height))?);
            }
        }
    }
    let n = circles.len() as f64;
    let consensus = Circle {
        cx: circles.iter().map(|c| c.cx).sum::<f64>() / n,
        cy: circles.iter().map(|c| c.cy).sum::<f64>() / n,
        r: circles.iter().map(|c| c.r).sum::<f64>() / n,
    };
    Ok(Agreement {
        mean: mean_prf(&pairs)?,
        consensus,
    })
}

/// `1 - |d_est - d_ann| / d_ann` for diameters (equivalently radii).
pub fn diameter_accuracy(estimated_r: f64, annotated_r: f64) -> Result<f64> {
    if annotated_r <= 0.0 {
        return Err(Error::DegenerateAnnotation);
    }
    Ok(1.0 - (estimated_r - annotated_r).abs() / annotated_r)
}

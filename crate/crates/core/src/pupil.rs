//! Pupil localization inside a detected iris.
//!
//! For each candidate center, one pass over the surrounding disk bins luma by
//! rounded distance. A candidate radius `k` then scores the mean of ring `k + 1`
//! minus the mean of ring `k`: a dark pupil edge gives a large positive jump.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{Frame, Side};
use crate::iris::IrisEstimate;
use crate::num::{round_half_up, round_sqrt};

/// Luma sums and counts per rounded distance from a center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialProfile {
    pub cx: u32,
    pub cy: u32,
    pub ring_sum: Vec<u64>,
    pub ring_count: Vec<u32>,
}

impl RadialProfile {
    pub fn k_max(&self) -> u32 {
        self.ring_sum.len() as u32 - 1
    }

    pub fn ring_mean(&self, k: u32) -> Option<f64> {
        let k = k as usize;
        match self.ring_count.get(k) {
            Some(&n) if n > 0 => Some(self.ring_sum[k] as f64 / n as f64),
            _ => None,
        }
    }
}

/// Profile over all pixels with `round(d) <= k_max` around `(cx, cy)`.
pub fn radial_profile(frame: &Frame, cx: u32, cy: u32, k_max: u32) -> Result<RadialProfile> {
    let luma = &frame.luma;
    if !luma.contains_box(cx as i64, cy as i64, k_max as i64, k_max as i64) {
        return Err(Error::OutOfBounds);
    }
    let n = k_max as usize + 1;
    let mut ring_sum = vec![0u64; n];
    let mut ring_count = vec![0u32; n];
    let km = k_max as i64;
    for dy in -km..=km {
        let row = luma.row((cy as i64 + dy) as u32);
        for dx in -km..=km {
            let k = round_sqrt((dx * dx + dy * dy) as u64) as usize;
            if k < n {
                ring_sum[k] += row[(cx as i64 + dx) as usize] as u64;
                ring_count[k] += 1;
            }
        }
    }
    Ok(RadialProfile {
        cx,
        cy,
        ring_sum,
        ring_count,
    })
}

/// Outer-ring mean minus perimeter-ring mean for candidate radius `k`.
pub fn gradient_score(profile: &RadialProfile, k: u32) -> Result<f64> {
    let inner = profile.ring_mean(k).ok_or(Error::EmptyRing(k))?;
    let outer = profile.ring_mean(k + 1).ok_or(Error::EmptyRing(k + 1))?;
    Ok(outer - inner)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PupilEstimate {
    pub px: u32,
    pub py: u32,
    pub pr: u32,
    pub g: f64,
    pub side: Side,
}

/// Default half-width of the pupil center search window: `max(1, round(er / 4))`.
pub fn default_neighborhood(er: u32) -> u32 {
    (round_half_up(er as f64 / 4.0) as u32).max(1)
}

/// Largest candidate pupil radius for a centered pupil in an iris of mask radius `er`.
pub fn max_pupil_radius(er: u32) -> u32 {
    max_pupil_radius_at(er, 0, 0)
}

/// Largest pupil radius whose comparison ring stays inside the iris when the
/// pupil center is offset by `(dx, dy)` from the iris center.
///
/// The iris disk spans pixel distances up to `er - 1` and ring `k + 1` reaches
/// `k + 1.5` from the pupil center, so `k + 2.5 + |offset| <= er`.
pub fn max_pupil_radius_at(er: u32, dx: i64, dy: i64) -> u32 {
    let off = libm::sqrt((dx * dx + dy * dy) as f64);
    let k = libm::floor(er as f64 - 2.5 - off);
    if k < 0.0 {
        0
    } else {
        k as u32
    }
}

/// Best pupil circle with center within `neighborhood` of the iris center whose
/// comparison ring lies inside the iris (see [`max_pupil_radius_at`]).
///
/// Ties go to the smaller radius, then to the earlier center in raster order.
pub fn detect_pupil(frame: &Frame, iris: &IrisEstimate, neighborhood: u32) -> Result<PupilEstimate> {
    let k_hi = max_pupil_radius(iris.er);
    if k_hi < 1 {
        return Err(Error::NoPupilContrast);
    }
    let n = neighborhood as i64;
    let mut best: Option<PupilEstimate> = None;
    let mut any_center = false;
    for dy in -n..=n {
        for dx in -n..=n {
            let (px, py) = (iris.ex as i64 + dx, iris.ey as i64 + dy);
            if px < 0 || py < 0 {
                continue;
            }
            let k_top = max_pupil_radius_at(iris.er, dx, dy);
            if k_top < 1 {
                continue;
            }
            let profile = match radial_profile(frame, px as u32, py as u32, k_top + 1) {
                Ok(p) => p,
                Err(_) => continue,
            };
            any_center = true;
            for k in 1..=k_top {
                let g = gradient_score(&profile, k)?;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        g > b.g || (g == b.g && (k, py as u32, px as u32) < (b.pr, b.py, b.px))
                    }
                };
                if better {
                    best = Some(PupilEstimate {
                        px: px as u32,
                        py: py as u32,
                        pr: k,
                        g,
                        side: iris.side,
                    });
                }
            }
        }
    }
    if !any_center {
        return Err(Error::OutOfBounds);
    }
    match best {
        Some(b) if b.g > 0.0 => Ok(b),
        _ => Err(Error::NoPupilContrast),
    }
}

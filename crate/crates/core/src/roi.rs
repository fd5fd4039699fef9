//! Rough eye regions derived from annotated eye centers.
//!
//! Stands in for an upstream face/eye detector: boxes are centered on the
//! annotated centers, optionally displaced by seeded uniform jitter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{EyeRegion, Side, MIN_REGION_SIDE};
use crate::metrics::EyeAnnotation;
use crate::num::round_half_up;

/// Box side as a fraction of the inter-ocular distance.
pub const BOX_FRACTION: f64 = 0.8;
/// Jitter amplitude as a fraction of the inter-ocular distance.
pub const JITTER_FRACTION: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoiMode {
    Centered,
    /// Centers displaced by a uniform integer offset in `±round(0.15 d_lr)` per axis.
    /// The generator is keyed by `(seed, sample)` so results do not depend on
    /// processing order.
    Jittered { seed: u64 },
}

/// Regions for both eyes of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoiPair {
    pub left: EyeRegion,
    pub right: EyeRegion,
    /// At least one box had to be clipped to the frame.
    pub clipped: bool,
}

fn square_box(cx: f64, cy: f64, side: u32, eye: Side, width: u32, height: u32) -> Result<(EyeRegion, bool)> {
    let half = (side / 2) as i64;
    let x0 = round_half_up(cx) as i64 - half;
    let y0 = round_half_up(cy) as i64 - half;
    let (x1, y1) = (x0 + side as i64, y0 + side as i64);
    let (cx0, cy0) = (x0.max(0), y0.max(0));
    let (cx1, cy1) = (x1.min(width as i64), y1.min(height as i64));
    let clipped = (cx0, cy0, cx1, cy1) != (x0, y0, x1, y1);
    if cx1 - cx0 < MIN_REGION_SIDE as i64 || cy1 - cy0 < MIN_REGION_SIDE as i64 {
        return Err(Error::InvalidRegion);
    }
    Ok((
        EyeRegion {
            x: cx0 as u32,
            y: cy0 as u32,
            w: (cx1 - cx0) as u32,
            h: (cy1 - cy0) as u32,
            side: eye,
        },
        clipped,
    ))
}

/// Eye boxes of side `round(0.8 d_lr) + 2 pad`, clipped to the frame.
pub fn roi_provider(
    ann: &EyeAnnotation,
    mode: RoiMode,
    pad: u32,
    sample: u64,
    width: u32,
    height: u32,
) -> Result<RoiPair> {
    let d_lr = ann.d_lr();
    if d_lr <= 0.0 {
        return Err(Error::MalformedAnnotation);
    }
    let side = round_half_up(BOX_FRACTION * d_lr) as u32 + 2 * pad;
    let (mut l, mut r) = ((ann.lx, ann.ly), (ann.rx, ann.ry));
    if let RoiMode::Jittered { seed } = mode {
        let amp = round_half_up(JITTER_FRACTION * d_lr) as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample);
        let mut off = || rng.random_range(-amp..=amp) as f64;
        l = (l.0 + off(), l.1 + off());
        r = (r.0 + off(), r.1 + off());
    }
    let (left, cl) = square_box(l.0, l.1, side, Side::Left, width, height)?;
    let (right, cr) = square_box(r.0, r.1, side, Side::Right, width, height)?;
    Ok(RoiPair {
        left,
        right,
        clipped: cl || cr,
    })
}

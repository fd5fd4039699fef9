//! Ground-truthed synthetic eye images.
//!
//! Geometry conventions match the detectors:
//!
//! * an iris of radius `r` covers the pixels at distance `<= r - 1` from its
//!   center, exactly the iris region of the radius-`r` mask;
//! * a pupil of radius `p` covers the pixels whose rounded distance is `<= p`,
//!   so ring `p` is its perimeter and ring `p + 1` the first iris ring;
//! * the sclera is the filled ellipse with the given semi-axes.
//!
//! Images are rendered in RGB so they survive a PNG round trip; Gaussian noise is
//! added identically to the three channels, which perturbs luma and leaves the
//! V plane untouched.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::{to_luma_satv, Frame};
use crate::num::round_half_up;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Clean,
    Noisy,
}

impl Preset {
    pub fn sigma(self) -> f64 {
        match self {
            Preset::Clean => 0.0,
            Preset::Noisy => 8.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Clean => "clean",
            Preset::Noisy => "noisy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "clean" => Some(Preset::Clean),
            "noisy" => Some(Preset::Noisy),
            _ => None,
        }
    }
}

/// Region color as target luma and V-plane value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tone {
    pub luma: u8,
    pub satv: u8,
}

/// Specular highlight: filled disk of `radius` (0 = single pixel) at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Highlight {
    pub x: u32,
    pub y: u32,
    pub radius: u32,
    pub intensity: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthEyeSpec {
    pub width: u32,
    pub height: u32,
    pub skin: Tone,
    pub sclera: Tone,
    /// Sclera ellipse semi-axes (horizontal, vertical).
    pub sclera_axes: (f64, f64),
    pub iris_center: (u32, u32),
    pub iris_radius: u32,
    pub iris: Tone,
    pub pupil_radius: u32,
    pub pupil_luma: u8,
    pub highlights: Vec<Highlight>,
    pub preset: Preset,
}

impl SynthEyeSpec {
    /// Checks the geometric invariants: pupil inside iris, iris inside the
    /// sclera ellipse, everything inside the image.
    pub fn validate(&self) -> Result<()> {
        let r_disk = self.iris_radius.checked_sub(1).ok_or(Error::InvalidSpec)? as f64;
        let (a, b) = self.sclera_axes;
        let (cx, cy) = self.iris_center;
        let ok = self.pupil_radius >= 1
            && self.pupil_radius < self.iris_radius
            && r_disk <= a
            && r_disk <= b
            && a >= 1.0
            && b >= 1.0
            && cx as f64 - a >= 0.0
            && cy as f64 - b >= 0.0
            && cx as f64 + a < self.width as f64
            && cy as f64 + b < self.height as f64
            && self.highlights.iter().all(|h| h.x < self.width && h.y < self.height);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec)
        }
    }

    /// Random, valid eye of the given size. Iris radius is drawn from `radii`.
    pub fn random<R: Rng>(rng: &mut R, width: u32, height: u32, radii: (u32, u32), preset: Preset) -> Self {
        let iris_radius = rng.random_range(radii.0..=radii.1);
        let disk = (iris_radius - 1) as f64;
        let a = disk * rng.random_range(2.0..2.6);
        let b = disk + rng.random_range(0.0..1.5);
        let jx = (width / 16).max(1) as i64;
        let jy = (height / 16).max(1) as i64;
        let cx = (width / 2) as i64 + rng.random_range(-jx..=jx);
        let cy = (height / 2) as i64 + rng.random_range(-jy..=jy);
        let iris_luma = rng.random_range(45..=100u8);
        let p_hi = iris_radius.saturating_sub(3).max(1);
        let pupil_radius = rng.random_range(p_hi.min(2)..=p_hi);
        Self {
            width,
            height,
            skin: Tone {
                luma: rng.random_range(110..=170),
                satv: rng.random_range(140..=165),
            },
            sclera: Tone {
                luma: rng.random_range(195..=240),
                satv: rng.random_range(126..=132),
            },
            sclera_axes: (a, b),
            iris_center: (cx as u32, cy as u32),
            iris_radius,
            iris: Tone {
                luma: iris_luma,
                satv: rng.random_range(132..=155),
            },
            pupil_radius,
            pupil_luma: rng.random_range(5..=iris_luma - 30),
            highlights: Vec::new(),
            preset,
        }
    }
}

impl SynthEyeSpec {
    /// Adds a single saturated pixel at a random position strictly inside the pupil,
    /// i.e. at rounded distance at most `pupil_radius - 1` from its center.
    pub fn add_pupil_highlight<R: Rng>(&mut self, rng: &mut R) {
        let p = self.pupil_radius as i64 - 1;
        let lim = (2 * p + 1).pow(2);
        let (dx, dy) = loop {
            let (dx, dy) = (rng.random_range(-p..=p), rng.random_range(-p..=p));
            if 4 * (dx * dx + dy * dy) < lim {
                break (dx, dy);
            }
        };
        self.highlights.push(Highlight {
            x: (self.iris_center.0 as i64 + dx) as u32,
            y: (self.iris_center.1 as i64 + dy) as u32,
            radius: 0,
            intensity: 255,
        });
    }
}

/// Exact geometry of a rendered eye.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EyeTruth {
    pub iris_x: u32,
    pub iris_y: u32,
    pub iris_r: u32,
    pub pupil_x: u32,
    pub pupil_y: u32,
    pub pupil_r: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthImage {
    pub width: u32,
    pub height: u32,
    /// Interleaved RGB.
    pub rgb: Vec<u8>,
    pub frame: Frame,
}

/// Some RGB color whose conversion gives `tone`, or the nearest one found.
pub fn rgb_for_tone(tone: Tone) -> [u8; 3] {
    let y = tone.luma as f64;
    let v = tone.satv as f64 - 128.0;
    let r0 = y + v / 0.713;
    let b0 = y;
    let g0 = (y - 0.299 * r0 - 0.114 * b0) / 0.587;
    let mut best = ([0u8; 3], i32::MAX);
    for dr in -4i32..=4 {
        for dg in -4i32..=4 {
            for db in -4i32..=4 {
                let c = |base: f64, d: i32| (round_half_up(base) as i32 + d).clamp(0, 255) as u8;
                let rgb = [c(r0, dr), c(g0, dg), c(b0, db)];
                let (ly, lv) = to_luma_satv(rgb[0], rgb[1], rgb[2]);
                let err = (ly as i32 - tone.luma as i32).abs() + (lv as i32 - tone.satv as i32).abs();
                if err < best.1 {
                    best = (rgb, err);
                }
            }
        }
    }
    best.0
}

/// Renders the eye; noise is drawn from a generator seeded with `seed`.
pub fn synth_eye(spec: &SynthEyeSpec, seed: u64) -> Result<(SynthImage, EyeTruth)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let skin = rgb_for_tone(spec.skin);
    let sclera = rgb_for_tone(spec.sclera);
    let iris = rgb_for_tone(spec.iris);
    // pupil chroma fades with its luma
    let chroma = (spec.iris.satv as f64 - 128.0) * spec.pupil_luma as f64 / spec.iris.luma.max(1) as f64;
    let pupil = rgb_for_tone(Tone {
        luma: spec.pupil_luma,
        satv: round_half_up(128.0 + chroma).clamp(0.0, 255.0) as u8,
    });
    let (cx, cy) = (spec.iris_center.0 as i64, spec.iris_center.1 as i64);
    let (a, b) = spec.sclera_axes;
    let iris_d2 = ((spec.iris_radius - 1) as i64).pow(2);
    // round(d) <= p  <=>  4 d^2 < (2p + 1)^2
    let pupil_lim = (2 * spec.pupil_radius as i64 + 1).pow(2);

    let mut rgb = Vec::with_capacity(3 * (w * h) as usize);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let (dx, dy) = (x - cx, y - cy);
            let d2 = dx * dx + dy * dy;
            let (ex, ey) = (dx as f64 / a, dy as f64 / b);
            let color = if 4 * d2 < pupil_lim {
                pupil
            } else if d2 <= iris_d2 {
                iris
            } else if ex * ex + ey * ey <= 1.0 {
                sclera
            } else {
                skin
            };
            rgb.extend_from_slice(&color);
        }
    }

    for hl in &spec.highlights {
        let rr = (hl.radius as i64).pow(2);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if (x - hl.x as i64).pow(2) + (y - hl.y as i64).pow(2) <= rr {
                    let i = 3 * (y as usize * w as usize + x as usize);
                    rgb[i..i + 3].fill(hl.intensity);
                }
            }
        }
    }

    let sigma = spec.preset.sigma();
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidSpec)?;
        for px in rgb.chunks_exact_mut(3) {
            let n = normal.sample(&mut rng);
            for c in px.iter_mut() {
                *c = round_half_up(*c as f64 + n).clamp(0.0, 255.0) as u8;
            }
        }
    }

    let frame = Frame::from_rgb(w, h, &rgb)?;
    let truth = EyeTruth {
        iris_x: spec.iris_center.0,
        iris_y: spec.iris_center.1,
        iris_r: spec.iris_radius,
        pupil_x: spec.iris_center.0,
        pupil_y: spec.iris_center.1,
        pupil_r: spec.pupil_radius,
    };
    Ok((
        SynthImage {
            width: w,
            height: h,
            rgb,
            frame,
        },
        truth,
    ))
}

/// Two eyes side by side: the left spec fills the left half of the image.
/// Truth coordinates are in the combined image.
pub fn synth_face(left: &SynthEyeSpec, right: &SynthEyeSpec, seed: u64) -> Result<(SynthImage, [EyeTruth; 2])> {
    if left.height != right.height {
        return Err(Error::InvalidSpec);
    }
    let (li, lt) = synth_eye(left, seed)?;
    let (ri, mut rt) = synth_eye(right, seed ^ 0x5DEE_CE66_D1CE_4E5B)?;
    let (w, h) = (left.width + right.width, left.height);
    let mut rgb = Vec::with_capacity(3 * (w * h) as usize);
    for y in 0..h as usize {
        let lw = 3 * left.width as usize;
        let rw = 3 * right.width as usize;
        rgb.extend_from_slice(&li.rgb[y * lw..(y + 1) * lw]);
        rgb.extend_from_slice(&ri.rgb[y * rw..(y + 1) * rw]);
    }
    rt.iris_x += left.width;
    rt.pupil_x += left.width;
    let frame = Frame::from_rgb(w, h, &rgb)?;
    Ok((SynthImage { width: w, height: h, rgb, frame }, [lt, rt]))
}

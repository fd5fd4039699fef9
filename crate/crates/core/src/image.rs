//! Planar 8-bit channels, frames and mirrored region views.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Neutral V-plane value. Achromatic pixels map here.
pub const NEUTRAL_SATV: u8 = 128;

/// Smallest eye region side able to host the r=2 mask (3x15 grid) with margin.
pub const MIN_REGION_SIDE: u32 = 15;

/// A single 8-bit image plane stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Channel {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Channel {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if data.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }

    /// Builds a channel by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Pixel at `(x, y)`. Panics when out of range.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        let w = self.width as usize;
        self.data[y as usize * w + x as usize] = value;
    }

    /// Row `y` as a slice.
    #[inline]
    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.data[start..start + w]
    }

    /// Whether the rectangle `[cx-hw, cx+hw] x [cy-hh, cy+hh]` lies inside the channel.
    #[inline]
    pub fn contains_box(&self, cx: i64, cy: i64, half_w: i64, half_h: i64) -> bool {
        cx - half_w >= 0
            && cy - half_h >= 0
            && cx + half_w < self.width as i64
            && cy + half_h < self.height as i64
    }

    /// A view centered on `(cx, cy)` that can host a grid of the given half-extents.
    pub fn region_view(&self, cx: u32, cy: u32, half_w: u32, half_h: u32) -> Result<RegionView<'_>> {
        if !self.contains_box(cx as i64, cy as i64, half_w as i64, half_h as i64) {
            return Err(Error::OutOfBounds);
        }
        Ok(RegionView {
            channel: self,
            cx,
            cy,
            half_w,
            half_h,
        })
    }
}

/// Window onto a channel addressed by offsets from a center pixel.
///
/// Direct access at `(dx, dy)` reads `(cx + dx, cy + dy)`; mirrored access reads
/// `(cx - dx, cy + dy)`, i.e. the horizontally flipped region.
#[derive(Debug, Clone, Copy)]
pub struct RegionView<'a> {
    channel: &'a Channel,
    cx: u32,
    cy: u32,
    half_w: u32,
    half_h: u32,
}

impl<'a> RegionView<'a> {
    #[inline]
    pub fn center(&self) -> (u32, u32) {
        (self.cx, self.cy)
    }

    #[inline]
    pub fn half_extents(&self) -> (u32, u32) {
        (self.half_w, self.half_h)
    }

    #[inline]
    fn in_range(&self, dx: i32, dy: i32) -> bool {
        dx.unsigned_abs() <= self.half_w && dy.unsigned_abs() <= self.half_h
    }

    /// Pixel at offset `(dx, dy)`; `None` outside the half-extents.
    #[inline]
    pub fn get(&self, dx: i32, dy: i32) -> Option<u8> {
        if !self.in_range(dx, dy) {
            return None;
        }
        let x = (self.cx as i64 + dx as i64) as u32;
        let y = (self.cy as i64 + dy as i64) as u32;
        Some(self.channel.get(x, y))
    }

    /// Pixel of the horizontally flipped region at `(dx, dy)`.
    #[inline]
    pub fn mirrored(&self, dx: i32, dy: i32) -> Option<u8> {
        self.get(-dx, dy)
    }
}

/// Left or right eye, from the subject's point of view as annotated in the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "left" | "l" | "L" => Some(Side::Left),
            "right" | "r" | "R" => Some(Side::Right),
            _ => None,
        }
    }
}

/// Rough bounding box of one eye.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EyeRegion {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub side: Side,
}

impl EyeRegion {
    /// Checks the minimum size and that the box lies inside a `width x height` frame.
    pub fn validate(&self, width: u32, height: u32) -> Result<()> {
        if self.w < MIN_REGION_SIDE || self.h < MIN_REGION_SIDE {
            return Err(Error::InvalidRegion);
        }
        if self.x as u64 + self.w as u64 > width as u64 || self.y as u64 + self.h as u64 > height as u64 {
            return Err(Error::InvalidRegion);
        }
        Ok(())
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && y >= self.y && x < self.x + self.w && y < self.y + self.h
    }

    pub fn center(&self) -> (u32, u32) {
        (self.x + self.w / 2, self.y + self.h / 2)
    }
}

/// Converts an RGB pixel to `(luma, satv)` with full-range BT.601 weights.
///
/// Evaluated in exact fixed point and rounded half-up before clamping, so the
/// result is reproducible bit for bit.
#[inline]
pub fn to_luma_satv(r: u8, g: u8, b: u8) -> (u8, u8) {
    let (r, g, b) = (r as i64, g as i64, b as i64);
    let y = (299 * r + 587 * g + 114 * b + 500) / 1000;
    let v = (500_000 * r - 418_688 * g - 81_312 * b + 128_000_000 + 500_000).div_euclid(1_000_000);
    (y.clamp(0, 255) as u8, v.clamp(0, 255) as u8)
}

/// Decoded image with luminance and saturation-proxy channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pub luma: Channel,
    pub satv: Channel,
    pub frame_index: u64,
}

impl Frame {
    pub fn new(luma: Channel, satv: Channel, frame_index: u64) -> Result<Self> {
        if luma.width() != satv.width() || luma.height() != satv.height() {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self { luma, satv, frame_index })
    }

    /// Grayscale frame; the V plane is neutral everywhere.
    pub fn from_gray(luma: Channel) -> Self {
        let satv = Channel::filled(luma.width(), luma.height(), NEUTRAL_SATV);
        Self {
            luma,
            satv,
            frame_index: 0,
        }
    }

    /// Frame from interleaved 8-bit RGB.
    pub fn from_rgb(width: u32, height: u32, rgb: &[u8]) -> Result<Self> {
        let n = width as usize * height as usize;
        if rgb.len() != 3 * n {
            return Err(Error::DimensionMismatch);
        }
        let mut luma = Vec::with_capacity(n);
        let mut satv = Vec::with_capacity(n);
        for px in rgb.chunks_exact(3) {
            let (y, v) = to_luma_satv(px[0], px[1], px[2]);
            luma.push(y);
            satv.push(v);
        }
        Ok(Self {
            luma: Channel { width, height, data: luma },
            satv: Channel { width, height, data: satv },
            frame_index: 0,
        })
    }

    pub fn with_index(mut self, frame_index: u64) -> Self {
        self.frame_index = frame_index;
        self
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.luma.width()
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.luma.height()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_examples() {
        assert_eq!(to_luma_satv(128, 128, 128), (128, 128));
        assert_eq!(to_luma_satv(255, 255, 255), (255, 128));
        assert_eq!(to_luma_satv(0, 0, 0), (0, 128));
        assert_eq!(to_luma_satv(255, 0, 0), (76, 255));
        // 0.114*255 = 29.07; 128 - 0.081312*255 = 107.27
        assert_eq!(to_luma_satv(0, 0, 255), (29, 107));
    }

    #[test]
    fn conversion_matches_float_reference_away_from_ties() {
        for r in (0..=255u32).step_by(5) {
            for g in (0..=255u32).step_by(7) {
                for b in (0..=255u32).step_by(11) {
                    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
                    let y = 0.299 * rf + 0.587 * gf + 0.114 * bf;
                    let v = 0.5 * rf - 0.418688 * gf - 0.081312 * bf + 128.0;
                    let (ly, lv) = to_luma_satv(r as u8, g as u8, b as u8);
                    if (y - y.floor() - 0.5).abs() > 1e-6 {
                        assert_eq!(ly as f64, libm::floor(y + 0.5).clamp(0.0, 255.0));
                    }
                    if (v - v.floor() - 0.5).abs() > 1e-6 {
                        assert_eq!(lv as f64, libm::floor(v + 0.5).clamp(0.0, 255.0));
                    }
                }
            }
        }
    }

    #[test]
    fn rgb_frame_two_pixels() {
        let f = Frame::from_rgb(2, 1, &[255, 0, 0, 0, 0, 255]).unwrap();
        assert_eq!(f.luma.as_slice(), &[76, 29]);
        assert_eq!(f.satv.as_slice(), &[255, 107]);
    }

    #[test]
    fn gray_frame_is_neutral() {
        let f = Frame::from_rgb(3, 3, &[128; 27]).unwrap();
        assert!(f.luma.as_slice().iter().all(|&v| v == 128));
        assert!(f.satv.as_slice().iter().all(|&v| v == 128));
        let g = Frame::from_gray(Channel::filled(4, 2, 9));
        assert!(g.satv.as_slice().iter().all(|&v| v == NEUTRAL_SATV));
    }

    #[test]
    fn region_view_bounds() {
        let ch = Channel::from_fn(39, 15, |x, y| (x + 39 * y) as u8);
        let v = ch.region_view(19, 7, 19, 7).unwrap();
        assert_eq!(v.get(-19, -7), Some(ch.get(0, 0)));
        assert_eq!(v.get(19, 7), Some(ch.get(38, 14)));
        assert_eq!(ch.region_view(18, 7, 19, 7).unwrap_err(), Error::OutOfBounds);
        assert_eq!(ch.region_view(19, 8, 19, 7).unwrap_err(), Error::OutOfBounds);
    }

    #[test]
    fn mirrored_access() {
        let ch = Channel::from_fn(39, 15, |x, y| (x * 3 + y) as u8);
        let v = ch.region_view(19, 7, 19, 7).unwrap();
        assert_eq!(v.get(3, 2), Some(ch.get(22, 9)));
        assert_eq!(v.mirrored(3, 2), Some(ch.get(16, 9)));
        assert_eq!(v.get(20, 0), None);
    }

    #[test]
    fn dimension_checks() {
        assert_eq!(Channel::new(2, 2, vec![0; 3]).unwrap_err(), Error::DimensionMismatch);
        assert!(Frame::new(Channel::filled(2, 2, 0), Channel::filled(2, 3, 0), 0).is_err());
        let r = EyeRegion { x: 0, y: 0, w: 14, h: 20, side: Side::Left };
        assert_eq!(r.validate(100, 100), Err(Error::InvalidRegion));
        let r = EyeRegion { x: 90, y: 0, w: 15, h: 15, side: Side::Left };
        assert_eq!(r.validate(100, 100), Err(Error::InvalidRegion));
        let r = EyeRegion { x: 85, y: 85, w: 15, h: 15, side: Side::Right };
        assert!(r.validate(100, 100).is_ok());
    }
}

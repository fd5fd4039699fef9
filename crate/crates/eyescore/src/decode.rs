//! Raster decoding into luma and V-plane channels.

use std::path::Path;

use eyescore_core::{Channel, Frame};
use image::{DynamicImage, ImageFormat, ImageReader};

use crate::error::{AppError, AppResult};

const SUPPORTED: [ImageFormat; 3] = [ImageFormat::Pnm, ImageFormat::Png, ImageFormat::Bmp];

/// Decodes a PGM (P5), PNG or BMP file. Grayscale images get a neutral V plane.
pub fn load_frame(path: &Path) -> AppResult<Frame> {
    let bytes = std::fs::read(path).map_err(|e| AppError::unreadable(path, e))?;
    decode_frame(&bytes, path)
}

/// Decodes in-memory file contents; `path` is only used for messages.
pub fn decode_frame(bytes: &[u8], path: &Path) -> AppResult<Frame> {
    let reader = ImageReader::new(std::io::Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| AppError::unreadable(path, e))?;
    match reader.format() {
        Some(f) if SUPPORTED.contains(&f) => {}
        _ => return Err(AppError::UnsupportedFormat(path.to_path_buf())),
    }
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::Unsupported(_) => AppError::UnsupportedFormat(path.to_path_buf()),
        other => AppError::unreadable(path, other),
    })?;
    from_dynamic(img, path)
}

fn from_dynamic(img: DynamicImage, path: &Path) -> AppResult<Frame> {
    let (w, h) = (img.width(), img.height());
    let frame = if img.color().has_color() {
        let rgb = img.into_rgb8();
        Frame::from_rgb(w, h, rgb.as_raw())
    } else {
        let gray = img.into_luma8();
        Channel::new(w, h, gray.into_raw()).map(Frame::from_gray)
    };
    frame.map_err(|e| AppError::unreadable(path, e))
}

/// Writes interleaved RGB as PNG.
pub fn write_png(path: &Path, width: u32, height: u32, rgb: &[u8]) -> AppResult<()> {
    image::save_buffer_with_format(path, rgb, width, height, image::ExtendedColorType::Rgb8, ImageFormat::Png)
        .map_err(|e| AppError::io(path, e))
}

/// Whether the extension names a format [`load_frame`] accepts.
pub fn is_image_path(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref(),
        Some("pgm" | "ppm" | "pnm" | "png" | "bmp")
    )
}

//! PNG / JPEG decoding into [`Image`] and 16-bit PNG encoding.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, Rgb};
use thiserror::Error;

use super::Image;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

/// Decode an 8- or 16-bit PNG, or a JPEG, to normalized floats. Alpha is dropped.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image, ImageIoError> {
    let path = path.as_ref();
    let decoded =
        image::open(path).map_err(|source| ImageIoError::Read { path: path.display().to_string(), source })?;
    Ok(from_dynamic(&decoded))
}

pub fn from_dynamic(img: &DynamicImage) -> Image {
    let rgb = img.to_rgb32f();
    let (w, h) = rgb.dimensions();
    Image::new(w as usize, h as usize, rgb.into_raw()).expect("decoder yields a full RGB buffer")
}

/// Quantize to 16 bits per channel.
pub fn to_rgb16(img: &Image) -> ImageBuffer<Rgb<u16>, Vec<u16>> {
    let raw: Vec<u16> = img.data().iter().map(|&v| (v as f64 * 65535.0).round() as u16).collect();
    ImageBuffer::from_raw(img.width() as u32, img.height() as u32, raw).expect("buffer length matches dimensions")
}

/// Write a 16-bit RGB PNG.
pub fn write_png16(path: impl AsRef<Path>, img: &Image) -> Result<(), ImageIoError> {
    let path = path.as_ref();
    to_rgb16(img)
        .save_with_format(path, ImageFormat::Png)
        .map_err(|source| ImageIoError::Write { path: path.display().to_string(), source })
}

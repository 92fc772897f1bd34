//! PNG helpers: 16-bit grayscale images in [0,1], 8-bit boolean masks,
//! and 8-bit RGB for visualizations.

use std::path::Path;

use dscv_core::ImageGrid;
use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use crate::error::{CliError, FormatError, Result};

fn image_err(path: &Path, source: image::ImageError) -> CliError {
    FormatError::Image {
        path: path.display().to_string(),
        source,
    }
    .into()
}

/// Writes a single-channel grid as 16-bit grayscale; values are clamped
/// to [0,1] and quantized to 65535 levels.
pub fn write_gray16(path: &Path, img: &ImageGrid) -> Result<()> {
    if img.channels() != 1 {
        return Err(CliError::Validation(
            "PNG image output supports single-channel grids only".into(),
        ));
    }
    let (h, w) = (img.height(), img.width());
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
        let v = img.get(y as usize, x as usize, 0).clamp(0.0, 1.0);
        Luma([(v * 65535.0).round() as u16])
    });
    buf.save(path).map_err(|e| image_err(path, e))
}

/// Reads any grayscale-convertible PNG into a [0,1] single-channel grid.
pub fn read_gray(path: &Path) -> Result<ImageGrid> {
    let dynimg = image::open(path).map_err(|e| image_err(path, e))?;
    let lum = match dynimg {
        DynamicImage::ImageLuma16(img) => img,
        other => other.to_luma16(),
    };
    let (w, h) = (lum.width() as usize, lum.height() as usize);
    let mut out = ImageGrid::new(h, w, 1);
    for y in 0..h {
        for x in 0..w {
            out.set(y, x, 0, lum.get_pixel(x as u32, y as u32)[0] as f32 / 65535.0);
        }
    }
    Ok(out)
}

pub fn write_mask(path: &Path, mask: &[bool], h: usize, w: usize) -> Result<()> {
    assert_eq!(mask.len(), h * w);
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
        Luma([if mask[y as usize * w + x as usize] { 255 } else { 0 }])
    });
    buf.save(path).map_err(|e| image_err(path, e))
}

/// Reads a mask PNG; any pixel brighter than mid-gray counts as set.
pub fn read_mask(path: &Path) -> Result<(usize, usize, Vec<bool>)> {
    let lum = image::open(path).map_err(|e| image_err(path, e))?.to_luma8();
    let (w, h) = (lum.width() as usize, lum.height() as usize);
    let mask = (0..h * w)
        .map(|i| lum.get_pixel((i % w) as u32, (i / w) as u32)[0] > 127)
        .collect();
    Ok((h, w, mask))
}

pub fn write_rgb8(path: &Path, h: usize, w: usize, data: Vec<u8>) -> Result<()> {
    assert_eq!(data.len(), 3 * h * w);
    let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_vec(w as u32, h as u32, data).unwrap();
    buf.save(path).map_err(|e| image_err(path, e))
}

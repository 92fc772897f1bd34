//! PFM (portable float map) IO, grayscale "Pf" only. Header is three
//! whitespace-terminated tokens (magic, "w h", scale); a negative scale
//! marks little-endian payload; rows are stored bottom-up. The scale
//! magnitude (a units factor) is ignored on read; files are always
//! written little-endian with scale -1.0.

use std::fs;
use std::path::Path;

use dscv_core::ImageGrid;

use crate::error::{CliError, FormatError, Result};

const MAX_DIM: usize = 1 << 20;

pub fn write_pfm(path: &Path, img: &ImageGrid) -> Result<()> {
    if img.channels() != 1 {
        return Err(CliError::Validation(
            "PFM output supports single-channel maps only".into(),
        ));
    }
    let (h, w) = (img.height(), img.width());
    let mut buf = format!("Pf\n{} {}\n-1.0\n", w, h).into_bytes();
    buf.reserve(4 * h * w);
    for y in (0..h).rev() {
        for x in 0..w {
            buf.extend_from_slice(&img.get(y, x, 0).to_le_bytes());
        }
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// Reads one whitespace-delimited ASCII token starting at `pos`;
/// returns the token and the index one past its terminating whitespace.
fn token(bytes: &[u8], mut pos: usize) -> Option<(&str, usize)> {
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    let start = pos;
    while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    if start == pos || pos >= bytes.len() {
        return None;
    }
    let tok = core::str::from_utf8(&bytes[start..pos]).ok()?;
    Some((tok, pos + 1))
}

pub fn read_pfm(path: &Path) -> Result<ImageGrid> {
    let name = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let bad = || FormatError::BadHeader(name.clone());
    let (magic, pos) = token(&bytes, 0).ok_or_else(bad)?;
    if magic != "Pf" {
        return Err(bad().into());
    }
    let (w_tok, pos) = token(&bytes, pos).ok_or_else(bad)?;
    let (h_tok, pos) = token(&bytes, pos).ok_or_else(bad)?;
    let (scale_tok, pos) = token(&bytes, pos).ok_or_else(bad)?;
    let w: usize = w_tok.parse().map_err(|_| bad())?;
    let h: usize = h_tok.parse().map_err(|_| bad())?;
    let scale: f32 = scale_tok.parse().map_err(|_| bad())?;
    if w == 0 || h == 0 || w > MAX_DIM || h > MAX_DIM || scale == 0.0 {
        return Err(bad().into());
    }
    let payload = &bytes[pos..];
    if payload.len() != 4 * w * h {
        return Err(FormatError::TruncatedFile(name).into());
    }
    let little_endian = scale < 0.0;
    let mut img = ImageGrid::new(h, w, 1);
    let mut i = 0;
    for y in (0..h).rev() {
        for x in 0..w {
            let raw: [u8; 4] = payload[i..i + 4].try_into().unwrap();
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            img.set(y, x, 0, v);
            i += 4;
        }
    }
    Ok(img)
}

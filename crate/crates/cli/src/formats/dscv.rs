//! Cost-volume container: magic "DSCV", u32 version (1), u32 N/H/W,
//! N f32 hypothesis depths, N*H*W f32 costs bin-major, then the validity
//! flags packed 8 per byte (LSB first). All little-endian.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use dscv_core::costvolume::{CostVolume, DepthHypothesisSet, Spacing};

use crate::error::{CliError, FormatError, Result};

pub const DSCV_VERSION: u32 = 1;

const MAX_DIM: u32 = 1 << 20;
const MAX_BINS: u32 = 1 << 16;

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

pub fn unpack_bits(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] & (1 << (i % 8)) != 0).collect()
}

/// The file stores only the depth values, so the spacing tag is
/// recovered by inspection: a uniform grid in depth reads back as
/// linear, anything else as inverse-linear.
fn infer_spacing(values: &[f64]) -> Spacing {
    let step = values[1] - values[0];
    let uniform = values
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-4 * step.abs());
    if uniform {
        Spacing::Linear
    } else {
        Spacing::InverseLinear
    }
}

pub fn write_dscv(path: &Path, cv: &CostVolume) -> Result<()> {
    let (n, h, w) = (cv.bins(), cv.height(), cv.width());
    let mut buf = Vec::with_capacity(24 + 4 * n + 4 * n * h * w + n * h * w / 8);
    buf.extend_from_slice(b"DSCV");
    buf.write_u32::<LittleEndian>(DSCV_VERSION).unwrap();
    buf.write_u32::<LittleEndian>(n as u32).unwrap();
    buf.write_u32::<LittleEndian>(h as u32).unwrap();
    buf.write_u32::<LittleEndian>(w as u32).unwrap();
    for &d in cv.hypotheses().values() {
        buf.write_f32::<LittleEndian>(d as f32).unwrap();
    }
    for &c in cv.costs() {
        buf.write_f32::<LittleEndian>(c).unwrap();
    }
    buf.extend_from_slice(&pack_bits(cv.validity()));
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

pub fn read_dscv(path: &Path) -> Result<CostVolume> {
    let name = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.len() < 4 || &bytes[..4] != b"DSCV" {
        return Err(FormatError::BadMagic(name).into());
    }
    let mut cur = Cursor::new(&bytes[4..]);
    let trunc = || FormatError::TruncatedFile(name.clone());
    let version = cur.read_u32::<LittleEndian>().map_err(|_| trunc())?;
    if version != DSCV_VERSION {
        return Err(FormatError::VersionMismatch {
            path: name,
            expected: DSCV_VERSION,
            got: version,
        }
        .into());
    }
    let n = cur.read_u32::<LittleEndian>().map_err(|_| trunc())?;
    let h = cur.read_u32::<LittleEndian>().map_err(|_| trunc())?;
    let w = cur.read_u32::<LittleEndian>().map_err(|_| trunc())?;
    if n < 2 || n > MAX_BINS || h == 0 || w == 0 || h > MAX_DIM || w > MAX_DIM {
        return Err(FormatError::DimensionOverflow(name).into());
    }
    let (n, h, w) = (n as usize, h as usize, w as usize);
    let expected = 20 + 4 * n + 4 * n * h * w + (n * h * w).div_ceil(8);
    if bytes.len() != expected {
        return Err(FormatError::TruncatedFile(name).into());
    }
    let mut depths = Vec::with_capacity(n);
    for _ in 0..n {
        depths.push(cur.read_f32::<LittleEndian>().unwrap() as f64);
    }
    let mut costs = Vec::with_capacity(n * h * w);
    for _ in 0..n * h * w {
        costs.push(cur.read_f32::<LittleEndian>().unwrap());
    }
    let offset = 20 + 4 * n + 4 * n * h * w;
    let valid = unpack_bits(&bytes[offset..], n * h * w);
    let hyps = DepthHypothesisSet::from_values(depths.clone(), infer_spacing(&depths))?;
    Ok(CostVolume::from_parts(hyps, h, w, costs, valid))
}

//! Fusion-weight file: magic "DSFW", u32 version (1), u32 N, then the
//! N x 2N weight matrix row-major and N biases, all f32 little-endian.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use dscv_core::fusion::FusionWeights;

use crate::error::{CliError, FormatError, Result};

pub const DSFW_VERSION: u32 = 1;

const MAX_BINS: u32 = 1 << 16;

pub fn write_dsfw(path: &Path, weights: &FusionWeights) -> Result<()> {
    let n = weights.bins();
    let mut buf = Vec::with_capacity(12 + 4 * (2 * n * n + n));
    buf.extend_from_slice(b"DSFW");
    buf.write_u32::<LittleEndian>(DSFW_VERSION).unwrap();
    buf.write_u32::<LittleEndian>(n as u32).unwrap();
    for &v in weights.weights() {
        buf.write_f32::<LittleEndian>(v).unwrap();
    }
    for &b in weights.bias() {
        buf.write_f32::<LittleEndian>(b).unwrap();
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

pub fn read_dsfw(path: &Path) -> Result<FusionWeights> {
    let name = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.len() < 4 || &bytes[..4] != b"DSFW" {
        return Err(FormatError::BadMagic(name).into());
    }
    let mut cur = Cursor::new(&bytes[4..]);
    let trunc = || FormatError::TruncatedFile(name.clone());
    let version = cur.read_u32::<LittleEndian>().map_err(|_| trunc())?;
    if version != DSFW_VERSION {
        return Err(FormatError::VersionMismatch {
            path: name,
            expected: DSFW_VERSION,
            got: version,
        }
        .into());
    }
    let n = cur.read_u32::<LittleEndian>().map_err(|_| trunc())?;
    if n == 0 || n > MAX_BINS {
        return Err(FormatError::DimensionOverflow(name).into());
    }
    let n = n as usize;
    if bytes.len() != 12 + 4 * (2 * n * n + n) {
        return Err(FormatError::TruncatedFile(name).into());
    }
    let mut weights = Vec::with_capacity(2 * n * n);
    for _ in 0..2 * n * n {
        weights.push(cur.read_f32::<LittleEndian>().unwrap());
    }
    let mut bias = Vec::with_capacity(n);
    for _ in 0..n {
        bias.push(cur.read_f32::<LittleEndian>().unwrap());
    }
    Ok(FusionWeights::new(n, weights, bias)?)
}

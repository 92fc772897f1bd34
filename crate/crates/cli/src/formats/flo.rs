//! Middlebury .flo optical-flow interchange format: float magic
//! 202021.25, i32 width/height, then row-major interleaved (u, v) f32
//! pairs; everything little-endian.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use dscv_core::FlowField;

use crate::error::{CliError, FormatError, Result};

pub const FLO_MAGIC: f32 = 202021.25;
/// Written for invalid pixels; readers treat |value| > 1e9 as unknown.
pub const FLO_UNKNOWN: f32 = 1e10;

const MAX_DIM: i32 = 1 << 20;

pub fn write_flo(path: &Path, flow: &FlowField) -> Result<()> {
    let (h, w) = (flow.height(), flow.width());
    let mut buf = Vec::with_capacity(12 + 8 * h * w);
    buf.write_f32::<LittleEndian>(FLO_MAGIC).unwrap();
    buf.write_i32::<LittleEndian>(w as i32).unwrap();
    buf.write_i32::<LittleEndian>(h as i32).unwrap();
    for y in 0..h {
        for x in 0..w {
            let (u, v) = if flow.is_valid(y, x) {
                flow.get(y, x)
            } else {
                (FLO_UNKNOWN, FLO_UNKNOWN)
            };
            buf.write_f32::<LittleEndian>(u).unwrap();
            buf.write_f32::<LittleEndian>(v).unwrap();
        }
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

pub fn read_flo(path: &Path) -> Result<FlowField> {
    let name = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut cur = Cursor::new(&bytes);
    let trunc = || FormatError::TruncatedFile(name.clone());
    let magic = cur.read_f32::<LittleEndian>().map_err(|_| trunc())?;
    if magic != FLO_MAGIC {
        return Err(FormatError::BadMagic(name).into());
    }
    let w = cur.read_i32::<LittleEndian>().map_err(|_| trunc())?;
    let h = cur.read_i32::<LittleEndian>().map_err(|_| trunc())?;
    if w <= 0 || h <= 0 || w > MAX_DIM || h > MAX_DIM {
        return Err(FormatError::DimensionOverflow(name).into());
    }
    let (w, h) = (w as usize, h as usize);
    if bytes.len() != 12 + 8 * w * h {
        return Err(FormatError::TruncatedFile(name).into());
    }
    let mut flow = FlowField::zeros(h, w);
    for y in 0..h {
        for x in 0..w {
            let u = cur.read_f32::<LittleEndian>().unwrap();
            let v = cur.read_f32::<LittleEndian>().unwrap();
            if u.abs() > 1e9 || v.abs() > 1e9 || !u.is_finite() || !v.is_finite() {
                flow.set_valid(y, x, false);
            } else {
                flow.set(y, x, u, v);
            }
        }
    }
    Ok(flow)
}

//! Dense pixel grids: images, feature maps, depth maps and flow fields.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// H×W×C grid of scalars with a per-pixel validity mask.
///
/// Images, feature maps, depth maps and error maps all share this role.
/// Data is stored row-major, channel-interleaved, single precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<f32>,
    valid: Vec<bool>,
}

impl ImageGrid {
    pub fn new(h: usize, w: usize, c: usize) -> Self {
        assert!(h >= 1 && w >= 1 && c >= 1);
        ImageGrid {
            h,
            w,
            c,
            data: vec![0.0; h * w * c],
            valid: vec![true; h * w],
        }
    }

    pub fn from_vec(h: usize, w: usize, c: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), h * w * c);
        ImageGrid {
            h,
            w,
            c,
            data,
            valid: vec![true; h * w],
        }
    }

    pub fn filled(h: usize, w: usize, c: usize, value: f32) -> Self {
        Self::from_vec(h, w, c, vec![value; h * w * c])
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.h
    }
    #[inline]
    pub fn width(&self) -> usize {
        self.w
    }
    #[inline]
    pub fn channels(&self) -> usize {
        self.c
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, ch: usize) -> f32 {
        self.data[(y * self.w + x) * self.c + ch]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, ch: usize, v: f32) {
        self.data[(y * self.w + x) * self.c + ch] = v;
    }

    #[inline]
    pub fn is_valid(&self, y: usize, x: usize) -> bool {
        self.valid[y * self.w + x]
    }

    #[inline]
    pub fn set_valid(&mut self, y: usize, x: usize, v: bool) {
        self.valid[y * self.w + x] = v;
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn validity_mut(&mut self) -> &mut [bool] {
        &mut self.valid
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.h == other.h && self.w == other.w && self.c == other.c
    }

    pub fn check_same_shape(&self, other: &ImageGrid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: (self.h, self.w),
                got: (other.h, other.w),
            })
        }
    }
}

/// Per-pixel 2D displacement in pixels, with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    h: usize,
    w: usize,
    u: Vec<f32>,
    v: Vec<f32>,
    valid: Vec<bool>,
}

impl FlowField {
    pub fn zeros(h: usize, w: usize) -> Self {
        FlowField {
            h,
            w,
            u: vec![0.0; h * w],
            v: vec![0.0; h * w],
            valid: vec![true; h * w],
        }
    }

    pub fn from_parts(h: usize, w: usize, u: Vec<f32>, v: Vec<f32>, valid: Vec<bool>) -> Self {
        assert_eq!(u.len(), h * w);
        assert_eq!(v.len(), h * w);
        assert_eq!(valid.len(), h * w);
        FlowField { h, w, u, v, valid }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.h
    }
    #[inline]
    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> (f32, f32) {
        let i = y * self.w + x;
        (self.u[i], self.v[i])
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, u: f32, v: f32) {
        let i = y * self.w + x;
        self.u[i] = u;
        self.v[i] = v;
    }

    #[inline]
    pub fn is_valid(&self, y: usize, x: usize) -> bool {
        self.valid[y * self.w + x]
    }

    #[inline]
    pub fn set_valid(&mut self, y: usize, x: usize, v: bool) {
        self.valid[y * self.w + x] = v;
    }

    pub fn u(&self) -> &[f32] {
        &self.u
    }
    pub fn v(&self) -> &[f32] {
        &self.v
    }
    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn check_same_shape(&self, h: usize, w: usize) -> Result<()> {
        if self.h == h && self.w == w {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: (h, w),
                got: (self.h, self.w),
            })
        }
    }
}

/// H×W grids of continuous source coordinates, double precision.
///
/// Pixel centers sit at integer coordinates with the origin at the
/// top-left pixel center.
#[derive(Debug, Clone)]
pub struct SampleCoords {
    h: usize,
    w: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    valid: Vec<bool>,
}

impl SampleCoords {
    pub fn new(h: usize, w: usize) -> Self {
        SampleCoords {
            h,
            w,
            x: vec![0.0; h * w],
            y: vec![0.0; h * w],
            valid: vec![true; h * w],
        }
    }

    /// The identity grid: coords(y, x) = (x, y).
    pub fn identity(h: usize, w: usize) -> Self {
        let mut c = Self::new(h, w);
        for y in 0..h {
            for x in 0..w {
                c.set(y, x, x as f64, y as f64);
            }
        }
        c
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.h
    }
    #[inline]
    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> (f64, f64) {
        let i = y * self.w + x;
        (self.x[i], self.y[i])
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, sx: f64, sy: f64) {
        let i = y * self.w + x;
        self.x[i] = sx;
        self.y[i] = sy;
    }

    #[inline]
    pub fn is_valid(&self, y: usize, x: usize) -> bool {
        self.valid[y * self.w + x]
    }

    #[inline]
    pub fn set_valid(&mut self, y: usize, x: usize, v: bool) {
        self.valid[y * self.w + x] = v;
    }
}

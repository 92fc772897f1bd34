//! Depth-hypothesis sweeps: static and residual-flow-corrected cost
//! volumes, occlusion estimation and argmin depth extraction.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{reproject, CameraIntrinsics, PoseSE3};
use crate::grid::{FlowField, ImageGrid, SampleCoords};
use crate::photometric::cost_error;
use crate::sampler::bilinear_sample;

/// How hypothesis depths are distributed between the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Uniform in 1/depth; equalizes pixel-space parallax per bin.
    InverseLinear,
}

/// The predefined set of depth values swept during volume construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthHypothesisSet {
    values: Vec<f64>,
    spacing: Spacing,
}

impl DepthHypothesisSet {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rebuild from an explicit, strictly increasing depth list.
    pub fn from_values(values: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if values.len() < 2 || values[0] <= 0.0 {
            return Err(Error::InvalidRange);
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRange);
        }
        Ok(DepthHypothesisSet { values, spacing })
    }
}

/// Builds `n` hypothesis depths between `d_min` and `d_max`.
pub fn make_hypotheses(
    d_min: f64,
    d_max: f64,
    n: usize,
    spacing: Spacing,
) -> Result<DepthHypothesisSet> {
    if !(d_min > 0.0 && d_max > d_min) || n < 2 {
        return Err(Error::InvalidRange);
    }
    let mut values = Vec::with_capacity(n);
    match spacing {
        Spacing::Linear => {
            let step = (d_max - d_min) / (n - 1) as f64;
            for i in 0..n {
                values.push(d_min + step * i as f64);
            }
        }
        Spacing::InverseLinear => {
            let inv_min = 1.0 / d_min;
            let inv_max = 1.0 / d_max;
            let step = (inv_max - inv_min) / (n - 1) as f64;
            for i in 0..n {
                values.push(1.0 / (inv_min + step * i as f64));
            }
        }
    }
    values[0] = d_min;
    values[n - 1] = d_max;
    Ok(DepthHypothesisSet { values, spacing })
}

/// Bin-major N x H x W grid of matching costs; lower = better match.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume {
    hypotheses: DepthHypothesisSet,
    h: usize,
    w: usize,
    costs: Vec<f32>,
    valid: Vec<bool>,
}

impl CostVolume {
    pub fn from_parts(
        hypotheses: DepthHypothesisSet,
        h: usize,
        w: usize,
        costs: Vec<f32>,
        valid: Vec<bool>,
    ) -> Self {
        let n = hypotheses.len();
        assert_eq!(costs.len(), n * h * w);
        assert_eq!(valid.len(), n * h * w);
        CostVolume {
            hypotheses,
            h,
            w,
            costs,
            valid,
        }
    }

    /// Assembles a volume from per-bin cost planes, in bin order.
    pub fn from_planes(hypotheses: DepthHypothesisSet, planes: Vec<ImageGrid>) -> Self {
        assert_eq!(planes.len(), hypotheses.len());
        let (h, w) = (planes[0].height(), planes[0].width());
        let mut costs = Vec::with_capacity(hypotheses.len() * h * w);
        let mut valid = Vec::with_capacity(hypotheses.len() * h * w);
        for plane in &planes {
            assert_eq!((plane.height(), plane.width()), (h, w));
            costs.extend_from_slice(plane.data());
            valid.extend_from_slice(plane.validity());
        }
        CostVolume {
            hypotheses,
            h,
            w,
            costs,
            valid,
        }
    }

    pub fn hypotheses(&self) -> &DepthHypothesisSet {
        &self.hypotheses
    }

    pub fn bins(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn get(&self, bin: usize, y: usize, x: usize) -> f32 {
        self.costs[(bin * self.h + y) * self.w + x]
    }

    #[inline]
    pub fn is_valid(&self, bin: usize, y: usize, x: usize) -> bool {
        self.valid[(bin * self.h + y) * self.w + x]
    }

    #[inline]
    pub fn set(&mut self, bin: usize, y: usize, x: usize, cost: f32, valid: bool) {
        let i = (bin * self.h + y) * self.w + x;
        self.costs[i] = cost;
        self.valid[i] = valid;
    }

    pub fn costs(&self) -> &[f32] {
        &self.costs
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn same_layout(&self, other: &CostVolume) -> Result<()> {
        if self.h != other.h || self.w != other.w {
            return Err(Error::ShapeMismatch {
                expected: (self.h, self.w),
                got: (other.h, other.w),
            });
        }
        if self.hypotheses != other.hypotheses {
            return Err(Error::HypothesisMismatch);
        }
        Ok(())
    }
}

/// Per-pixel occlusion flags; true = occluded.
#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionMask {
    h: usize,
    w: usize,
    data: Vec<bool>,
}

impl OcclusionMask {
    pub fn new(h: usize, w: usize) -> Self {
        OcclusionMask {
            h,
            w,
            data: vec![false; h * w],
        }
    }

    pub fn from_vec(h: usize, w: usize, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), h * w);
        OcclusionMask { h, w, data }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn is_occluded(&self, y: usize, x: usize) -> bool {
        self.data[y * self.w + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, occluded: bool) {
        self.data[y * self.w + x] = occluded;
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }
}

/// Sampling coordinates for one constant-depth plane, optionally shifted
/// by a residual flow (applied identically at every depth bin).
pub fn sweep_coords(
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    depth: f64,
    residual: Option<&FlowField>,
    h: usize,
    w: usize,
) -> SampleCoords {
    let mut coords = SampleCoords::new(h, w);
    for y in 0..h {
        for x in 0..w {
            let rp = match reproject([x as f64, y as f64], depth, intr, pose) {
                Ok(rp) if rp.valid => rp,
                _ => {
                    coords.set_valid(y, x, false);
                    continue;
                }
            };
            let (mut sx, mut sy) = (
                x as f64 + crate::geometry::snap_zero(rp.pixel[0] - x as f64),
                y as f64 + crate::geometry::snap_zero(rp.pixel[1] - y as f64),
            );
            if let Some(res) = residual {
                if !res.is_valid(y, x) {
                    coords.set_valid(y, x, false);
                    continue;
                }
                let (ru, rv) = res.get(y, x);
                sx += ru as f64;
                sy += rv as f64;
            }
            coords.set(y, x, sx, sy);
        }
    }
    coords
}

/// Cost plane for one depth bin: warp the source features to the target
/// view at the hypothesis depth and score the match.
pub fn sweep_bin(
    feat_t: &ImageGrid,
    feat_src: &ImageGrid,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    depth: f64,
    residual: Option<&FlowField>,
    alpha_cv: f64,
) -> Result<ImageGrid> {
    let coords = sweep_coords(
        intr,
        pose,
        depth,
        residual,
        feat_t.height(),
        feat_t.width(),
    );
    let warped = bilinear_sample(feat_src, &coords);
    cost_error(&warped, feat_t, alpha_cv)
}

fn build_cv(
    feat_t: &ImageGrid,
    feat_src: &ImageGrid,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    hyps: &DepthHypothesisSet,
    residual: Option<&FlowField>,
    alpha_cv: f64,
) -> Result<CostVolume> {
    feat_t.check_same_shape(feat_src)?;
    if let Some(res) = residual {
        res.check_same_shape(feat_t.height(), feat_t.width())?;
    }
    let mut planes = Vec::with_capacity(hyps.len());
    for &depth in hyps.values() {
        planes.push(sweep_bin(
            feat_t, feat_src, intr, pose, depth, residual, alpha_cv,
        )?);
    }
    Ok(CostVolume::from_planes(hyps.clone(), planes))
}

/// Static cost volume: warping driven only by camera ego-motion.
pub fn build_static_cv(
    feat_t: &ImageGrid,
    feat_src: &ImageGrid,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    hyps: &DepthHypothesisSet,
    alpha_cv: f64,
) -> Result<CostVolume> {
    build_cv(feat_t, feat_src, intr, pose, hyps, None, alpha_cv)
}

/// Dynamic cost volume: the same sweep with sampling coordinates
/// additionally shifted by the residual flow.
pub fn build_dynamic_cv(
    feat_t: &ImageGrid,
    feat_src: &ImageGrid,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    hyps: &DepthHypothesisSet,
    residual: &FlowField,
    alpha_cv: f64,
) -> Result<CostVolume> {
    build_cv(feat_t, feat_src, intr, pose, hyps, Some(residual), alpha_cv)
}

/// Relative depth margin below which two pixels landing in the same
/// source cell are considered the same surface rather than an occlusion.
const OCCLUSION_DEPTH_MARGIN: f64 = 0.02;

/// Geometric occlusion estimate for the composed motion.
///
/// A pixel is occluded when its sampling coordinate leaves the image or
/// when another pixel with significantly smaller source-view depth maps
/// into the same source unit cell (a fold of the composed motion).
pub fn occlusion_mask(
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    depth_for_warp: &ImageGrid,
    residual: Option<&FlowField>,
) -> OcclusionMask {
    let (h, w) = (depth_for_warp.height(), depth_for_warp.width());
    let mut mask = OcclusionMask::new(h, w);
    let mut sx_grid = vec![f64::NAN; h * w];
    let mut sy_grid = vec![f64::NAN; h * w];
    let mut z_grid = vec![f64::NAN; h * w];
    let mut min_z = vec![f64::INFINITY; h * w];

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let d = depth_for_warp.get(y, x, 0) as f64;
            if !depth_for_warp.is_valid(y, x) || d <= 0.0 {
                mask.set(y, x, true);
                continue;
            }
            let rp = match reproject([x as f64, y as f64], d, intr, pose) {
                Ok(rp) if rp.valid => rp,
                _ => {
                    mask.set(y, x, true);
                    continue;
                }
            };
            let (mut sx, mut sy) = (
                x as f64 + crate::geometry::snap_zero(rp.pixel[0] - x as f64),
                y as f64 + crate::geometry::snap_zero(rp.pixel[1] - y as f64),
            );
            if let Some(res) = residual {
                let (ru, rv) = res.get(y, x);
                sx += ru as f64;
                sy += rv as f64;
            }
            if sx < 0.0 || sy < 0.0 || sx > (w - 1) as f64 || sy > (h - 1) as f64 {
                mask.set(y, x, true);
                continue;
            }
            sx_grid[i] = sx;
            sy_grid[i] = sy;
            z_grid[i] = rp.depth;
            // Splat the source-view depth into the surrounding cells.
            let x0 = libm::floor(sx) as usize;
            let y0 = libm::floor(sy) as usize;
            for yy in y0..=(y0 + 1).min(h - 1) {
                for xx in x0..=(x0 + 1).min(w - 1) {
                    let j = yy * w + xx;
                    if rp.depth < min_z[j] {
                        min_z[j] = rp.depth;
                    }
                }
            }
        }
    }

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if mask.is_occluded(y, x) || z_grid[i].is_nan() {
                continue;
            }
            let x0 = libm::floor(sx_grid[i]) as usize;
            let y0 = libm::floor(sy_grid[i]) as usize;
            let mut nearest = f64::INFINITY;
            for yy in y0..=(y0 + 1).min(h - 1) {
                for xx in x0..=(x0 + 1).min(w - 1) {
                    nearest = nearest.min(min_z[yy * w + xx]);
                }
            }
            if z_grid[i] > nearest * (1.0 + OCCLUSION_DEPTH_MARGIN) {
                mask.set(y, x, true);
            }
        }
    }
    mask
}

/// Per-pixel depth of the minimum-cost valid bin; ties break toward the
/// lowest bin index. Pixels with no valid bin are marked invalid.
pub fn argmin_depth(cv: &CostVolume) -> ImageGrid {
    let (h, w) = (cv.height(), cv.width());
    let mut out = ImageGrid::new(h, w, 1);
    for y in 0..h {
        for x in 0..w {
            let mut best: Option<(usize, f32)> = None;
            for k in 0..cv.bins() {
                if !cv.is_valid(k, y, x) {
                    continue;
                }
                let c = cv.get(k, y, x);
                match best {
                    Some((_, bc)) if c >= bc => {}
                    _ => best = Some((k, c)),
                }
            }
            match best {
                Some((k, _)) => out.set(y, x, 0, cv.hypotheses().values()[k] as f32),
                None => out.set_valid(y, x, false),
            }
        }
    }
    out
}

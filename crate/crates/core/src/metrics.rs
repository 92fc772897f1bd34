//! Standard depth-evaluation metrics: AbsRel, SqRel, RMSE, RMSElog and
//! the delta thresholds, with range clipping, optional median scaling
//! and optional region-masked evaluation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Evaluation protocol: depth range, median scaling, optional region mask.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalProtocol {
    pub min_depth: f64,
    pub max_depth: f64,
    pub median_scaling: bool,
    /// Restricts evaluation to pixels where the mask is true.
    pub region_mask: Option<Vec<bool>>,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            min_depth: 1e-3,
            max_depth: 80.0,
            median_scaling: false,
            region_mask: None,
        }
    }
}

/// Aggregate error statistics over the valid pixels of one image pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthEvalReport {
    pub abs_rel: f64,
    pub sq_rel: f64,
    pub rmse: f64,
    pub rmse_log: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub n_valid: usize,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn valid_pixels(
    pred: &ImageGrid,
    gt: &ImageGrid,
    protocol: &EvalProtocol,
) -> Result<Vec<(f64, f64)>> {
    pred.check_same_shape(gt)?;
    let (h, w) = (gt.height(), gt.width());
    if let Some(mask) = &protocol.region_mask {
        if mask.len() != h * w {
            return Err(Error::ShapeMismatch {
                expected: (h, w),
                got: (mask.len(), 1),
            });
        }
    }
    let mut pairs = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let g = gt.get(y, x, 0) as f64;
            if !gt.is_valid(y, x) || !pred.is_valid(y, x) {
                continue;
            }
            if g < protocol.min_depth || g > protocol.max_depth {
                continue;
            }
            if let Some(mask) = &protocol.region_mask {
                if !mask[y * w + x] {
                    continue;
                }
            }
            pairs.push((pred.get(y, x, 0) as f64, g));
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoValidPixels);
    }
    Ok(pairs)
}

fn scale_and_clamp(pairs: &mut [(f64, f64)], protocol: &EvalProtocol) {
    if protocol.median_scaling {
        let mut gts: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut preds: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let scale = median(&mut gts) / median(&mut preds);
        for p in pairs.iter_mut() {
            p.0 *= scale;
        }
    }
    for p in pairs.iter_mut() {
        p.0 = p.0.clamp(protocol.min_depth, protocol.max_depth);
    }
}

/// Evaluates a predicted depth map against ground truth.
pub fn evaluate(
    pred: &ImageGrid,
    gt: &ImageGrid,
    protocol: &EvalProtocol,
) -> Result<DepthEvalReport> {
    let mut pairs = valid_pixels(pred, gt, protocol)?;
    scale_and_clamp(&mut pairs, protocol);
    let n = pairs.len() as f64;
    let mut abs_rel = 0.0;
    let mut sq_rel = 0.0;
    let mut mse = 0.0;
    let mut mse_log = 0.0;
    let mut d1 = 0usize;
    let mut d2 = 0usize;
    let mut d3 = 0usize;
    for &(p, g) in &pairs {
        let diff = p - g;
        abs_rel += diff.abs() / g;
        sq_rel += diff * diff / g;
        mse += diff * diff;
        let dl = libm::log(p) - libm::log(g);
        mse_log += dl * dl;
        let ratio = (p / g).max(g / p);
        if ratio < 1.25 {
            d1 += 1;
        }
        if ratio < 1.25 * 1.25 {
            d2 += 1;
        }
        if ratio < 1.25 * 1.25 * 1.25 {
            d3 += 1;
        }
    }
    Ok(DepthEvalReport {
        abs_rel: abs_rel / n,
        sq_rel: sq_rel / n,
        rmse: libm::sqrt(mse / n),
        rmse_log: libm::sqrt(mse_log / n),
        delta1: d1 as f64 / n,
        delta2: d2 as f64 / n,
        delta3: d3 as f64 / n,
        n_valid: pairs.len(),
    })
}

/// Histogram of per-pixel AbsRel over the valid pixels.
/// Values outside `range` fall into the nearest end bin.
pub fn error_histogram(
    pred: &ImageGrid,
    gt: &ImageGrid,
    protocol: &EvalProtocol,
    n_bins: usize,
    range: (f64, f64),
) -> Result<Vec<usize>> {
    assert!(n_bins >= 1 && range.1 > range.0);
    let mut pairs = valid_pixels(pred, gt, protocol)?;
    scale_and_clamp(&mut pairs, protocol);
    let mut counts = vec![0usize; n_bins];
    let width = (range.1 - range.0) / n_bins as f64;
    for &(p, g) in &pairs {
        let err = (p - g).abs() / g;
        let bin = ((err - range.0) / width) as isize;
        let bin = bin.clamp(0, n_bins as isize - 1) as usize;
        counts[bin] += 1;
    }
    Ok(counts)
}

//! Occlusion-aware fusion of static and dynamic cost volumes:
//! complementary selection, the concatenation branch, and their sum.

use alloc::vec;
use alloc::vec::Vec;

use crate::costvolume::{CostVolume, OcclusionMask};
use crate::error::{Error, Result};

/// Per-pixel 1x1 linear map from the 2N stacked cost channels to N
/// output channels, plus N biases.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionWeights {
    n: usize,
    /// Row-major N x 2N.
    weights: Vec<f32>,
    bias: Vec<f32>,
}

impl FusionWeights {
    pub fn new(n: usize, weights: Vec<f32>, bias: Vec<f32>) -> Result<Self> {
        if weights.len() != n * 2 * n || bias.len() != n {
            return Err(Error::WeightDimMismatch);
        }
        Ok(FusionWeights { n, weights, bias })
    }

    /// Bin-wise averaging: output bin k = (static k + dynamic k) / 2,
    /// zero bias. The symmetric parameter-free default.
    pub fn averaging(n: usize) -> Self {
        let mut weights = vec![0.0f32; n * 2 * n];
        for k in 0..n {
            weights[k * 2 * n + k] = 0.5;
            weights[k * 2 * n + n + k] = 0.5;
        }
        FusionWeights {
            n,
            weights,
            bias: vec![0.0; n],
        }
    }

    pub fn bins(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn bias(&self) -> &[f32] {
        &self.bias
    }

    #[inline]
    pub fn weight(&self, out_bin: usize, in_channel: usize) -> f32 {
        self.weights[out_bin * 2 * self.n + in_channel]
    }
}

/// Occlusion-aware selection between the two volumes.
///
/// Per pixel column: occluded in one volume and visible in the other
/// takes the visible volume's column; otherwise the per-bin elementwise
/// minimum (also used as the fallback when both are occluded).
pub fn complementary_fuse(
    cv_s: &CostVolume,
    cv_d: &CostVolume,
    occ_s: &OcclusionMask,
    occ_d: &OcclusionMask,
) -> Result<CostVolume> {
    cv_s.same_layout(cv_d)?;
    let (n, h, w) = (cv_s.bins(), cv_s.height(), cv_s.width());
    if occ_s.height() != h || occ_s.width() != w || occ_d.height() != h || occ_d.width() != w {
        return Err(Error::ShapeMismatch {
            expected: (h, w),
            got: (occ_s.height(), occ_s.width()),
        });
    }
    let mut out = cv_s.clone();
    for y in 0..h {
        for x in 0..w {
            let os = occ_s.is_occluded(y, x);
            let od = occ_d.is_occluded(y, x);
            for k in 0..n {
                let (cost, valid) = if os && !od {
                    (cv_d.get(k, y, x), cv_d.is_valid(k, y, x))
                } else if od && !os {
                    (cv_s.get(k, y, x), cv_s.is_valid(k, y, x))
                } else {
                    // Visible in both, or occluded in both: per-bin min
                    // over whichever bins are valid.
                    let vs = cv_s.is_valid(k, y, x);
                    let vd = cv_d.is_valid(k, y, x);
                    match (vs, vd) {
                        (true, true) => (cv_s.get(k, y, x).min(cv_d.get(k, y, x)), true),
                        (true, false) => (cv_s.get(k, y, x), true),
                        (false, true) => (cv_d.get(k, y, x), true),
                        (false, false) => (0.0, false),
                    }
                };
                out.set(k, y, x, cost, valid);
            }
        }
    }
    Ok(out)
}

/// Concatenation branch: stack the 2N bins and apply the per-pixel
/// linear map. Invalid input bins contribute zero; an output bin is
/// valid only where both volumes' corresponding bins are valid.
pub fn concat_fuse(
    cv_s: &CostVolume,
    cv_d: &CostVolume,
    weights: &FusionWeights,
) -> Result<CostVolume> {
    cv_s.same_layout(cv_d)?;
    let (n, h, w) = (cv_s.bins(), cv_s.height(), cv_s.width());
    if weights.bins() != n {
        return Err(Error::WeightDimMismatch);
    }
    let mut out = cv_s.clone();
    for y in 0..h {
        for x in 0..w {
            for k in 0..n {
                let mut acc = weights.bias()[k] as f64;
                for j in 0..n {
                    if cv_s.is_valid(j, y, x) {
                        acc += weights.weight(k, j) as f64 * cv_s.get(j, y, x) as f64;
                    }
                    if cv_d.is_valid(j, y, x) {
                        acc += weights.weight(k, n + j) as f64 * cv_d.get(j, y, x) as f64;
                    }
                }
                let valid = cv_s.is_valid(k, y, x) && cv_d.is_valid(k, y, x);
                out.set(k, y, x, acc as f32, valid);
            }
        }
    }
    Ok(out)
}

/// Final fused volume: elementwise sum of the complementary and
/// concatenation branches; validity is the AND.
pub fn fuse(cv_com: &CostVolume, cv_cat: &CostVolume) -> Result<CostVolume> {
    cv_com.same_layout(cv_cat)?;
    let (n, h, w) = (cv_com.bins(), cv_com.height(), cv_com.width());
    let mut out = cv_com.clone();
    for y in 0..h {
        for x in 0..w {
            for k in 0..n {
                let valid = cv_com.is_valid(k, y, x) && cv_cat.is_valid(k, y, x);
                out.set(k, y, x, cv_com.get(k, y, x) + cv_cat.get(k, y, x), valid);
            }
        }
    }
    Ok(out)
}

//! Parallel cost-volume construction. Bins are independent, so they are
//! swept on a rayon pool and reassembled in fixed bin order — output is
//! bitwise identical for any thread count.

use rayon::prelude::*;

use dscv_core::costvolume::{sweep_bin, CostVolume, DepthHypothesisSet};
use dscv_core::geometry::{CameraIntrinsics, PoseSE3};
use dscv_core::{FlowField, ImageGrid};

use crate::error::{CliError, Result};

pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot build thread pool: {e}")))
}

#[allow(clippy::too_many_arguments)]
pub fn build_cv_parallel(
    feat_t: &ImageGrid,
    feat_src: &ImageGrid,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
    hyps: &DepthHypothesisSet,
    residual: Option<&FlowField>,
    alpha_cv: f64,
    threads: usize,
) -> Result<CostVolume> {
    let pool = thread_pool(threads)?;
    let planes = pool.install(|| {
        hyps.values()
            .par_iter()
            .map(|&d| sweep_bin(feat_t, feat_src, intr, pose, d, residual, alpha_cv))
            .collect::<std::result::Result<Vec<ImageGrid>, dscv_core::Error>>()
    })?;
    Ok(CostVolume::from_planes(hyps.clone(), planes))
}

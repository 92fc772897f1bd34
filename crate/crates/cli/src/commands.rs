//! Subcommand implementations. Each writes its data outputs to the
//! requested paths plus a `<output>.json` sidecar echoing the parameters
//! that produced it, so results are self-describing.

use std::path::{Path, PathBuf};

use serde_json::json;

use dscv_core::costvolume::{argmin_depth, CostVolume, OcclusionMask};
use dscv_core::fusion::{complementary_fuse, concat_fuse, fuse, FusionWeights};
use dscv_core::metrics::{error_histogram, evaluate, EvalProtocol};
use dscv_core::photometric::{
    adaptive_photometric_loss, edge_aware_smoothness, photometric_loss,
    pyramid_distillation_loss,
};
use dscv_core::sampler::warp;
use dscv_core::synthetic::render_pair;
use dscv_core::ImageGrid;

use crate::config::{self, read_json, write_json, CameraJson, PoseJson, RunConfig, SceneJson};
use crate::error::{CliError, Result};
use crate::formats::{dscv, dsfw, flo, pfm, raster};
use crate::pipeline::build_cv_parallel;
use crate::viz::flow_to_rgb;

fn sidecar_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.json", out.display()))
}

fn write_sidecar(out: &Path, body: serde_json::Value) -> Result<()> {
    write_json(&sidecar_path(out), &body)
}

pub fn synth(spec_path: &Path, seed: u64, out_dir: &Path) -> Result<()> {
    let scene: SceneJson = read_json(spec_path)?;
    let spec = scene.to_core()?;
    let pair = render_pair(&spec, seed)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let p = |name: &str| out_dir.join(name);
    let (h, w) = (pair.image_t.height(), pair.image_t.width());

    raster::write_gray16(&p("image_t.png"), &pair.image_t)?;
    raster::write_gray16(&p("image_src.png"), &pair.image_src)?;
    pfm::write_pfm(&p("depth_t.pfm"), &pair.depth_t)?;
    flo::write_flo(&p("total_flow.flo"), &pair.total_flow)?;
    flo::write_flo(&p("residual_flow.flo"), &pair.residual_flow)?;
    raster::write_mask(&p("object_mask.png"), &pair.object_mask, h, w)?;
    raster::write_mask(&p("occlusion_mask.png"), &pair.occlusion_mask, h, w)?;
    raster::write_mask(
        &p("discontinuity_mask.png"),
        &pair.discontinuity_mask,
        h,
        w,
    )?;
    write_json(&p("camera.json"), &CameraJson::from_core(&pair.intrinsics))?;
    write_json(&p("pose.json"), &PoseJson::from_core(&pair.pose))?;
    write_json(
        &p("scene.json"),
        &json!({ "spec": scene, "seed": seed, "width": w, "height": h }),
    )?;
    Ok(())
}

pub struct CostvolArgs<'a> {
    pub dynamic: bool,
    pub flow: Option<&'a Path>,
    pub out: &'a Path,
    pub threads: usize,
}

pub fn costvol(cfg: &RunConfig, args: &CostvolArgs) -> Result<()> {
    if args.dynamic && args.flow.is_none() {
        return Err(CliError::Validation(
            "--flow is required when --mode dynamic".into(),
        ));
    }
    let feat_t = raster::read_gray(config::require(&cfg.image_t, "image_t")?)?;
    let feat_src = raster::read_gray(config::require(&cfg.image_src, "image_src")?)?;
    let camera: CameraJson = read_json(config::require(&cfg.camera, "camera")?)?;
    let pose: PoseJson = read_json(config::require(&cfg.pose, "pose")?)?;
    let intr = camera.to_core()?;
    let pose = pose.to_core()?;
    let residual = match args.flow {
        Some(path) if args.dynamic => Some(flo::read_flo(path)?),
        _ => None,
    };
    let hyps = cfg.hypotheses()?;
    let cv = build_cv_parallel(
        &feat_t,
        &feat_src,
        &intr,
        &pose,
        &hyps,
        residual.as_ref(),
        cfg.alpha_cv,
        args.threads,
    )?;
    dscv::write_dscv(args.out, &cv)?;
    write_sidecar(
        args.out,
        json!({
            "command": "costvol",
            "mode": if args.dynamic { "dynamic" } else { "static" },
            "config": cfg,
        }),
    )
}

pub struct FuseArgs<'a> {
    pub static_cv: &'a Path,
    pub dynamic_cv: &'a Path,
    pub occ_s: &'a Path,
    pub occ_d: &'a Path,
    pub weights: Option<&'a Path>,
    pub out: &'a Path,
}

fn read_occ(path: &Path, h: usize, w: usize) -> Result<OcclusionMask> {
    let (mh, mw, data) = raster::read_mask(path)?;
    if (mh, mw) != (h, w) {
        return Err(CliError::Validation(format!(
            "{}: mask is {}x{}, cost volume is {}x{}",
            path.display(),
            mw,
            mh,
            w,
            h
        )));
    }
    Ok(OcclusionMask::from_vec(h, w, data))
}

pub fn fuse_cmd(args: &FuseArgs) -> Result<()> {
    let cv_s = dscv::read_dscv(args.static_cv)?;
    let cv_d = dscv::read_dscv(args.dynamic_cv)?;
    let (h, w) = (cv_s.height(), cv_s.width());
    let occ_s = read_occ(args.occ_s, h, w)?;
    let occ_d = read_occ(args.occ_d, h, w)?;
    let weights = match args.weights {
        Some(path) => dsfw::read_dsfw(path)?,
        None => FusionWeights::averaging(cv_s.bins()),
    };
    let cv_com = complementary_fuse(&cv_s, &cv_d, &occ_s, &occ_d)?;
    let cv_cat = concat_fuse(&cv_s, &cv_d, &weights)?;
    let fused = fuse(&cv_com, &cv_cat)?;
    dscv::write_dscv(args.out, &fused)?;
    write_sidecar(
        args.out,
        json!({
            "command": "fuse",
            "static": args.static_cv.display().to_string(),
            "dynamic": args.dynamic_cv.display().to_string(),
            "weights": args.weights.map(|p| p.display().to_string()),
        }),
    )
}

pub fn depth_cmd(cv_path: &Path, out: &Path) -> Result<()> {
    let cv = dscv::read_dscv(cv_path)?;
    let depth = argmin_depth(&cv);
    pfm::write_pfm(out, &depth)?;
    let n_invalid = depth.validity().iter().filter(|v| !**v).count();
    write_sidecar(
        out,
        json!({
            "command": "depth",
            "cv": cv_path.display().to_string(),
            "bins": cv.bins(),
            // PFM carries no validity channel; these pixels are written as 0.
            "invalid_pixels": n_invalid,
        }),
    )
}

fn warped(src: &ImageGrid, field: &Option<PathBuf>, name: &str) -> Result<ImageGrid> {
    let flow = flo::read_flo(config::require(field, name)?)?;
    Ok(warp(src, &flow)?)
}

pub fn loss_cmd(cfg: &RunConfig, kind: &str) -> Result<serde_json::Value> {
    let value = match kind {
        "photometric" => {
            let target = raster::read_gray(config::require(&cfg.image_t, "image_t")?)?;
            let src = raster::read_gray(config::require(&cfg.image_src, "image_src")?)?;
            let synth = warped(&src, &cfg.flow, "flow")?;
            photometric_loss(&target, &synth, cfg.alpha_photo)?
        }
        "adaptive" => {
            let target = raster::read_gray(config::require(&cfg.image_t, "image_t")?)?;
            let src = raster::read_gray(config::require(&cfg.image_src, "image_src")?)?;
            let synth_s = warped(&src, &cfg.flow, "flow")?;
            let synth_d = warped(&src, &cfg.flow_dynamic, "flow_dynamic")?;
            adaptive_photometric_loss(&target, &synth_s, &synth_d, cfg.alpha_photo)?
        }
        "smooth" => {
            let disp = pfm::read_pfm(config::require(&cfg.disparity, "disparity")?)?;
            let image = raster::read_gray(config::require(&cfg.image_t, "image_t")?)?;
            edge_aware_smoothness(&disp, &image)?
        }
        "pyramid" => {
            if cfg.pyramid.is_empty() {
                return Err(CliError::Validation(
                    "config field `pyramid` must list at least one scale output".into(),
                ));
            }
            let scales = cfg
                .pyramid
                .iter()
                .map(|p| pfm::read_pfm(p))
                .collect::<Result<Vec<_>>>()?;
            let final_depth = pfm::read_pfm(config::require(&cfg.final_depth, "final_depth")?)?;
            pyramid_distillation_loss(&scales, &final_depth, cfg.q, cfg.epsilon)?
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown loss kind `{other}` (expected photometric|adaptive|smooth|pyramid)"
            )))
        }
    };
    Ok(json!({
        "kind": kind,
        "value": value,
        "alpha_photo": cfg.alpha_photo,
        "q": cfg.q,
        "epsilon": cfg.epsilon,
    }))
}

pub struct EvalArgs<'a> {
    pub pred: &'a Path,
    pub gt: &'a Path,
    pub mask: Option<&'a Path>,
    pub median_scale: bool,
    pub hist: Option<&'a Path>,
}

pub fn eval_cmd(cfg: &RunConfig, args: &EvalArgs) -> Result<serde_json::Value> {
    let pred = pfm::read_pfm(args.pred)?;
    let gt = pfm::read_pfm(args.gt)?;
    let region_mask = match args.mask {
        Some(path) => {
            let (mh, mw, data) = raster::read_mask(path)?;
            if (mh, mw) != (gt.height(), gt.width()) {
                return Err(CliError::Validation(format!(
                    "{}: mask shape does not match ground truth",
                    path.display()
                )));
            }
            Some(data)
        }
        None => None,
    };
    let protocol = EvalProtocol {
        min_depth: cfg.min_depth,
        max_depth: cfg.max_depth,
        median_scaling: args.median_scale || cfg.median_scaling,
        region_mask,
    };
    let report = evaluate(&pred, &gt, &protocol)?;
    if let Some(hist_path) = args.hist {
        let n_bins = 20;
        let range = (0.0, 1.0);
        let counts = error_histogram(&pred, &gt, &protocol, n_bins, range)?;
        let mut csv = String::from("bin_lo,bin_hi,count\n");
        let width = (range.1 - range.0) / n_bins as f64;
        for (i, c) in counts.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{}\n",
                range.0 + width * i as f64,
                range.0 + width * (i + 1) as f64,
                c
            ));
        }
        std::fs::write(hist_path, csv).map_err(|e| CliError::io(hist_path, e))?;
    }
    Ok(json!({
        "abs_rel": report.abs_rel,
        "sq_rel": report.sq_rel,
        "rmse": report.rmse,
        "rmse_log": report.rmse_log,
        "delta1": report.delta1,
        "delta2": report.delta2,
        "delta3": report.delta3,
        "n_valid": report.n_valid,
        "median_scaling": protocol.median_scaling,
        "min_depth": protocol.min_depth,
        "max_depth": protocol.max_depth,
    }))
}

pub fn flow_viz(flow_path: &Path, out: &Path, max_flow: Option<f64>) -> Result<()> {
    let flow = flo::read_flo(flow_path)?;
    let rgb = flow_to_rgb(&flow, max_flow);
    raster::write_rgb8(out, flow.height(), flow.width(), rgb)
}

/// Re-exported for integration tests that need to check fused volumes.
pub fn read_cv(path: &Path) -> Result<CostVolume> {
    dscv::read_dscv(path)
}

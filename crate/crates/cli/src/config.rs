//! JSON schemas: camera intrinsics, rigid poses, scene descriptions for
//! `synth`, and the RunConfig consumed by `costvol`/`loss`/`eval`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dscv_core::costvolume::{self, DepthHypothesisSet, Spacing};
use dscv_core::geometry::{CameraIntrinsics, PoseSE3};
use dscv_core::synthetic::{ObjectSpec, PlaneSpec, SceneSpec};

use crate::error::{CliError, Result};

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CameraJson {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraJson {
    pub fn to_core(&self) -> Result<CameraIntrinsics> {
        Ok(CameraIntrinsics::new(
            self.fx,
            self.fy,
            self.cx,
            self.cy,
            self.width,
            self.height,
        )?)
    }

    pub fn from_core(intr: &CameraIntrinsics) -> CameraJson {
        CameraJson {
            fx: intr.fx,
            fy: intr.fy,
            cx: intr.cx,
            cy: intr.cy,
            width: intr.width,
            height: intr.height,
        }
    }
}

/// Rotation is a row-major 3x3 matrix; must be orthonormal with
/// determinant +1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoseJson {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl PoseJson {
    pub fn to_core(&self) -> Result<PoseSE3> {
        let r = &self.rotation;
        let m = [
            [r[0], r[1], r[2]],
            [r[3], r[4], r[5]],
            [r[6], r[7], r[8]],
        ];
        Ok(PoseSE3::new(m, self.translation)?)
    }

    pub fn from_core(pose: &PoseSE3) -> PoseJson {
        let m = pose.rotation();
        PoseJson {
            rotation: [
                m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
            ],
            translation: *pose.translation(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackgroundJson {
    pub depth: f64,
    #[serde(default = "default_normal")]
    pub normal: [f64; 3],
}

fn default_normal() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectJson {
    pub depth: f64,
    pub center_px: [f64; 2],
    pub size_px: [f64; 2],
    pub velocity: [f64; 3],
}

/// On-disk form of a renderable scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneJson {
    pub camera: CameraJson,
    pub motion: PoseJson,
    pub background: BackgroundJson,
    #[serde(default)]
    pub objects: Vec<ObjectJson>,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default = "default_wavelength")]
    pub min_wavelength_px: f64,
}

fn default_wavelength() -> f64 {
    64.0
}

impl SceneJson {
    pub fn to_core(&self) -> Result<SceneSpec> {
        let mut spec = SceneSpec::new(
            self.camera.to_core()?,
            self.motion.to_core()?,
            PlaneSpec {
                depth: self.background.depth,
                normal: self.background.normal,
            },
        );
        spec.objects = self
            .objects
            .iter()
            .map(|o| ObjectSpec {
                depth: o.depth,
                center_px: o.center_px,
                size_px: o.size_px,
                velocity: o.velocity,
            })
            .collect();
        spec.noise_sigma = self.noise_sigma;
        spec.min_wavelength_px = self.min_wavelength_px;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingJson {
    Linear,
    InverseLinear,
}

impl SpacingJson {
    pub fn to_core(self) -> Spacing {
        match self {
            SpacingJson::Linear => Spacing::Linear,
            SpacingJson::InverseLinear => Spacing::InverseLinear,
        }
    }
}

/// Run parameters shared by the pipeline subcommands. Every field has a
/// default matching the engine defaults, so a config file only needs to
/// name its inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    // Input paths; which are required depends on the subcommand.
    pub image_t: Option<PathBuf>,
    pub image_src: Option<PathBuf>,
    pub camera: Option<PathBuf>,
    pub pose: Option<PathBuf>,
    /// Flow warping the source image for the photometric/static branch.
    pub flow: Option<PathBuf>,
    /// Second warp flow for the dynamic branch of the adaptive loss.
    pub flow_dynamic: Option<PathBuf>,
    pub disparity: Option<PathBuf>,
    pub pyramid: Vec<PathBuf>,
    pub final_depth: Option<PathBuf>,

    // Depth hypothesis grid.
    pub d_min: f64,
    pub d_max: f64,
    pub n_bins: usize,
    pub spacing: SpacingJson,

    // Loss weights.
    pub alpha_cv: f64,
    pub alpha_photo: f64,
    pub q: f64,
    pub epsilon: f64,

    // Evaluation protocol.
    pub min_depth: f64,
    pub max_depth: f64,
    pub median_scaling: bool,

    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            image_t: None,
            image_src: None,
            camera: None,
            pose: None,
            flow: None,
            flow_dynamic: None,
            disparity: None,
            pyramid: Vec::new(),
            final_depth: None,
            d_min: 0.1,
            d_max: 100.0,
            n_bins: 96,
            spacing: SpacingJson::InverseLinear,
            alpha_cv: 0.4,
            alpha_photo: 0.85,
            q: 0.4,
            epsilon: 0.1,
            min_depth: 1e-3,
            max_depth: 80.0,
            median_scaling: false,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        match path {
            Some(p) => read_json(p),
            None => Ok(RunConfig::default()),
        }
    }

    pub fn hypotheses(&self) -> Result<DepthHypothesisSet> {
        Ok(costvolume::make_hypotheses(
            self.d_min,
            self.d_max,
            self.n_bins,
            self.spacing.to_core(),
        )?)
    }

}

/// Fetches a required input path or fails naming the config field.
pub fn require<'f>(field: &'f Option<PathBuf>, name: &str) -> Result<&'f Path> {
    field
        .as_deref()
        .ok_or_else(|| CliError::Validation(format!("config field `{name}` is required")))
}

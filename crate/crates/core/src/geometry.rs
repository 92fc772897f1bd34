//! Pinhole projection, rigid transforms and the flow decomposition
//! camera flow + residual flow = total flow.
//!
//! All arithmetic here runs in double precision; grids hand values back
//! as single precision.

use crate::error::{Error, Result};
use crate::grid::{FlowField, ImageGrid};

/// Pinhole camera: focal lengths and principal point in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite())
            || !(cx.is_finite() && cy.is_finite())
            || width < 2
            || height < 2
        {
            return Err(Error::InvalidRange);
        }
        Ok(CameraIntrinsics {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Intrinsics rescaled by `s` in both axes (feature-pyramid levels).
    pub fn scaled(&self, s: f64) -> CameraIntrinsics {
        CameraIntrinsics {
            fx: self.fx * s,
            fy: self.fy * s,
            cx: self.cx * s,
            cy: self.cy * s,
            width: ((self.width as f64) * s) as usize,
            height: ((self.height as f64) * s) as usize,
        }
    }
}

/// 3D point in camera/scene coordinates, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn add(&self, o: &Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(&self, o: &Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn dot(&self, o: &Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn scale(&self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Rigid transform [R|T]: X' = R X + T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSE3 {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl PoseSE3 {
    /// Validates orthonormality (RᵀR = I within 1e-9) and det R = 1.
    pub fn new(rotation: [[f64; 3]; 3], translation: [f64; 3]) -> Result<Self> {
        let r = &rotation;
        for i in 0..3 {
            for j in 0..3 {
                let mut dot = 0.0;
                for k in 0..3 {
                    dot += r[k][i] * r[k][j];
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-9 {
                    return Err(Error::InvalidRotation);
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRotation);
        }
        Ok(PoseSE3 {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        PoseSE3 {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0, 0.0, 0.0],
        }
    }

    pub fn translation_only(tx: f64, ty: f64, tz: f64) -> Self {
        PoseSE3 {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [tx, ty, tz],
        }
    }

    /// Rotation about a unit axis by `angle` radians, zero translation.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        let (x, y, z) = (axis[0], axis[1], axis[2]);
        let omc = 1.0 - c;
        let rotation = [
            [c + x * x * omc, x * y * omc - z * s, x * z * omc + y * s],
            [y * x * omc + z * s, c + y * y * omc, y * z * omc - x * s],
            [z * x * omc - y * s, z * y * omc + x * s, c + z * z * omc],
        ];
        PoseSE3 {
            rotation,
            translation: [0.0, 0.0, 0.0],
        }
    }

    pub fn rotation(&self) -> &[[f64; 3]; 3] {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64; 3] {
        &self.translation
    }

    pub fn transform(&self, p: &Point3) -> Point3 {
        let r = &self.rotation;
        let t = &self.translation;
        Point3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + t[0],
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + t[1],
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + t[2],
        )
    }

    /// Rotation only, no translation.
    pub fn rotate(&self, p: &Point3) -> Point3 {
        let r = &self.rotation;
        Point3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        )
    }

    pub fn inverse(&self) -> PoseSE3 {
        let r = &self.rotation;
        let mut rt = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                rt[i][j] = r[j][i];
            }
        }
        let t = &self.translation;
        let ti = [
            -(rt[0][0] * t[0] + rt[0][1] * t[1] + rt[0][2] * t[2]),
            -(rt[1][0] * t[0] + rt[1][1] * t[1] + rt[1][2] * t[2]),
            -(rt[2][0] * t[0] + rt[2][1] * t[1] + rt[2][2] * t[2]),
        ];
        PoseSE3 {
            rotation: rt,
            translation: ti,
        }
    }

    /// self ∘ other: applies `other` first.
    pub fn compose(&self, other: &PoseSE3) -> PoseSE3 {
        let a = &self.rotation;
        let b = &other.rotation;
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        let tp = self.transform(&Point3::new(
            other.translation[0],
            other.translation[1],
            other.translation[2],
        ));
        PoseSE3 {
            rotation: r,
            translation: [tp.x, tp.y, tp.z],
        }
    }
}

/// Pinhole projection of a point with z > 0.
pub fn project(point: &Point3, intr: &CameraIntrinsics) -> Result<([f64; 2], f64)> {
    if point.z <= 0.0 {
        return Err(Error::NonPositiveDepth);
    }
    let u = intr.fx * point.x / point.z + intr.cx;
    let v = intr.fy * point.y / point.z + intr.cy;
    Ok(([u, v], point.z))
}

/// Inverse of `project`: lifts a pixel at a given depth.
pub fn backproject(pixel: [f64; 2], depth: f64, intr: &CameraIntrinsics) -> Result<Point3> {
    if depth <= 0.0 {
        return Err(Error::NonPositiveDepth);
    }
    Ok(Point3::new(
        (pixel[0] - intr.cx) / intr.fx * depth,
        (pixel[1] - intr.cy) / intr.fy * depth,
        depth,
    ))
}

/// Result of reprojecting a pixel into another view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reprojection {
    pub pixel: [f64; 2],
    pub depth: f64,
    /// False when the transformed point lies at or behind the camera.
    pub valid: bool,
}

/// Full reprojection chain: lift, transform, project.
///
/// Behind-camera points yield `valid = false` rather than an error so a
/// hypothesis sweep can keep going through remaining bins.
pub fn reproject(
    pixel: [f64; 2],
    depth: f64,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
) -> Result<Reprojection> {
    let p = backproject(pixel, depth, intr)?;
    let q = pose.transform(&p);
    if q.z <= 0.0 {
        return Ok(Reprojection {
            pixel: [0.0, 0.0],
            depth: q.z,
            valid: false,
        });
    }
    let (px, d) = project(&q, intr)?;
    Ok(Reprojection {
        pixel: px,
        depth: d,
        valid: true,
    })
}

/// The project/backproject round trip leaves ~1e-14 px of float noise.
/// Displacements below a nanopixel carry no information, so they are
/// treated as exactly zero; identity motion then yields bitwise-zero
/// flow and warps that stay in bounds at the image border.
pub(crate) fn snap_zero(d: f64) -> f64 {
    if d.abs() < 1e-9 {
        0.0
    } else {
        d
    }
}

/// Per-pixel 2D displacement induced purely by camera motion over a
/// static scene: reproject(p, d) - p.
pub fn camera_flow(
    depth_map: &ImageGrid,
    intr: &CameraIntrinsics,
    pose: &PoseSE3,
) -> Result<FlowField> {
    let (h, w) = (depth_map.height(), depth_map.width());
    if h != intr.height || w != intr.width {
        return Err(Error::ShapeMismatch {
            expected: (intr.height, intr.width),
            got: (h, w),
        });
    }
    let mut flow = FlowField::zeros(h, w);
    for y in 0..h {
        for x in 0..w {
            let d = depth_map.get(y, x, 0) as f64;
            if !depth_map.is_valid(y, x) || d <= 0.0 {
                flow.set_valid(y, x, false);
                continue;
            }
            let rp = reproject([x as f64, y as f64], d, intr, pose)?;
            if !rp.valid {
                flow.set_valid(y, x, false);
                continue;
            }
            flow.set(
                y,
                x,
                snap_zero(rp.pixel[0] - x as f64) as f32,
                snap_zero(rp.pixel[1] - y as f64) as f32,
            );
        }
    }
    Ok(flow)
}

/// Elementwise sum of camera flow and residual flow; validity is the
/// AND of the input validities.
pub fn compose_total_flow(cam: &FlowField, residual: &FlowField) -> Result<FlowField> {
    residual.check_same_shape(cam.height(), cam.width())?;
    let (h, w) = (cam.height(), cam.width());
    let mut out = FlowField::zeros(h, w);
    for y in 0..h {
        for x in 0..w {
            let (cu, cv) = cam.get(y, x);
            let (ru, rv) = residual.get(y, x);
            out.set(y, x, cu + ru, cv + rv);
            out.set_valid(y, x, cam.is_valid(y, x) && residual.is_valid(y, x));
        }
    }
    Ok(out)
}

/// 3D displacement recovered from a 2D correspondence and depths in the
/// two views: T1⁻¹ P⁻¹(p + flow, d1) - T0⁻¹ P⁻¹(p, d0).
pub fn scene_flow_from_depths(
    pixel: [f64; 2],
    opt_flow: [f64; 2],
    d0: f64,
    d1: f64,
    pose0: &PoseSE3,
    pose1: &PoseSE3,
    intr: &CameraIntrinsics,
) -> Result<Point3> {
    let p1 = backproject([pixel[0] + opt_flow[0], pixel[1] + opt_flow[1]], d1, intr)?;
    let p0 = backproject(pixel, d0, intr)?;
    let w1 = pose1.inverse().transform(&p1);
    let w0 = pose0.inverse().transform(&p0);
    Ok(w1.sub(&w0))
}

/// 2D flow produced by a 3D point displaced by a scene-flow vector:
/// P(T1 (X0 + Xsen)) - P(T0 X0).
pub fn projected_optical_flow(
    point: &Point3,
    scene_flow: &Point3,
    pose0: &PoseSE3,
    pose1: &PoseSE3,
    intr: &CameraIntrinsics,
) -> Result<[f64; 2]> {
    let moved = pose1.transform(&point.add(scene_flow));
    let base = pose0.transform(point);
    let (p1, _) = project(&moved, intr)?;
    let (p0, _) = project(&base, intr)?;
    Ok([p1[0] - p0[0], p1[1] - p0[1]])
}

//! Procedural two-frame scene renderer.
//!
//! Renders a textured background plane plus fronto-parallel moving
//! rectangles from two camera positions, with analytically exact depth,
//! camera/residual/total flow, occlusion and object masks. Everything is
//! closed-form from the scene geometry, so rendered pairs serve as
//! ground-truth oracles for the rest of the crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{project, snap_zero, CameraIntrinsics, Point3, PoseSE3};
use crate::grid::{FlowField, ImageGrid};
use crate::rng::SplitMix64;

/// Textured plane `n · X = n_z * depth` in target-frame coordinates
/// (depth is the plane's distance along the principal axis).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSpec {
    pub depth: f64,
    /// Need not be unit length; the z component must be positive.
    pub normal: [f64; 3],
}

impl PlaneSpec {
    pub fn fronto_parallel(depth: f64) -> Self {
        PlaneSpec {
            depth,
            normal: [0.0, 0.0, 1.0],
        }
    }
}

/// Fronto-parallel textured rectangle at constant target-frame depth,
/// moving rigidly at `velocity` metres per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSpec {
    pub depth: f64,
    /// Rectangle centre in target-frame pixel coordinates at frame t.
    pub center_px: [f64; 2],
    /// Full width/height in pixels at frame t.
    pub size_px: [f64; 2],
    /// Displacement from frame t-1 to frame t, in target-frame metres.
    pub velocity: [f64; 3],
}

/// Complete description of a two-frame scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub intrinsics: CameraIntrinsics,
    /// Maps target-frame (t) coordinates to source-frame (t-1) coordinates.
    pub camera_motion: PoseSE3,
    pub background: PlaneSpec,
    pub objects: Vec<ObjectSpec>,
    /// Gaussian image noise added independently to both frames.
    pub noise_sigma: f64,
    /// Minimum projected texture wavelength in pixels; clamped to >= 4.
    pub min_wavelength_px: f64,
}

impl SceneSpec {
    pub fn new(intrinsics: CameraIntrinsics, camera_motion: PoseSE3, background: PlaneSpec) -> Self {
        SceneSpec {
            intrinsics,
            camera_motion,
            background,
            objects: Vec::new(),
            noise_sigma: 0.0,
            min_wavelength_px: 64.0,
        }
    }
}

/// Two rendered frames with every ground-truth quantity attached.
/// Masks are row-major `h * w` vectors aligned with `image_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPair {
    pub image_t: ImageGrid,
    pub image_src: ImageGrid,
    pub depth_t: ImageGrid,
    pub pose: PoseSE3,
    pub intrinsics: CameraIntrinsics,
    /// Motion flow of the objects alone; exactly zero off `object_mask`.
    pub residual_flow: FlowField,
    /// Full target-to-source correspondence field.
    pub total_flow: FlowField,
    pub object_mask: Vec<bool>,
    /// Target pixels not visible from the source camera.
    pub occlusion_mask: Vec<bool>,
    /// One-pixel band around depth discontinuities (mixed coverage);
    /// excluded from interior accuracy statistics.
    pub discontinuity_mask: Vec<bool>,
}

const N_WAVES: usize = 8;

struct Texture {
    // (kx, ky, phase, amplitude) per wave
    waves: [(f64, f64, f64, f64); N_WAVES],
    amp_sum: f64,
}

impl Texture {
    /// Band-limited 2D texture over surface coordinates in metres:
    /// projected wavelength stays >= `min_wavelength_px` for surface
    /// points no deeper than `z_max`.
    fn generate(rng: &mut SplitMix64, min_wavelength_px: f64, z_max: f64, f_min: f64) -> Texture {
        let mut waves = [(0.0, 0.0, 0.0, 0.0); N_WAVES];
        let mut amp_sum = 0.0;
        for wv in waves.iter_mut() {
            let lam_px = rng.uniform(min_wavelength_px, 4.0 * min_wavelength_px);
            let lam_m = lam_px * z_max / f_min;
            let k = 2.0 * core::f64::consts::PI / lam_m;
            let theta = rng.uniform(0.0, 2.0 * core::f64::consts::PI);
            let phase = rng.uniform(0.0, 2.0 * core::f64::consts::PI);
            let amp = rng.uniform(0.5, 1.0);
            *wv = (k * libm::cos(theta), k * libm::sin(theta), phase, amp);
            amp_sum += amp;
        }
        Texture { waves, amp_sum }
    }

    fn sample(&self, u: f64, v: f64) -> f64 {
        let mut acc = 0.0;
        for &(kx, ky, phase, amp) in &self.waves {
            acc += amp * libm::sin(kx * u + ky * v + phase);
        }
        0.5 + 0.5 * acc / self.amp_sum
    }
}

fn pixel_ray(x: f64, y: f64, intr: &CameraIntrinsics) -> Point3 {
    Point3::new((x - intr.cx) / intr.fx, (y - intr.cy) / intr.fy, 1.0)
}

fn normalize(v: [f64; 3]) -> Result<Point3> {
    let n = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if !(n > 1e-12) || v[2] <= 0.0 {
        return Err(Error::DegenerateScene);
    }
    Ok(Point3::new(v[0] / n, v[1] / n, v[2] / n))
}

/// World-space rectangle footprint of an object at a given depth.
struct Footprint {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    depth: f64,
}

impl Footprint {
    fn of(obj: &ObjectSpec, intr: &CameraIntrinsics) -> Footprint {
        let d = obj.depth;
        Footprint {
            x0: (obj.center_px[0] - obj.size_px[0] / 2.0 - intr.cx) / intr.fx * d,
            x1: (obj.center_px[0] + obj.size_px[0] / 2.0 - intr.cx) / intr.fx * d,
            y0: (obj.center_px[1] - obj.size_px[1] / 2.0 - intr.cy) / intr.fy * d,
            y1: (obj.center_px[1] + obj.size_px[1] / 2.0 - intr.cy) / intr.fy * d,
            depth: d,
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

fn validate(spec: &SceneSpec) -> Result<()> {
    if spec.background.depth <= 0.0 {
        return Err(Error::DegenerateScene);
    }
    if spec.noise_sigma < 0.0 {
        return Err(Error::InvalidRange);
    }
    let (w, h) = (spec.intrinsics.width as f64, spec.intrinsics.height as f64);
    for obj in &spec.objects {
        if obj.depth <= 0.0 || obj.depth - obj.velocity[2] <= 0.0 {
            return Err(Error::DegenerateScene);
        }
        if obj.size_px[0] <= 0.0 || obj.size_px[1] <= 0.0 {
            return Err(Error::InvalidRange);
        }
        let x0 = obj.center_px[0] - obj.size_px[0] / 2.0;
        let x1 = obj.center_px[0] + obj.size_px[0] / 2.0;
        let y0 = obj.center_px[1] - obj.size_px[1] / 2.0;
        let y1 = obj.center_px[1] + obj.size_px[1] / 2.0;
        if x0 < 0.0 || y0 < 0.0 || x1 > w - 1.0 || y1 > h - 1.0 {
            return Err(Error::InvalidRange);
        }
    }
    Ok(())
}

/// Depth of the background plane along a pixel ray; errors if the plane
/// is not strictly in front of the camera there.
fn plane_depth(n: &Point3, c: f64, ray: &Point3) -> Result<f64> {
    let denom = n.dot(ray);
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateScene);
    }
    let s = c / denom;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DegenerateScene);
    }
    Ok(s)
}

/// Maximum background depth over the corner rays of the target view
/// (the depth field of a plane is extremal at the view corners).
fn bg_depth_range(n: &Point3, c: f64, intr: &CameraIntrinsics) -> Result<f64> {
    let (w, h) = (intr.width as f64 - 1.0, intr.height as f64 - 1.0);
    let mut z_max: f64 = 0.0;
    for &(x, y) in &[(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)] {
        let s = plane_depth(n, c, &pixel_ray(x, y, intr))?;
        z_max = z_max.max(s);
    }
    Ok(z_max)
}

/// Renders the scene from both camera positions and derives all
/// ground-truth fields analytically.
pub fn render_pair(spec: &SceneSpec, seed: u64) -> Result<RenderedPair> {
    validate(spec)?;
    let intr = &spec.intrinsics;
    let pose = &spec.camera_motion;
    let inv_pose = pose.inverse();
    let (h, w) = (intr.height, intr.width);
    let lam_min = spec.min_wavelength_px.max(4.0);
    let f_min = intr.fx.min(intr.fy);

    // Background plane n·X = c in target coordinates, and in source
    // coordinates after the rigid change of frame.
    let n_bg = normalize(spec.background.normal)?;
    let c_bg = n_bg.z * spec.background.depth;
    let n_bg_src = pose.rotate(&n_bg);
    let t = pose.translation();
    let c_bg_src = c_bg + n_bg_src.x * t[0] + n_bg_src.y * t[1] + n_bg_src.z * t[2];

    let mut rng = SplitMix64::new(seed);
    let bg_zmax = bg_depth_range(&n_bg, c_bg, intr)?.max(bg_depth_range(&n_bg_src, c_bg_src, intr)?);
    let bg_tex = Texture::generate(&mut rng, lam_min, bg_zmax * 1.2, f_min);

    let mut footprints = Vec::new();
    let mut obj_tex = Vec::new();
    for obj in &spec.objects {
        footprints.push(Footprint::of(obj, intr));
        let z_max = obj.depth.max(obj.depth - obj.velocity[2]);
        obj_tex.push(Texture::generate(&mut rng, lam_min, z_max * 1.2, f_min));
    }

    // --- target frame: z-buffer over surfaces, then texture lookup ---
    let mut image_t = ImageGrid::new(h, w, 1);
    let mut depth_t = ImageGrid::new(h, w, 1);
    // 0 = background, i + 1 = object i
    let mut surf_t = vec![0usize; h * w];
    for y in 0..h {
        for x in 0..w {
            let ray = pixel_ray(x as f64, y as f64, intr);
            let mut depth = plane_depth(&n_bg, c_bg, &ray)?;
            let mut surf = 0usize;
            for (i, fp) in footprints.iter().enumerate() {
                if fp.depth < depth && fp.contains(ray.x * fp.depth, ray.y * fp.depth) {
                    depth = fp.depth;
                    surf = i + 1;
                }
            }
            let p3 = ray.scale(depth);
            let tex = if surf == 0 { &bg_tex } else { &obj_tex[surf - 1] };
            image_t.set(y, x, 0, tex.sample(p3.x, p3.y) as f32);
            depth_t.set(y, x, 0, depth as f32);
            surf_t[y * w + x] = surf;
        }
    }

    // --- source frame: same surfaces with objects displaced by -velocity ---
    let mut image_src = ImageGrid::new(h, w, 1);
    let mut depth_src = vec![0.0f64; h * w];
    for y in 0..h {
        for x in 0..w {
            let ray = pixel_ray(x as f64, y as f64, intr);
            let mut depth = plane_depth(&n_bg_src, c_bg_src, &ray)?;
            let mut surf = 0usize;
            let mut tex_pt = inv_pose.transform(&ray.scale(depth));
            for (i, (fp, obj)) in footprints.iter().zip(&spec.objects).enumerate() {
                // Object plane at frame t-1, expressed in source coordinates.
                let n_o = pose.rotate(&Point3::new(0.0, 0.0, 1.0));
                let d_prev = fp.depth - obj.velocity[2];
                let c_o = d_prev + n_o.x * t[0] + n_o.y * t[1] + n_o.z * t[2];
                let denom = n_o.dot(&ray);
                if denom.abs() < 1e-12 {
                    continue;
                }
                let s = c_o / denom;
                if !(s > 0.0) || s >= depth {
                    continue;
                }
                // Where this surface point sits at frame t, in target coords.
                let at_t = inv_pose.transform(&ray.scale(s)).add(&Point3::new(
                    obj.velocity[0],
                    obj.velocity[1],
                    obj.velocity[2],
                ));
                if fp.contains(at_t.x, at_t.y) {
                    depth = s;
                    surf = i + 1;
                    tex_pt = at_t;
                }
            }
            let tex = if surf == 0 { &bg_tex } else { &obj_tex[surf - 1] };
            image_src.set(y, x, 0, tex.sample(tex_pt.x, tex_pt.y) as f32);
            depth_src[y * w + x] = depth;
        }
    }

    // --- ground-truth flows and occlusion, from geometry alone ---
    let mut total_flow = FlowField::zeros(h, w);
    let mut residual_flow = FlowField::zeros(h, w);
    let mut object_mask = vec![false; h * w];
    let mut occlusion_mask = vec![false; h * w];
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            let surf = surf_t[idx];
            object_mask[idx] = surf > 0;
            let ray = pixel_ray(x as f64, y as f64, intr);
            let p3 = ray.scale(depth_t.get(y, x, 0) as f64);
            // The same surface point at frame t-1 (objects move back by
            // one frame of velocity), then into source camera coords.
            let prev = if surf > 0 {
                let vel = &spec.objects[surf - 1].velocity;
                p3.sub(&Point3::new(vel[0], vel[1], vel[2]))
            } else {
                p3
            };
            let in_src = pose.transform(&prev);
            let cam_pt = pose.transform(&p3);
            if in_src.z <= 0.0 || cam_pt.z <= 0.0 {
                total_flow.set_valid(y, x, false);
                residual_flow.set_valid(y, x, false);
                occlusion_mask[idx] = true;
                continue;
            }
            let (q, z_s) = project(&in_src, intr)?;
            let (q_cam, _) = project(&cam_pt, intr)?;
            let tu = snap_zero(q[0] - x as f64) as f32;
            let tv = snap_zero(q[1] - y as f64) as f32;
            total_flow.set(y, x, tu, tv);
            if surf > 0 {
                let cu = snap_zero(q_cam[0] - x as f64) as f32;
                let cv = snap_zero(q_cam[1] - y as f64) as f32;
                residual_flow.set(y, x, tu - cu, tv - cv);
            }
            occlusion_mask[idx] = hidden_in_source(q, z_s, &depth_src, h, w);
        }
    }

    // One-pixel band around surface-label changes (8-neighbourhood).
    let mut discontinuity_mask = vec![false; h * w];
    for y in 0..h {
        for x in 0..w {
            let s = surf_t[y * w + x];
            'scan: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (ny, nx) = (y as i64 + dy, x as i64 + dx);
                    if ny < 0 || nx < 0 || ny >= h as i64 || nx >= w as i64 {
                        continue;
                    }
                    if surf_t[ny as usize * w + nx as usize] != s {
                        discontinuity_mask[y * w + x] = true;
                        break 'scan;
                    }
                }
            }
        }
    }

    if spec.noise_sigma > 0.0 {
        for img in [&mut image_t, &mut image_src] {
            for v in img.data_mut() {
                *v += (rng.next_gaussian() * spec.noise_sigma) as f32;
            }
        }
    }

    Ok(RenderedPair {
        image_t,
        image_src,
        depth_t,
        pose: pose.clone(),
        intrinsics: intr.clone(),
        residual_flow,
        total_flow,
        object_mask,
        occlusion_mask,
        discontinuity_mask,
    })
}

/// True when a target point landing at `q` with source depth `z_s` is
/// hidden behind the source z-buffer (or leaves the source view). The
/// depth test runs against the nearest of the four surrounding source
/// pixels so the one-pixel straddle band at occluder edges is flagged.
fn hidden_in_source(q: [f64; 2], z_s: f64, depth_src: &[f64], h: usize, w: usize) -> bool {
    if q[0] < 0.0 || q[0] > (w - 1) as f64 || q[1] < 0.0 || q[1] > (h - 1) as f64 {
        return true;
    }
    let x0 = (libm::floor(q[0]) as usize).min(w - 1);
    let y0 = (libm::floor(q[1]) as usize).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let mut z_min = f64::INFINITY;
    for &(yy, xx) in &[(y0, x0), (y0, x1), (y1, x0), (y1, x1)] {
        z_min = z_min.min(depth_src[yy * w + xx]);
    }
    z_s > z_min * 1.01
}

/// Adds seeded zero-mean Gaussian noise to a flow field, modelling an
/// imperfect estimated residual flow. `sigma = 0` is the identity.
pub fn perturb_flow(flow: &FlowField, sigma: f64, seed: u64) -> FlowField {
    assert!(sigma >= 0.0);
    if sigma == 0.0 {
        return flow.clone();
    }
    let (h, w) = (flow.height(), flow.width());
    let mut rng = SplitMix64::new(seed);
    let mut out = flow.clone();
    for y in 0..h {
        for x in 0..w {
            let (u, v) = flow.get(y, x);
            out.set(
                y,
                x,
                u + (rng.next_gaussian() * sigma) as f32,
                v + (rng.next_gaussian() * sigma) as f32,
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{camera_flow, compose_total_flow};
    use crate::sampler::warp;

    fn intr_128() -> CameraIntrinsics {
        CameraIntrinsics::new(100.0, 100.0, 63.5, 47.5, 128, 96).unwrap()
    }

    fn moving_object_scene() -> SceneSpec {
        let mut spec = SceneSpec::new(
            intr_128(),
            PoseSE3::translation_only(0.123, 0.04, 0.0),
            PlaneSpec::fronto_parallel(6.0),
        );
        spec.objects.push(ObjectSpec {
            depth: 3.0,
            center_px: [60.0, 50.0],
            size_px: [50.0, 40.0],
            velocity: [0.15, 0.08, 0.0],
        });
        spec.min_wavelength_px = 96.0;
        spec
    }

    #[test]
    fn identity_scene_is_static() {
        let spec = SceneSpec::new(
            intr_128(),
            PoseSE3::identity(),
            PlaneSpec::fronto_parallel(4.0),
        );
        let pair = render_pair(&spec, 3).unwrap();
        assert_eq!(pair.image_t.data(), pair.image_src.data());
        assert!(pair.total_flow.u().iter().all(|&v| v == 0.0));
        assert!(pair.total_flow.v().iter().all(|&v| v == 0.0));
        assert!(pair.occlusion_mask.iter().all(|&o| !o));
    }

    #[test]
    fn pure_translation_flow_is_uniform() {
        // fx * tx / z = 100 * 0.1 / 2 = 5 px.
        let spec = SceneSpec::new(
            intr_128(),
            PoseSE3::translation_only(0.1, 0.0, 0.0),
            PlaneSpec::fronto_parallel(2.0),
        );
        let pair = render_pair(&spec, 7).unwrap();
        for y in 0..96 {
            for x in 0..128 {
                let (u, v) = pair.total_flow.get(y, x);
                assert!((u - 5.0).abs() < 1e-5 && v.abs() < 1e-5);
                let (ru, rv) = pair.residual_flow.get(y, x);
                assert_eq!((ru, rv), (0.0, 0.0));
            }
        }
        // Disocclusion is exactly the out-of-view band x >= w - 5.
        for y in 0..96 {
            for x in 0..128 {
                assert_eq!(pair.occlusion_mask[y * 128 + x], x >= 123, "({y},{x})");
            }
        }
    }

    #[test]
    fn static_camera_residual_matches_object_footprint() {
        let mut spec = SceneSpec::new(
            intr_128(),
            PoseSE3::identity(),
            PlaneSpec::fronto_parallel(6.0),
        );
        spec.objects.push(ObjectSpec {
            depth: 3.0,
            center_px: [60.0, 50.0],
            size_px: [40.0, 30.0],
            velocity: [0.09, -0.06, 0.0],
        });
        let pair = render_pair(&spec, 11).unwrap();
        let mut on_object = 0;
        for y in 0..96 {
            for x in 0..128 {
                let (ru, rv) = pair.residual_flow.get(y, x);
                let nonzero = ru != 0.0 || rv != 0.0;
                assert_eq!(nonzero, pair.object_mask[y * 128 + x], "({y},{x})");
                if nonzero {
                    on_object += 1;
                    // -f * v / z: object moved (+x, -y), flow points back.
                    assert!((ru + 3.0).abs() < 1e-5 && (rv - 2.0).abs() < 1e-5);
                }
            }
        }
        assert!(on_object > 1000);
        // Static camera: camera flow is identically zero.
        let cam = camera_flow(&pair.depth_t, &spec.intrinsics, &pair.pose).unwrap();
        assert!(cam.u().iter().all(|&v| v == 0.0));
        assert!(cam.v().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flow_decomposition_closes() {
        let pair = render_pair(&moving_object_scene(), 21).unwrap();
        let cam = camera_flow(&pair.depth_t, &pair.intrinsics, &pair.pose).unwrap();
        let recomposed = compose_total_flow(&cam, &pair.residual_flow).unwrap();
        for y in 0..96 {
            for x in 0..128 {
                if !pair.total_flow.is_valid(y, x) {
                    continue;
                }
                let (tu, tv) = pair.total_flow.get(y, x);
                let (ru, rv) = recomposed.get(y, x);
                assert!((tu - ru).abs() < 1e-5 && (tv - rv).abs() < 1e-5, "({y},{x})");
            }
        }
    }

    #[test]
    fn warp_by_total_flow_reconstructs_target() {
        let pair = render_pair(&moving_object_scene(), 35).unwrap();
        let warped = warp(&pair.image_src, &pair.total_flow).unwrap();
        let mut err = 0.0f64;
        let mut n = 0usize;
        for y in 0..96 {
            for x in 0..128 {
                let idx = y * 128 + x;
                if pair.occlusion_mask[idx] || pair.discontinuity_mask[idx] {
                    continue;
                }
                if !warped.is_valid(y, x) {
                    continue;
                }
                err += (warped.get(y, x, 0) - pair.image_t.get(y, x, 0)).abs() as f64;
                n += 1;
            }
        }
        assert!(n > 8000);
        assert!(err / (n as f64) < 1e-3, "masked L1 = {}", err / n as f64);
    }

    #[test]
    fn slanted_background_warp_closes() {
        let mut spec = SceneSpec::new(
            intr_128(),
            PoseSE3::translation_only(0.08, -0.03, 0.02),
            PlaneSpec {
                depth: 5.0,
                normal: [0.08, -0.05, 1.0],
            },
        );
        spec.min_wavelength_px = 128.0;
        let pair = render_pair(&spec, 4).unwrap();
        let warped = warp(&pair.image_src, &pair.total_flow).unwrap();
        let mut err = 0.0f64;
        let mut n = 0usize;
        for y in 0..96 {
            for x in 0..128 {
                if pair.occlusion_mask[y * 128 + x] || !warped.is_valid(y, x) {
                    continue;
                }
                err += (warped.get(y, x, 0) - pair.image_t.get(y, x, 0)).abs() as f64;
                n += 1;
            }
        }
        assert!(n > 8000);
        assert!(err / (n as f64) < 1e-3, "masked L1 = {}", err / n as f64);
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_pair(&moving_object_scene(), 99).unwrap();
        let b = render_pair(&moving_object_scene(), 99).unwrap();
        assert_eq!(a, b);
        let c = render_pair(&moving_object_scene(), 100).unwrap();
        assert_ne!(a.image_t.data(), c.image_t.data());
    }

    #[test]
    fn degenerate_scenes_rejected() {
        let bad_bg = SceneSpec::new(
            intr_128(),
            PoseSE3::identity(),
            PlaneSpec::fronto_parallel(-1.0),
        );
        assert_eq!(render_pair(&bad_bg, 0), Err(Error::DegenerateScene));

        let mut bad_obj = moving_object_scene();
        bad_obj.objects[0].velocity[2] = 10.0; // object behind camera at t-1
        assert_eq!(render_pair(&bad_obj, 0), Err(Error::DegenerateScene));

        let mut oov = moving_object_scene();
        oov.objects[0].center_px = [5.0, 5.0];
        assert_eq!(render_pair(&oov, 0), Err(Error::InvalidRange));
    }

    #[test]
    fn noise_changes_images_only() {
        let mut spec = moving_object_scene();
        let clean = render_pair(&spec, 5).unwrap();
        spec.noise_sigma = 0.05;
        let noisy = render_pair(&spec, 5).unwrap();
        assert_ne!(clean.image_t.data(), noisy.image_t.data());
        assert_eq!(clean.depth_t, noisy.depth_t);
        assert_eq!(clean.total_flow, noisy.total_flow);
        let mut var = 0.0f64;
        for (a, b) in clean.image_t.data().iter().zip(noisy.image_t.data()) {
            var += ((b - a) as f64).powi(2);
        }
        let sd = (var / clean.image_t.data().len() as f64).sqrt();
        assert!((sd - 0.05).abs() < 0.005, "sd = {sd}");
    }

    #[test]
    fn perturb_flow_statistics() {
        let flow = FlowField::zeros(96, 128);
        assert_eq!(perturb_flow(&flow, 0.0, 1), flow);
        let a = perturb_flow(&flow, 0.5, 42);
        assert_eq!(a, perturb_flow(&flow, 0.5, 42));
        let mut var = 0.0f64;
        for (u, v) in a.u().iter().zip(a.v()) {
            var += (*u as f64).powi(2) + (*v as f64).powi(2);
        }
        let sd = (var / (2.0 * 96.0 * 128.0)).sqrt();
        assert!((sd - 0.5).abs() < 0.05, "sd = {sd}");
    }
}

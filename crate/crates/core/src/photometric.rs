//! Matching and training losses: SSIM, the SSIM+L1 cost, photometric
//! and adaptive photometric losses, edge-aware smoothness, the robust
//! penalty and the pyramid distillation loss.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::sampler::upsample;

/// Loss weights and robust-penalty constants.
///
/// `alpha_cv` weighs SSIM against L1 inside cost volumes, `alpha_photo`
/// inside the photometric loss; `q` and `epsilon` shape the robust
/// penalty of the pyramid distillation loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub alpha_cv: f64,
    pub alpha_photo: f64,
    pub q: f64,
    pub epsilon: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha_cv: 0.4,
            alpha_photo: 0.85,
            q: 0.4,
            epsilon: 0.1,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let a_ok = |a: f64| (0.0..=1.0).contains(&a);
        if a_ok(self.alpha_cv) && a_ok(self.alpha_photo) && self.q > 0.0 && self.epsilon > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidRange)
        }
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 9e-4;

/// Symmetric reflection for window indices near the border.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    if i < 0 {
        i = -i - 1;
    }
    if i >= n {
        i = 2 * n - 1 - i;
    }
    i as usize
}

/// Per-pixel SSIM with 3x3 uniform local statistics and reflection
/// padding, averaged over channels. Output is a single-channel grid.
pub fn ssim(a: &ImageGrid, b: &ImageGrid) -> Result<ImageGrid> {
    a.check_same_shape(b)?;
    let (h, w, c) = (a.height(), a.width(), a.channels());
    let mut out = ImageGrid::new(h, w, 1);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for ch in 0..c {
                let mut ma = 0.0;
                let mut mb = 0.0;
                let mut maa = 0.0;
                let mut mbb = 0.0;
                let mut mab = 0.0;
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let yy = reflect(y as isize + dy, h);
                        let xx = reflect(x as isize + dx, w);
                        let va = a.get(yy, xx, ch) as f64;
                        let vb = b.get(yy, xx, ch) as f64;
                        ma += va;
                        mb += vb;
                        maa += va * va;
                        mbb += vb * vb;
                        mab += va * vb;
                    }
                }
                ma /= 9.0;
                mb /= 9.0;
                let var_a = maa / 9.0 - ma * ma;
                let var_b = mbb / 9.0 - mb * mb;
                let cov = mab / 9.0 - ma * mb;
                let num = (2.0 * ma * mb + C1) * (2.0 * cov + C2);
                let den = (ma * ma + mb * mb + C1) * (var_a + var_b + C2);
                acc += num / den;
            }
            out.set(y, x, 0, (acc / c as f64) as f32);
            out.set_valid(y, x, a.is_valid(y, x) && b.is_valid(y, x));
        }
    }
    Ok(out)
}

/// Channel-averaged per-pixel absolute difference.
fn l1_map(a: &ImageGrid, b: &ImageGrid) -> ImageGrid {
    let (h, w, c) = (a.height(), a.width(), a.channels());
    let mut out = ImageGrid::new(h, w, 1);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for ch in 0..c {
                acc += (a.get(y, x, ch) as f64 - b.get(y, x, ch) as f64).abs();
            }
            out.set(y, x, 0, (acc / c as f64) as f32);
            out.set_valid(y, x, a.is_valid(y, x) && b.is_valid(y, x));
        }
    }
    out
}

/// Matching cost per pixel: alpha_cv (1 - SSIM) + (1 - alpha_cv) L1.
pub fn cost_error(warped: &ImageGrid, target: &ImageGrid, alpha_cv: f64) -> Result<ImageGrid> {
    warped.check_same_shape(target)?;
    let s = ssim(warped, target)?;
    let l1 = l1_map(warped, target);
    let (h, w) = (warped.height(), warped.width());
    let mut out = ImageGrid::new(h, w, 1);
    for y in 0..h {
        for x in 0..w {
            let v = alpha_cv * (1.0 - s.get(y, x, 0) as f64)
                + (1.0 - alpha_cv) * l1.get(y, x, 0) as f64;
            out.set(y, x, 0, v as f32);
            out.set_valid(y, x, s.is_valid(y, x));
        }
    }
    Ok(out)
}

/// Scalar photometric loss: the mean over valid pixels of
/// (alpha/2)(1 - SSIM) + (1 - alpha) L1. Note the halved SSIM weight
/// relative to the cost-volume error.
pub fn photometric_loss(target: &ImageGrid, synth: &ImageGrid, alpha_photo: f64) -> Result<f64> {
    target.check_same_shape(synth)?;
    let s = ssim(target, synth)?;
    let l1 = l1_map(target, synth);
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in 0..target.height() {
        for x in 0..target.width() {
            if !s.is_valid(y, x) {
                continue;
            }
            acc += alpha_photo / 2.0 * (1.0 - s.get(y, x, 0) as f64)
                + (1.0 - alpha_photo) * l1.get(y, x, 0) as f64;
            n += 1;
        }
    }
    Ok(if n > 0 { acc / n as f64 } else { 0.0 })
}

/// Adaptive photometric loss over a static and a dynamic synthesis:
/// per pixel the best SSIM of the two branches (max) and the best L1
/// (min) are combined, so whichever branch explains a pixel wins.
pub fn adaptive_photometric_loss(
    target: &ImageGrid,
    synth_static: &ImageGrid,
    synth_dynamic: &ImageGrid,
    alpha_photo: f64,
) -> Result<f64> {
    target.check_same_shape(synth_static)?;
    target.check_same_shape(synth_dynamic)?;
    let ss = ssim(target, synth_static)?;
    let sd = ssim(target, synth_dynamic)?;
    let ls = l1_map(target, synth_static);
    let ld = l1_map(target, synth_dynamic);
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in 0..target.height() {
        for x in 0..target.width() {
            if !(ss.is_valid(y, x) && sd.is_valid(y, x)) {
                continue;
            }
            let best_ssim = (ss.get(y, x, 0) as f64).max(sd.get(y, x, 0) as f64);
            let best_l1 = (ls.get(y, x, 0) as f64).min(ld.get(y, x, 0) as f64);
            acc += alpha_photo / 2.0 * (1.0 - best_ssim) + (1.0 - alpha_photo) * best_l1;
            n += 1;
        }
    }
    Ok(if n > 0 { acc / n as f64 } else { 0.0 })
}

/// Edge-aware smoothness of a mean-normalized disparity map.
///
/// Forward differences; the x term averages over H x (W-1) positions,
/// the y term over (H-1) x W; image gradients are channel-averaged
/// absolute differences.
pub fn edge_aware_smoothness(disp: &ImageGrid, image: &ImageGrid) -> Result<f64> {
    if disp.height() != image.height() || disp.width() != image.width() {
        return Err(Error::ShapeMismatch {
            expected: (disp.height(), disp.width()),
            got: (image.height(), image.width()),
        });
    }
    let (h, w) = (disp.height(), disp.width());
    let c = image.channels();
    let mut mean = 0.0;
    for y in 0..h {
        for x in 0..w {
            mean += disp.get(y, x, 0) as f64;
        }
    }
    mean /= (h * w) as f64;
    if mean == 0.0 {
        return Err(Error::ZeroMeanDisparity);
    }
    let img_grad = |y0: usize, x0: usize, y1: usize, x1: usize| {
        let mut g = 0.0;
        for ch in 0..c {
            g += (image.get(y1, x1, ch) as f64 - image.get(y0, x0, ch) as f64).abs();
        }
        g / c as f64
    };
    let mut acc_x = 0.0;
    for y in 0..h {
        for x in 0..w - 1 {
            let dd = (disp.get(y, x + 1, 0) as f64 - disp.get(y, x, 0) as f64).abs() / mean.abs();
            acc_x += dd * libm::exp(-img_grad(y, x, y, x + 1));
        }
    }
    let mut acc_y = 0.0;
    for y in 0..h - 1 {
        for x in 0..w {
            let dd = (disp.get(y + 1, x, 0) as f64 - disp.get(y, x, 0) as f64).abs() / mean.abs();
            acc_y += dd * libm::exp(-img_grad(y, x, y + 1, x));
        }
    }
    let mx = if w > 1 { acc_x / (h * (w - 1)) as f64 } else { 0.0 };
    let my = if h > 1 { acc_y / ((h - 1) * w) as f64 } else { 0.0 };
    Ok(mx + my)
}

/// Robust penalty (|x| + epsilon)^q.
pub fn robust_penalty(x: f64, q: f64, epsilon: f64) -> f64 {
    libm::pow(x.abs() + epsilon, q)
}

/// Sum over scales of the mean robust penalty between the upsampled
/// scale output and the full-resolution depth used as a pseudo-label.
pub fn pyramid_distillation_loss(
    scale_depths: &[ImageGrid],
    final_depth: &ImageGrid,
    q: f64,
    epsilon: f64,
) -> Result<f64> {
    let (h, w) = (final_depth.height(), final_depth.width());
    let mut total = 0.0;
    for scale in scale_depths {
        let up = upsample(scale, h, w)?;
        let mut acc = 0.0;
        for y in 0..h {
            for x in 0..w {
                let d = final_depth.get(y, x, 0) as f64 - up.get(y, x, 0) as f64;
                acc += robust_penalty(d, q, epsilon);
            }
        }
        total += acc / (h * w) as f64;
    }
    Ok(total)
}

/// Horizontal mirror of a grid, used by flip-invariance tests.
pub fn hflip(g: &ImageGrid) -> ImageGrid {
    let (h, w, c) = (g.height(), g.width(), g.channels());
    let mut out = ImageGrid::new(h, w, c);
    let mut valid = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                out.set(y, x, ch, g.get(y, w - 1 - x, ch));
            }
            valid.push(g.is_valid(y, w - 1 - x));
        }
    }
    out.validity_mut().copy_from_slice(&valid);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_grid(rng: &mut SplitMix64, h: usize, w: usize, c: usize) -> ImageGrid {
        let mut g = ImageGrid::new(h, w, c);
        for i in 0..h * w * c {
            g.data_mut()[i] = rng.uniform(0.0, 1.0) as f32;
        }
        g
    }

    #[test]
    fn ssim_self_is_one() {
        let mut rng = SplitMix64::new(1);
        let a = random_grid(&mut rng, 8, 8, 3);
        let s = ssim(&a, &a).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                assert!((s.get(y, x, 0) - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ssim_constant_patches_closed_form() {
        let a = ImageGrid::filled(6, 6, 1, 0.0);
        let b = ImageGrid::filled(6, 6, 1, 1.0);
        let s = ssim(&a, &b).unwrap();
        let expect = C1 / (1.0 + C1);
        for y in 0..6 {
            for x in 0..6 {
                assert!((s.get(y, x, 0) as f64 - expect).abs() < 1e-9);
            }
        }
        assert!((expect - 9.999e-5).abs() < 1e-8);
    }

    #[test]
    fn ssim_symmetric_bitwise() {
        let mut rng = SplitMix64::new(2);
        let a = random_grid(&mut rng, 7, 5, 2);
        let b = random_grid(&mut rng, 7, 5, 2);
        assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
    }

    #[test]
    fn ssim_range() {
        let mut rng = SplitMix64::new(3);
        let a = random_grid(&mut rng, 8, 8, 1);
        let b = random_grid(&mut rng, 8, 8, 1);
        let s = ssim(&a, &b).unwrap();
        for v in s.data() {
            assert!(*v >= -1.0 - 1e-6 && *v <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn cost_error_identical_inputs_zero() {
        let mut rng = SplitMix64::new(4);
        let a = random_grid(&mut rng, 8, 8, 1);
        let e = cost_error(&a, &a, 0.4).unwrap();
        for v in e.data() {
            assert!(v.abs() < 1e-6);
        }
    }

    #[test]
    fn cost_error_alpha_zero_is_l1() {
        let mut rng = SplitMix64::new(5);
        let a = random_grid(&mut rng, 8, 8, 1);
        let b = random_grid(&mut rng, 8, 8, 1);
        let e = cost_error(&a, &b, 0.0).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let l1 = (a.get(y, x, 0) - b.get(y, x, 0)).abs();
                assert!((e.get(y, x, 0) - l1).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn cost_error_constant_patches() {
        let a = ImageGrid::filled(6, 6, 1, 0.0);
        let b = ImageGrid::filled(6, 6, 1, 1.0);
        let e = cost_error(&a, &b, 0.4).unwrap();
        let expect = 0.4 * (1.0 - C1 / (1.0 + C1)) + 0.6;
        for v in e.data() {
            assert!((*v as f64 - expect).abs() < 1e-7);
        }
        assert!((expect - 0.99996).abs() < 1e-5);
    }

    #[test]
    fn photometric_loss_examples() {
        let a = ImageGrid::filled(6, 6, 1, 0.0);
        assert_eq!(photometric_loss(&a, &a, 0.85).unwrap(), 0.0);
        let b = ImageGrid::filled(6, 6, 1, 1.0);
        let loss = photometric_loss(&a, &b, 0.85).unwrap();
        let expect = 0.425 * (1.0 - C1 / (1.0 + C1)) + 0.15;
        assert!((loss - expect).abs() < 1e-9);
        assert!((expect - 0.574958).abs() < 1e-6);
    }

    #[test]
    fn adaptive_equals_single_branch_when_equal() {
        let mut rng = SplitMix64::new(6);
        let t = random_grid(&mut rng, 8, 8, 1);
        let s = random_grid(&mut rng, 8, 8, 1);
        let single = photometric_loss(&t, &s, 0.85).unwrap();
        let adaptive = adaptive_photometric_loss(&t, &s, &s, 0.85).unwrap();
        assert_eq!(single, adaptive);
    }

    #[test]
    fn adaptive_perfect_branch_dominates() {
        let mut rng = SplitMix64::new(7);
        let t = random_grid(&mut rng, 8, 8, 1);
        let s = random_grid(&mut rng, 8, 8, 1);
        let loss = adaptive_photometric_loss(&t, &s, &t, 0.85).unwrap();
        assert!(loss.abs() < 1e-9);
    }

    #[test]
    fn adaptive_never_exceeds_either_branch() {
        let mut rng = SplitMix64::new(8);
        for _ in 0..20 {
            let t = random_grid(&mut rng, 8, 8, 1);
            let s = random_grid(&mut rng, 8, 8, 1);
            let d = random_grid(&mut rng, 8, 8, 1);
            let ad = adaptive_photometric_loss(&t, &s, &d, 0.85).unwrap();
            let ls = photometric_loss(&t, &s, 0.85).unwrap();
            let ld = photometric_loss(&t, &d, 0.85).unwrap();
            assert!(ad <= ls.min(ld) + 1e-9);
        }
    }

    #[test]
    fn smoothness_constant_disparity_zero() {
        let mut rng = SplitMix64::new(9);
        let img = random_grid(&mut rng, 6, 6, 1);
        let disp = ImageGrid::filled(6, 6, 1, 2.0);
        assert_eq!(edge_aware_smoothness(&disp, &img).unwrap(), 0.0);
    }

    #[test]
    fn smoothness_ramp_hand_value() {
        // Constant image, disparity ramp d(x,y)=x on 4x4.
        let img = ImageGrid::filled(4, 4, 1, 0.5);
        let mut disp = ImageGrid::new(4, 4, 1);
        for y in 0..4 {
            for x in 0..4 {
                disp.set(y, x, 0, x as f32);
            }
        }
        // mean disparity 1.5; every x forward difference is 1/1.5, e^0 = 1.
        let expect = 1.0 / 1.5;
        let loss = edge_aware_smoothness(&disp, &img).unwrap();
        assert!((loss - expect).abs() < 1e-9, "{loss} vs {expect}");
    }

    #[test]
    fn smoothness_monotone_in_image_edges() {
        let mut disp = ImageGrid::new(4, 4, 1);
        for y in 0..4 {
            for x in 0..4 {
                disp.set(y, x, 0, if x < 2 { 1.0 } else { 2.0 });
            }
        }
        let flat = ImageGrid::filled(4, 4, 1, 0.5);
        let mut edged = ImageGrid::filled(4, 4, 1, 0.5);
        for y in 0..4 {
            for x in 2..4 {
                edged.set(y, x, 0, 1.0);
            }
        }
        let a = edge_aware_smoothness(&disp, &flat).unwrap();
        let b = edge_aware_smoothness(&disp, &edged).unwrap();
        assert!(b < a);
    }

    #[test]
    fn smoothness_zero_mean_rejected() {
        let img = ImageGrid::filled(4, 4, 1, 0.5);
        let disp = ImageGrid::filled(4, 4, 1, 0.0);
        assert_eq!(
            edge_aware_smoothness(&disp, &img),
            Err(Error::ZeroMeanDisparity)
        );
    }

    #[test]
    fn robust_penalty_values() {
        assert!((robust_penalty(0.0, 0.4, 0.1) - 0.3981072).abs() < 1e-6);
        assert!((robust_penalty(0.9, 0.4, 0.1) - 1.0).abs() < 1e-12);
        assert!((robust_penalty(-0.9, 0.4, 0.1) - 1.0).abs() < 1e-12);
        // Strictly increasing in |x|.
        let mut prev = robust_penalty(0.0, 0.4, 0.1);
        for i in 1..10 {
            let v = robust_penalty(i as f64 * 0.1, 0.4, 0.1);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn pyramid_floor_and_unit_base() {
        let full = ImageGrid::filled(8, 8, 1, 3.0);
        let scales = vec![full.clone(), full.clone(), full.clone(), full.clone()];
        let loss = pyramid_distillation_loss(&scales, &full, 0.4, 0.1).unwrap();
        let floor = 4.0 * robust_penalty(0.0, 0.4, 0.1);
        assert!((loss - floor).abs() < 1e-9);
        assert!((floor - 1.5924).abs() < 1e-3);

        let off = ImageGrid::filled(8, 8, 1, 3.9);
        let loss = pyramid_distillation_loss(&[full.clone()], &off, 0.4, 0.1).unwrap();
        assert!((loss - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pyramid_rejects_oversized_scale() {
        let full = ImageGrid::filled(4, 4, 1, 1.0);
        let big = ImageGrid::filled(8, 8, 1, 1.0);
        assert_eq!(
            pyramid_distillation_loss(&[big], &full, 0.4, 0.1),
            Err(Error::InvalidTarget)
        );
    }

    #[test]
    fn losses_invariant_under_horizontal_flip() {
        let mut rng = SplitMix64::new(10);
        let t = random_grid(&mut rng, 8, 8, 1);
        let s = random_grid(&mut rng, 8, 8, 1);
        let d = random_grid(&mut rng, 8, 8, 1);
        let a = photometric_loss(&t, &s, 0.85).unwrap();
        let b = photometric_loss(&hflip(&t), &hflip(&s), 0.85).unwrap();
        assert!((a - b).abs() < 1e-6);
        let a = adaptive_photometric_loss(&t, &s, &d, 0.85).unwrap();
        let b =
            adaptive_photometric_loss(&hflip(&t), &hflip(&s), &hflip(&d), 0.85).unwrap();
        assert!((a - b).abs() < 1e-6);
        let a = edge_aware_smoothness(&s, &t).unwrap();
        let b = edge_aware_smoothness(&hflip(&s), &hflip(&t)).unwrap();
        assert!((a - b).abs() < 1e-6);
    }
}

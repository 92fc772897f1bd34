//! Bilinear sampling, warping and upsampling.
//!
//! Coordinates follow the pixel-center convention: integer coordinates
//! land exactly on source pixels, the valid domain is
//! [0, W-1] x [0, H-1]. Out-of-bounds samples yield value 0 with the
//! validity bit cleared (zero padding with mask), never a border clamp.

use crate::error::{Error, Result};
use crate::grid::{FlowField, ImageGrid, SampleCoords};

/// Corner indices and interpolation weights for one sample location.
/// At exact integer coordinates the right-hand cell is used, except at
/// the far edge where only the left cell exists.
#[inline]
fn cell(coord: f64, size: usize) -> (usize, usize, f64) {
    let i0 = libm::floor(coord) as isize;
    let mut i0 = i0.clamp(0, size as isize - 1) as usize;
    let mut frac = coord - i0 as f64;
    let i1 = if i0 + 1 < size {
        i0 + 1
    } else if size >= 2 {
        i0 -= 1;
        frac = 1.0;
        i0 + 1
    } else {
        frac = 0.0;
        i0
    };
    (i0, i1, frac)
}

#[inline]
fn in_bounds(sx: f64, sy: f64, h: usize, w: usize) -> bool {
    sx >= 0.0 && sy >= 0.0 && sx <= (w - 1) as f64 && sy <= (h - 1) as f64
}

/// 4-neighbor bilinear interpolation of `src` at `coords`.
pub fn bilinear_sample(src: &ImageGrid, coords: &SampleCoords) -> ImageGrid {
    let (oh, ow) = (coords.height(), coords.width());
    let (h, w, c) = (src.height(), src.width(), src.channels());
    let mut out = ImageGrid::new(oh, ow, c);
    for y in 0..oh {
        for x in 0..ow {
            let (sx, sy) = coords.get(y, x);
            if !coords.is_valid(y, x) || !in_bounds(sx, sy, h, w) {
                out.set_valid(y, x, false);
                continue;
            }
            let (x0, x1, fx) = cell(sx, w);
            let (y0, y1, fy) = cell(sy, h);
            let ok = |yy: usize, xx: usize, wgt: f64| wgt == 0.0 || src.is_valid(yy, xx);
            if !(ok(y0, x0, (1.0 - fy) * (1.0 - fx))
                && ok(y0, x1, (1.0 - fy) * fx)
                && ok(y1, x0, fy * (1.0 - fx))
                && ok(y1, x1, fy * fx))
            {
                out.set_valid(y, x, false);
                continue;
            }
            for ch in 0..c {
                let a = src.get(y0, x0, ch) as f64;
                let b = src.get(y0, x1, ch) as f64;
                let cc = src.get(y1, x0, ch) as f64;
                let d = src.get(y1, x1, ch) as f64;
                let v = (1.0 - fy) * ((1.0 - fx) * a + fx * b) + fy * ((1.0 - fx) * cc + fx * d);
                out.set(y, x, ch, v as f32);
            }
        }
    }
    out
}

/// Analytic partial derivatives of the bilinear sample with respect to
/// the x and y sample coordinates, per pixel and channel.
pub fn bilinear_sample_grad(src: &ImageGrid, coords: &SampleCoords) -> (ImageGrid, ImageGrid) {
    let (oh, ow) = (coords.height(), coords.width());
    let (h, w, c) = (src.height(), src.width(), src.channels());
    let mut dx = ImageGrid::new(oh, ow, c);
    let mut dy = ImageGrid::new(oh, ow, c);
    for y in 0..oh {
        for x in 0..ow {
            let (sx, sy) = coords.get(y, x);
            if !coords.is_valid(y, x) || !in_bounds(sx, sy, h, w) {
                dx.set_valid(y, x, false);
                dy.set_valid(y, x, false);
                continue;
            }
            let (x0, x1, fx) = cell(sx, w);
            let (y0, y1, fy) = cell(sy, h);
            for ch in 0..c {
                let a = src.get(y0, x0, ch) as f64;
                let b = src.get(y0, x1, ch) as f64;
                let cc = src.get(y1, x0, ch) as f64;
                let d = src.get(y1, x1, ch) as f64;
                let gx = (1.0 - fy) * (b - a) + fy * (d - cc);
                let gy = (1.0 - fx) * (cc - a) + fx * (d - b);
                dx.set(y, x, ch, gx as f32);
                dy.set(y, x, ch, gy as f32);
            }
        }
    }
    (dx, dy)
}

/// Backward warp: samples `src` at the identity grid plus `flow`.
pub fn warp(src: &ImageGrid, flow: &FlowField) -> Result<ImageGrid> {
    flow.check_same_shape(src.height(), src.width())?;
    let (h, w) = (src.height(), src.width());
    let mut coords = SampleCoords::identity(h, w);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = flow.get(y, x);
            coords.set(y, x, x as f64 + u as f64, y as f64 + v as f64);
            coords.set_valid(y, x, flow.is_valid(y, x));
        }
    }
    Ok(bilinear_sample(src, &coords))
}

/// Bilinear upsampling with corner alignment: source corners map to
/// target corners under the pixel-center convention.
pub fn upsample(src: &ImageGrid, target_h: usize, target_w: usize) -> Result<ImageGrid> {
    let (h, w) = (src.height(), src.width());
    if target_h < h || target_w < w {
        return Err(Error::InvalidTarget);
    }
    let sx_scale = if target_w > 1 {
        (w - 1) as f64 / (target_w - 1) as f64
    } else {
        0.0
    };
    let sy_scale = if target_h > 1 {
        (h - 1) as f64 / (target_h - 1) as f64
    } else {
        0.0
    };
    let mut coords = SampleCoords::new(target_h, target_w);
    for y in 0..target_h {
        for x in 0..target_w {
            coords.set(y, x, x as f64 * sx_scale, y as f64 * sy_scale);
        }
    }
    Ok(bilinear_sample(src, &coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn ramp_x(h: usize, w: usize) -> ImageGrid {
        let mut g = ImageGrid::new(h, w, 1);
        for y in 0..h {
            for x in 0..w {
                g.set(y, x, 0, x as f32);
            }
        }
        g
    }

    fn random_grid(rng: &mut SplitMix64, h: usize, w: usize, c: usize) -> ImageGrid {
        let mut g = ImageGrid::new(h, w, c);
        for y in 0..h {
            for x in 0..w {
                for ch in 0..c {
                    g.set(y, x, ch, rng.uniform(0.0, 1.0) as f32);
                }
            }
        }
        g
    }

    #[test]
    fn integer_coords_hit_source_pixels() {
        let mut rng = SplitMix64::new(3);
        let src = random_grid(&mut rng, 5, 7, 2);
        let coords = SampleCoords::identity(5, 7);
        let out = bilinear_sample(&src, &coords);
        assert_eq!(out, src);
    }

    #[test]
    fn midpoint_of_2x2_block() {
        let src = ImageGrid::from_vec(2, 2, 1, vec![0.0, 1.0, 2.0, 3.0]);
        let mut coords = SampleCoords::new(1, 1);
        coords.set(0, 0, 0.5, 0.5);
        let out = bilinear_sample(&src, &coords);
        assert_eq!(out.get(0, 0, 0), 1.5);
        assert!(out.is_valid(0, 0));
    }

    #[test]
    fn out_of_bounds_yields_zero_and_invalid() {
        let src = ImageGrid::filled(4, 4, 1, 7.0);
        let mut coords = SampleCoords::new(1, 2);
        coords.set(0, 0, -1.0, -1.0);
        coords.set(0, 1, 3.0001, 1.0);
        let out = bilinear_sample(&src, &coords);
        assert_eq!(out.get(0, 0, 0), 0.0);
        assert!(!out.is_valid(0, 0));
        assert!(!out.is_valid(0, 1));
    }

    #[test]
    fn affine_grids_sampled_exactly() {
        // Bilinear interpolation is exact on affine functions of (x, y).
        let (h, w) = (6, 8);
        let mut src = ImageGrid::new(h, w, 1);
        for y in 0..h {
            for x in 0..w {
                src.set(y, x, 0, (1.5 * x as f64 - 0.75 * y as f64 + 2.0) as f32);
            }
        }
        let mut rng = SplitMix64::new(9);
        for _ in 0..200 {
            let sx = rng.uniform(0.0, (w - 1) as f64);
            let sy = rng.uniform(0.0, (h - 1) as f64);
            let mut coords = SampleCoords::new(1, 1);
            coords.set(0, 0, sx, sy);
            let out = bilinear_sample(&src, &coords);
            let expect = 1.5 * sx - 0.75 * sy + 2.0;
            assert!((out.get(0, 0, 0) as f64 - expect).abs() < 1e-5);
        }
    }

    #[test]
    fn sample_bounded_by_corner_values() {
        let mut rng = SplitMix64::new(11);
        let src = random_grid(&mut rng, 8, 8, 1);
        for _ in 0..200 {
            let sx = rng.uniform(0.0, 7.0);
            let sy = rng.uniform(0.0, 7.0);
            let mut coords = SampleCoords::new(1, 1);
            coords.set(0, 0, sx, sy);
            let out = bilinear_sample(&src, &coords);
            let x0 = sx.floor() as usize;
            let y0 = sy.floor() as usize;
            let x1 = (x0 + 1).min(7);
            let y1 = (y0 + 1).min(7);
            let vals = [
                src.get(y0, x0, 0),
                src.get(y0, x1, 0),
                src.get(y1, x0, 0),
                src.get(y1, x1, 0),
            ];
            let lo = vals.iter().cloned().fold(f32::INFINITY, f32::min);
            let hi = vals.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
            let v = out.get(0, 0, 0);
            assert!(v >= lo - 1e-6 && v <= hi + 1e-6);
        }
    }

    #[test]
    fn grad_constant_grid_is_zero() {
        let src = ImageGrid::filled(4, 4, 1, 3.0);
        let mut coords = SampleCoords::new(1, 1);
        coords.set(0, 0, 1.3, 2.7);
        let (dx, dy) = bilinear_sample_grad(&src, &coords);
        assert_eq!(dx.get(0, 0, 0), 0.0);
        assert_eq!(dy.get(0, 0, 0), 0.0);
    }

    #[test]
    fn grad_linear_ramp() {
        let src = ramp_x(4, 6);
        for &(sx, sy) in &[(1.0, 1.0), (2.5, 1.5), (3.0, 2.0)] {
            let mut coords = SampleCoords::new(1, 1);
            coords.set(0, 0, sx, sy);
            let (dx, dy) = bilinear_sample_grad(&src, &coords);
            assert!((dx.get(0, 0, 0) - 1.0).abs() < 1e-6);
            assert!(dy.get(0, 0, 0).abs() < 1e-6);
        }
    }

    #[test]
    fn grad_matches_central_finite_differences() {
        let mut rng = SplitMix64::new(17);
        let src = random_grid(&mut rng, 16, 16, 1);
        // Step size large enough that f32 quantisation of the sampled
        // values stays negligible, small enough to stay inside one cell.
        let h = 1e-2;
        let mut checked = 0;
        while checked < 200 {
            let sx = rng.uniform(1.0, 14.0);
            let sy = rng.uniform(1.0, 14.0);
            // Keep away from integer-coordinate kinks.
            let frac = |t: f64| t - t.floor();
            if frac(sx) < 0.02 || frac(sx) > 0.98 || frac(sy) < 0.02 || frac(sy) > 0.98 {
                continue;
            }
            let sample_at = |x: f64, y: f64| {
                let mut c = SampleCoords::new(1, 1);
                c.set(0, 0, x, y);
                bilinear_sample(&src, &c).get(0, 0, 0) as f64
            };
            let mut c = SampleCoords::new(1, 1);
            c.set(0, 0, sx, sy);
            let (dx, dy) = bilinear_sample_grad(&src, &c);
            let fdx = (sample_at(sx + h, sy) - sample_at(sx - h, sy)) / (2.0 * h);
            let fdy = (sample_at(sx, sy + h) - sample_at(sx, sy - h)) / (2.0 * h);
            // f32 quantisation of the samples leaves ~6e-6 of absolute
            // noise in the finite difference at this step size.
            let close = |a: f64, b: f64| (a - b).abs() < 1e-5 + 1e-3 * b.abs();
            assert!(close(dx.get(0, 0, 0) as f64, fdx), "dx {} vs {}", dx.get(0, 0, 0), fdx);
            assert!(close(dy.get(0, 0, 0) as f64, fdy), "dy {} vs {}", dy.get(0, 0, 0), fdy);
            checked += 1;
        }
    }

    #[test]
    fn warp_zero_flow_is_identity() {
        let mut rng = SplitMix64::new(23);
        let src = random_grid(&mut rng, 6, 9, 3);
        let flow = FlowField::zeros(6, 9);
        let out = warp(&src, &flow).unwrap();
        assert_eq!(out, src);
    }

    #[test]
    fn warp_integer_flow_on_ramp() {
        let src = ramp_x(4, 6);
        let mut flow = FlowField::zeros(4, 6);
        for y in 0..4 {
            for x in 0..6 {
                flow.set(y, x, 1.0, 0.0);
            }
        }
        let out = warp(&src, &flow).unwrap();
        for y in 0..4 {
            for x in 0..5 {
                assert_eq!(out.get(y, x, 0), (x + 1) as f32);
                assert!(out.is_valid(y, x));
            }
            assert!(!out.is_valid(y, 5));
        }
    }

    #[test]
    fn warp_shape_mismatch() {
        let src = ImageGrid::new(4, 4, 1);
        let flow = FlowField::zeros(3, 4);
        assert!(matches!(warp(&src, &flow), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn upsample_identity_and_constant() {
        let mut rng = SplitMix64::new(29);
        let src = random_grid(&mut rng, 3, 5, 2);
        assert_eq!(upsample(&src, 3, 5).unwrap(), src);
        let c = ImageGrid::filled(2, 2, 1, 0.7);
        let up = upsample(&c, 9, 13).unwrap();
        for y in 0..9 {
            for x in 0..13 {
                assert!((up.get(y, x, 0) - 0.7).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn upsample_2x2_to_4x4_table() {
        // Hand-computed corner-aligned bilinear table for {0,1;2,3}.
        let src = ImageGrid::from_vec(2, 2, 1, vec![0.0, 1.0, 2.0, 3.0]);
        let up = upsample(&src, 4, 4).unwrap();
        let third = 1.0f64 / 3.0;
        for y in 0..4 {
            for x in 0..4 {
                let expect = (2.0 * y as f64 + x as f64) * third;
                assert!(
                    (up.get(y, x, 0) as f64 - expect).abs() < 1e-6,
                    "({y},{x}): {} vs {expect}",
                    up.get(y, x, 0)
                );
            }
        }
    }

    #[test]
    fn upsample_rejects_shrinking() {
        let src = ImageGrid::new(4, 4, 1);
        assert_eq!(upsample(&src, 3, 4), Err(Error::InvalidTarget));
    }
}

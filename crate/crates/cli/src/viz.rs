//! Optical-flow visualization with the standard 55-entry color wheel
//! (Baker et al. interpolated hue circle). Vectors are scaled by the
//! field's maximum magnitude unless a fixed normalization is given;
//! invalid pixels render black.

use dscv_core::FlowField;

const RY: usize = 15;
const YG: usize = 6;
const GC: usize = 4;
const CB: usize = 11;
const BM: usize = 13;
const MR: usize = 6;
const NCOLS: usize = RY + YG + GC + CB + BM + MR;

fn color_wheel() -> [[f32; 3]; NCOLS] {
    let mut wheel = [[0.0f32; 3]; NCOLS];
    let mut k = 0;
    let mut ramp = |count: usize, from: usize, to: usize, rising: bool| {
        for i in 0..count {
            let t = i as f32 / count as f32;
            let mut c = [0.0f32; 3];
            c[from] = if rising { 255.0 } else { 255.0 - 255.0 * t };
            c[to] = if rising { 255.0 * t } else { 255.0 };
            wheel[k] = c;
            k += 1;
        }
    };
    ramp(RY, 0, 1, true); // red -> yellow: green ramps up
    ramp(YG, 0, 1, false); // yellow -> green: red ramps down
    ramp(GC, 1, 2, true); // green -> cyan: blue ramps up
    ramp(CB, 1, 2, false); // cyan -> blue: green ramps down
    ramp(BM, 2, 0, true); // blue -> magenta: red ramps up
    ramp(MR, 2, 0, false); // magenta -> red: blue ramps down
    wheel
}

fn flow_color(u: f32, v: f32, wheel: &[[f32; 3]; NCOLS]) -> [u8; 3] {
    let rad = (u * u + v * v).sqrt();
    let angle = (-v as f64).atan2(-u as f64) / std::f64::consts::PI;
    let fk = (angle + 1.0) / 2.0 * (NCOLS as f64 - 1.0);
    let k0 = fk.floor() as usize;
    let k1 = (k0 + 1) % NCOLS;
    let f = (fk - k0 as f64) as f32;
    let mut out = [0u8; 3];
    for ch in 0..3 {
        let col0 = wheel[k0][ch] / 255.0;
        let col1 = wheel[k1][ch] / 255.0;
        let mut col = (1.0 - f) * col0 + f * col1;
        if rad <= 1.0 {
            // Saturate towards white at the wheel center.
            col = 1.0 - rad * (1.0 - col);
        } else {
            col *= 0.75;
        }
        out[ch] = (255.0 * col).round() as u8;
    }
    out
}

/// Renders a flow field to interleaved RGB bytes.
/// `max_flow`: magnitude mapped to full saturation; `None` picks the
/// field's own maximum (minimum 1e-6 to avoid dividing by zero).
pub fn flow_to_rgb(flow: &FlowField, max_flow: Option<f64>) -> Vec<u8> {
    let (h, w) = (flow.height(), flow.width());
    let wheel = color_wheel();
    let norm = max_flow.unwrap_or_else(|| {
        let mut m = 0.0f64;
        for y in 0..h {
            for x in 0..w {
                if flow.is_valid(y, x) {
                    let (u, v) = flow.get(y, x);
                    m = m.max(((u * u + v * v) as f64).sqrt());
                }
            }
        }
        m
    });
    let norm = norm.max(1e-6) as f32;
    let mut rgb = Vec::with_capacity(3 * h * w);
    for y in 0..h {
        for x in 0..w {
            if flow.is_valid(y, x) {
                let (u, v) = flow.get(y, x);
                rgb.extend_from_slice(&flow_color(u / norm, v / norm, &wheel));
            } else {
                rgb.extend_from_slice(&[0, 0, 0]);
            }
        }
    }
    rgb
}

//! File-format round trips, byte-layout checks, and malformed-file
//! rejection.

use std::fs;

use dscv::error::{CliError, FormatError};
use dscv::formats::{dscv as dscv_fmt, dsfw, flo, pfm};
use dscv_core::costvolume::{CostVolume, DepthHypothesisSet, Spacing};
use dscv_core::fusion::FusionWeights;
use dscv_core::{FlowField, ImageGrid};

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = tempfile::tempdir().unwrap().keep();
    dir.join(name)
}

#[test]
fn flo_round_trip_bitwise() {
    let mut flow = FlowField::zeros(5, 7);
    for y in 0..5 {
        for x in 0..7 {
            flow.set(y, x, (y * 7 + x) as f32 * 0.37, -(x as f32) * 1.5);
        }
    }
    flow.set_valid(2, 3, false);
    let path = tmp("a.flo");
    flo::write_flo(&path, &flow).unwrap();
    let back = flo::read_flo(&path).unwrap();
    // Invalid pixels come back invalid with zeroed components.
    let mut expect = flow.clone();
    expect.set(2, 3, 0.0, 0.0);
    expect.set_valid(2, 3, false);
    assert_eq!(back, expect);
    // Re-writing is byte-stable.
    let again = tmp("b.flo");
    flo::write_flo(&again, &back).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn flo_byte_count_2x1() {
    let mut flow = FlowField::zeros(1, 2);
    flow.set(0, 0, 1.0, 3.0);
    flow.set(0, 1, 2.0, 4.0);
    let path = tmp("c.flo");
    flo::write_flo(&path, &flow).unwrap();
    assert_eq!(fs::read(&path).unwrap().len(), 28);
}

#[test]
fn flo_bad_magic_rejected() {
    let path = tmp("bad.flo");
    let mut bytes = vec![];
    bytes.extend_from_slice(&0.0f32.to_le_bytes());
    bytes.extend_from_slice(&1i32.to_le_bytes());
    bytes.extend_from_slice(&1i32.to_le_bytes());
    bytes.extend_from_slice(&[0u8; 8]);
    fs::write(&path, bytes).unwrap();
    match flo::read_flo(&path) {
        Err(CliError::Format(FormatError::BadMagic(_))) => {}
        other => panic!("expected BadMagic, got {other:?}"),
    }
}

#[test]
fn flo_truncation_rejected() {
    let mut flow = FlowField::zeros(3, 3);
    flow.set(1, 1, 2.0, 2.0);
    let path = tmp("trunc.flo");
    flo::write_flo(&path, &flow).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 4);
    fs::write(&path, bytes).unwrap();
    match flo::read_flo(&path) {
        Err(CliError::Format(FormatError::TruncatedFile(_))) => {}
        other => panic!("expected TruncatedFile, got {other:?}"),
    }
}

#[test]
fn pfm_round_trip_bitwise() {
    let mut img = ImageGrid::new(4, 5, 1);
    for i in 0..20 {
        img.data_mut()[i] = (i as f32).sin() * 7.3;
    }
    let path = tmp("a.pfm");
    pfm::write_pfm(&path, &img).unwrap();
    assert_eq!(pfm::read_pfm(&path).unwrap(), img);
}

#[test]
fn pfm_byte_count_3x2() {
    let img = ImageGrid::filled(2, 3, 1, 1.5);
    let path = tmp("b.pfm");
    pfm::write_pfm(&path, &img).unwrap();
    let bytes = fs::read(&path).unwrap();
    let header = b"Pf\n3 2\n-1.0\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 24);
}

#[test]
fn pfm_big_endian_read() {
    // Same 1x2 map, positive scale => big-endian payload, bottom-up rows.
    let path = tmp("be.pfm");
    let mut bytes = b"Pf\n2 1\n1.0\n".to_vec();
    bytes.extend_from_slice(&1.25f32.to_be_bytes());
    bytes.extend_from_slice(&(-2.5f32).to_be_bytes());
    fs::write(&path, bytes).unwrap();
    let img = pfm::read_pfm(&path).unwrap();
    assert_eq!(img.get(0, 0, 0), 1.25);
    assert_eq!(img.get(0, 1, 0), -2.5);
    // Re-written files are normalized to little-endian.
    let out = tmp("le.pfm");
    pfm::write_pfm(&out, &img).unwrap();
    let rewritten = fs::read(&out).unwrap();
    assert!(rewritten.starts_with(b"Pf\n2 1\n-1.0\n"));
}

#[test]
fn pfm_color_header_rejected() {
    let path = tmp("color.pfm");
    fs::write(&path, b"PF\n1 1\n-1.0\naaaaaaaaaaaa").unwrap();
    match pfm::read_pfm(&path) {
        Err(CliError::Format(FormatError::BadHeader(_))) => {}
        other => panic!("expected BadHeader, got {other:?}"),
    }
}

fn sample_cv() -> CostVolume {
    let hyps = DepthHypothesisSet::from_values(vec![1.0, 2.0, 4.0], Spacing::InverseLinear).unwrap();
    let n = 3 * 2 * 4;
    let costs: Vec<f32> = (0..n).map(|i| i as f32 * 0.125).collect();
    let valid: Vec<bool> = (0..n).map(|i| i % 5 != 0).collect();
    CostVolume::from_parts(hyps, 2, 4, costs, valid)
}

#[test]
fn dscv_round_trip_bitwise() {
    let cv = sample_cv();
    let path = tmp("a.dscv");
    dscv_fmt::write_dscv(&path, &cv).unwrap();
    let back = dscv_fmt::read_dscv(&path).unwrap();
    assert_eq!(back, cv);
    let again = tmp("b.dscv");
    dscv_fmt::write_dscv(&again, &back).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn dscv_header_layout() {
    let cv = sample_cv();
    let path = tmp("c.dscv");
    dscv_fmt::write_dscv(&path, &cv).unwrap();
    let bytes = fs::read(&path).unwrap();
    let (n, h, w) = (3usize, 2usize, 4usize);
    // magic + version + dims + depths = 4+4+12+4N before the cost payload.
    let header = 4 + 4 + 12 + 4 * n;
    assert_eq!(&bytes[..4], b"DSCV");
    assert_eq!(bytes.len(), header + 4 * n * h * w + (n * h * w).div_ceil(8));
    let first_cost = f32::from_le_bytes(bytes[header..header + 4].try_into().unwrap());
    assert_eq!(first_cost, 0.0);
}

#[test]
fn dscv_version_2_rejected() {
    let cv = sample_cv();
    let path = tmp("v2.dscv");
    dscv_fmt::write_dscv(&path, &cv).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    bytes[4..8].copy_from_slice(&2u32.to_le_bytes());
    fs::write(&path, bytes).unwrap();
    match dscv_fmt::read_dscv(&path) {
        Err(CliError::Format(FormatError::VersionMismatch { got: 2, .. })) => {}
        other => panic!("expected VersionMismatch, got {other:?}"),
    }
}

#[test]
fn dscv_bad_magic_rejected() {
    let path = tmp("bad.dscv");
    fs::write(&path, b"NOPE\x01\x00\x00\x00").unwrap();
    match dscv_fmt::read_dscv(&path) {
        Err(CliError::Format(FormatError::BadMagic(_))) => {}
        other => panic!("expected BadMagic, got {other:?}"),
    }
}

#[test]
fn dscv_linear_spacing_survives() {
    let hyps = DepthHypothesisSet::from_values(vec![2.0, 4.0, 6.0, 8.0], Spacing::Linear).unwrap();
    let n = 4 * 1 * 2;
    let cv = CostVolume::from_parts(hyps, 1, 2, vec![0.5; n], vec![true; n]);
    let path = tmp("lin.dscv");
    dscv_fmt::write_dscv(&path, &cv).unwrap();
    assert_eq!(
        dscv_fmt::read_dscv(&path).unwrap().hypotheses().spacing(),
        Spacing::Linear
    );
}

#[test]
fn dsfw_round_trip_bitwise() {
    let n = 4;
    let weights: Vec<f32> = (0..2 * n * n).map(|i| (i as f32 * 0.01).cos()).collect();
    let bias: Vec<f32> = (0..n).map(|i| i as f32 - 1.5).collect();
    let fw = FusionWeights::new(n, weights, bias).unwrap();
    let path = tmp("a.dsfw");
    dsfw::write_dsfw(&path, &fw).unwrap();
    let back = dsfw::read_dsfw(&path).unwrap();
    assert_eq!(back.weights(), fw.weights());
    assert_eq!(back.bias(), fw.bias());
    assert_eq!(fs::read(&path).unwrap().len(), 12 + 4 * (2 * n * n + n));
}

#[test]
fn dsfw_bad_magic_and_version() {
    let path = tmp("bad.dsfw");
    fs::write(&path, b"WRNG\x01\x00\x00\x00\x01\x00\x00\x00").unwrap();
    assert!(matches!(
        dsfw::read_dsfw(&path),
        Err(CliError::Format(FormatError::BadMagic(_)))
    ));
    let fw = FusionWeights::averaging(2);
    dsfw::write_dsfw(&path, &fw).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    bytes[4..8].copy_from_slice(&9u32.to_le_bytes());
    fs::write(&path, bytes).unwrap();
    assert!(matches!(
        dsfw::read_dsfw(&path),
        Err(CliError::Format(FormatError::VersionMismatch { got: 9, .. }))
    ));
}

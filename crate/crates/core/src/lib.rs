//! Multi-frame plane-sweep cost-volume engine.
//!
//! Builds static (ego-motion only) and dynamic (ego-motion plus residual
//! optical flow) matching cost volumes, fuses them with occlusion-aware
//! selection, and provides the photometric losses and depth evaluation
//! metrics that go with them. A deterministic synthetic-scene renderer
//! supplies ground truth for every quantity so the whole pipeline is
//! testable without any learned components.
//!
//! The crate is `no_std` (with `alloc`); all IO and file formats live in
//! the companion `dscv` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod costvolume;
pub mod error;
pub mod fusion;
pub mod geometry;
pub mod grid;
pub mod metrics;
pub mod photometric;
pub mod rng;
pub mod sampler;
pub mod synthetic;

pub use error::{Error, Result};
pub use grid::{FlowField, ImageGrid, SampleCoords};

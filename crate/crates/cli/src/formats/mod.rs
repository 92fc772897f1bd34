pub mod dscv;
pub mod dsfw;
pub mod flo;
pub mod pfm;
pub mod raster;

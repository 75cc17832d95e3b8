//! Quality assessment toolkit for MRI reconstructions.
//!
//! The crate is organised in layers:
//!
//! * [`imgcore`] holds the raster containers and file formats.
//! * [`sigproc`] provides convolution, pyramids, transforms and gradients.
//! * [`frmetrics`] implements full-reference metrics on image pairs plus
//!   BRISQUE feature extraction.
//! * [`distmetrics`] implements the tile-based distribution metrics
//!   (FID, KID, MSID, Inception Score).
//! * [`degrade`] simulates scan acceleration, rigid motion and noise in
//!   k-space / image space.
//! * [`evalstat`] correlates metric outputs with subjective votes.

pub mod degrade;
pub mod distmetrics;
mod error;
pub mod evalstat;
pub mod frmetrics;
pub mod imgcore;
pub mod sigproc;

pub use error::{Error, Result};
pub use imgcore::{GrayImage, ImagePair, KSpaceImage, Plane};

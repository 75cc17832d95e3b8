//! Forward models of the three corruption families: Cartesian
//! undersampling, sudden rigid motion during the scan, and additive
//! Gaussian noise.
//!
//! Everything operates on a single-coil magnitude image and its own
//! centred spectrum. Phase-encoding lines are k-space columns. All
//! randomness comes from explicit seeds.

mod mask;
mod motion;
mod noise;

pub use mask::{cartesian_mask, default_center_fraction, simulate_acceleration, simulate_with_mask, undersample, CartesianMask};
pub use motion::{sample_motion_params, simulate_motion, LineOrdering, MotionParams};
pub use noise::{add_noise, estimate_background_sigma, NoiseParams, Roi};

use crate::{GrayImage, Plane, Result};

/// Clamps a plane into `[0, range]` and wraps it as an image.
pub(crate) fn clamp_to_image(p: &Plane, range: f32) -> Result<GrayImage> {
    let r = range as f64;
    GrayImage::from_plane(&p.map(|v| v.clamp(0.0, r)), range)
}

use super::clamp_to_image;
use crate::sigproc::{dft2, idft2_magnitude};
use crate::{Error, GrayImage, KSpaceImage, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

pub const MIN_MASK_WIDTH: usize = 16;

/// Column sampling pattern along the phase-encoding axis.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianMask {
    pub sampled: Vec<bool>,
    pub acceleration: f64,
    pub center_fraction: f64,
}

impl CartesianMask {
    /// Mask that keeps every column.
    pub fn full(width: usize) -> Self {
        Self {
            sampled: vec![true; width],
            acceleration: 1.0,
            center_fraction: 1.0,
        }
    }

    pub fn width(&self) -> usize {
        self.sampled.len()
    }

    pub fn count(&self) -> usize {
        self.sampled.iter().filter(|&&s| s).count()
    }

    /// `column,sampled` with 0/1 values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("column,sampled\n");
        for (i, &s) in self.sampled.iter().enumerate() {
            let _ = writeln!(out, "{i},{}", u8::from(s));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Centre fraction paired with an acceleration: 8% at 4x, 4% at 8x.
pub fn default_center_fraction(acceleration: f64) -> f64 {
    0.32 / acceleration
}

/// Number of centre columns: `ceil(fraction * width)`, ignoring round-off
/// just above an integer.
pub(crate) fn center_count(width: usize, fraction: f64) -> usize {
    (fraction * width as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Builds a mask with a fully sampled centre block and random outer
/// columns, `round(width / acceleration)` in total (ties to even).
pub fn cartesian_mask(width: usize, acceleration: f64, center_fraction: f64, seed: u64) -> Result<CartesianMask> {
    if width < MIN_MASK_WIDTH {
        return Err(Error::TooSmall {
            what: "mask width",
            got: width,
            need: MIN_MASK_WIDTH,
        });
    }
    if !(acceleration.is_finite() && acceleration >= 1.0) {
        return Err(Error::InvalidParameter(format!("acceleration {acceleration} must be >= 1")));
    }
    if !(center_fraction > 0.0 && center_fraction < 1.0 / acceleration) {
        return Err(Error::InvalidParameter(format!(
            "infeasible center fraction {center_fraction} for acceleration {acceleration}"
        )));
    }
    let n_center = center_count(width, center_fraction);
    let total = (width as f64 / acceleration).round_ties_even() as usize;
    if n_center > total {
        return Err(Error::InvalidParameter(format!(
            "infeasible center fraction: {n_center} centre columns exceed {total} sampled"
        )));
    }
    let mut sampled = vec![false; width];
    let pad = (width - n_center + 1) / 2;
    sampled[pad..pad + n_center].iter_mut().for_each(|s| *s = true);
    let outer: Vec<usize> = (0..width).filter(|&i| !sampled[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in sample(&mut rng, outer.len(), total - n_center) {
        sampled[outer[i]] = true;
    }
    Ok(CartesianMask {
        sampled,
        acceleration,
        center_fraction,
    })
}

/// Zeroes every column the mask does not sample.
pub fn undersample(k: &KSpaceImage, m: &CartesianMask) -> Result<KSpaceImage> {
    if m.width() != k.width() {
        return Err(Error::DimensionMismatch(format!(
            "mask width {} vs k-space width {}",
            m.width(),
            k.width()
        )));
    }
    let mut out = k.clone();
    let w = k.width();
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        if !m.sampled[i % w] {
            *v = Default::default();
        }
    }
    Ok(out)
}

/// Magnitude image reconstructed from the masked spectrum, clamped to the
/// image range.
pub fn simulate_with_mask(img: &GrayImage, m: &CartesianMask) -> Result<GrayImage> {
    let k = undersample(&dft2(&img.to_plane()), m)?;
    clamp_to_image(&idft2_magnitude(&k), img.data_range())
}

pub fn simulate_acceleration(img: &GrayImage, acceleration: f64, center_fraction: f64, seed: u64) -> Result<GrayImage> {
    let m = cartesian_mask(img.width(), acceleration, center_fraction, seed)?;
    simulate_with_mask(img, &m)
}

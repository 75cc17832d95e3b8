use super::clamp_to_image;
use crate::sigproc::{dft2, idft2_magnitude, rotate_bilinear};
use crate::{Error, GrayImage, KSpaceImage, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;
use std::str::FromStr;

/// Order in which echo trains sweep the acquired lines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LineOrdering {
    /// Train `s` holds a contiguous run of lines.
    #[default]
    Sequential,
    /// Train `s` holds every `S`-th line starting at `s`, `S` being the
    /// number of trains.
    Interleaved,
}

impl LineOrdering {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sequential => "sequential",
            Self::Interleaved => "interleaved",
        }
    }
}

impl FromStr for LineOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Self::Sequential),
            "interleaved" => Ok(Self::Interleaved),
            _ => Err(Error::InvalidParameter(format!("unknown line ordering '{s}'"))),
        }
    }
}

/// One sudden rigid movement during the scan.
///
/// Translation and rotation are stored unscaled; the amplification factor
/// is applied by [`MotionParams::effective_translation`] and
/// [`MotionParams::effective_rotation`].
#[derive(Clone, Debug, PartialEq)]
pub struct MotionParams {
    pub echo_train_length: usize,
    /// Outermost k-space lines not on the acquisition timeline; they keep
    /// their pre-motion values. Split evenly between both edges.
    pub zero_pad: usize,
    /// Fraction of echo trains acquired before the movement.
    pub event_fraction: f64,
    /// Pixels, `(dx, dy)`.
    pub translation: (f64, f64),
    pub rotation_deg: f64,
    /// Offset of the rotation centre from the image centre, in pixels.
    pub rotation_center: (f64, f64),
    pub amplification: f64,
    pub ordering: LineOrdering,
}

impl MotionParams {
    /// No movement at all.
    pub fn none() -> Self {
        Self {
            echo_train_length: 16,
            zero_pad: 0,
            event_fraction: 0.5,
            translation: (0.0, 0.0),
            rotation_deg: 0.0,
            rotation_center: (0.0, 0.0),
            amplification: 1.0,
            ordering: LineOrdering::Sequential,
        }
    }

    pub fn effective_translation(&self) -> (f64, f64) {
        (self.translation.0 * self.amplification, self.translation.1 * self.amplification)
    }

    pub fn effective_rotation(&self) -> f64 {
        self.rotation_deg * self.amplification
    }

    /// Same movement with a different amplification.
    pub fn with_amplification(&self, amplification: f64) -> Self {
        Self {
            amplification,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.echo_train_length == 0 {
            return Err(Error::InvalidParameter("echo train length must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.event_fraction) {
            return Err(Error::InvalidParameter(format!(
                "event fraction {} outside [0, 1]",
                self.event_fraction
            )));
        }
        let finite = [
            self.translation.0,
            self.translation.1,
            self.rotation_deg,
            self.rotation_center.0,
            self.rotation_center.1,
            self.amplification,
        ];
        if finite.iter().any(|v| !v.is_finite()) || self.amplification < 0.0 {
            return Err(Error::InvalidParameter("motion parameters must be finite".into()));
        }
        Ok(())
    }
}

/// Uniform draws over the published ranges: train length 8–32 lines, zero
/// padding 0–100 lines, event at 1/3–7/8 of the scan, translation of
/// magnitude 1–4 px in a uniform direction, rotation 0.5–4 degrees about a
/// centre offset by 0–100 px on each axis.
pub fn sample_motion_params(seed: u64, amplification: f64) -> Result<MotionParams> {
    if !(1.0..=3.0).contains(&amplification) {
        return Err(Error::InvalidParameter(format!(
            "motion amplification {amplification} outside [1, 3]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let echo_train_length = rng.random_range(8..=32);
    let zero_pad = rng.random_range(0..=100);
    let event_fraction = rng.random_range(1.0 / 3.0..=7.0 / 8.0);
    let magnitude = rng.random_range(1.0..=4.0);
    let angle = rng.random_range(0.0..2.0 * PI);
    let rotation_deg = rng.random_range(0.5..=4.0);
    let rotation_center = (rng.random_range(0.0..=100.0), rng.random_range(0.0..=100.0));
    Ok(MotionParams {
        echo_train_length,
        zero_pad,
        event_fraction,
        translation: (magnitude * angle.cos(), magnitude * angle.sin()),
        rotation_deg,
        rotation_center,
        amplification,
        ordering: LineOrdering::Sequential,
    })
}

/// Echo trains in acquisition order, each a list of k-space columns.
pub(crate) fn echo_trains(width: usize, p: &MotionParams) -> Vec<Vec<usize>> {
    let pad = p.zero_pad.min(width / 2);
    let left = pad / 2;
    let lines: Vec<usize> = (left..width - (pad - left)).collect();
    let trains = lines.len().div_ceil(p.echo_train_length);
    match p.ordering {
        LineOrdering::Sequential => lines.chunks(p.echo_train_length).map(<[usize]>::to_vec).collect(),
        LineOrdering::Interleaved => (0..trains)
            .map(|s| lines.iter().copied().skip(s).step_by(trains).collect())
            .collect(),
    }
}

/// Sudden-motion corruption.
///
/// Echo trains acquired from the event onwards (train index
/// `>= floor(event_fraction * trains)`, so the shot during which the
/// subject moves counts as corrupted) are taken from the spectrum of the
/// moved image: rotated with bilinear resampling and zero fill, then
/// translated by a linear phase ramp. The result is the clamped magnitude
/// of the spliced spectrum.
pub fn simulate_motion(img: &GrayImage, p: &MotionParams) -> Result<GrayImage> {
    p.validate()?;
    let (w, h) = (img.width(), img.height());
    if w < 2 || h < 2 {
        return Err(Error::TooSmall {
            what: "image side for motion simulation",
            got: w.min(h),
            need: 2,
        });
    }
    let plane = img.to_plane();
    let clean = dft2(&plane);
    let trains = echo_trains(w, p);
    let first_moved = (p.event_fraction * trains.len() as f64).floor() as usize;
    if first_moved >= trains.len() {
        return clamp_to_image(&idft2_magnitude(&clean), img.data_range());
    }
    let moved = moved_spectrum(&plane, p);
    let mut out = clean;
    for train in &trains[first_moved..] {
        for &x in train {
            out.copy_column_from(&moved, x);
        }
    }
    clamp_to_image(&idft2_magnitude(&out), img.data_range())
}

fn moved_spectrum(plane: &crate::Plane, p: &MotionParams) -> KSpaceImage {
    let (w, h) = (plane.width(), plane.height());
    let cx = w as f64 / 2.0 + p.rotation_center.0;
    let cy = h as f64 / 2.0 + p.rotation_center.1;
    let rotated = rotate_bilinear(plane, p.effective_rotation(), cx, cy);
    let mut k = dft2(&rotated);
    let (dx, dy) = p.effective_translation();
    if dx != 0.0 || dy != 0.0 {
        let (hw, hh) = ((w / 2) as f64, (h / 2) as f64);
        for (i, v) in k.values_mut().iter_mut().enumerate() {
            let kx = (i % w) as f64 - hw;
            let ky = (i / w) as f64 - hh;
            let phase = -2.0 * PI * (kx * dx / w as f64 + ky * dy / h as f64);
            *v *= Complex64::from_polar(1.0, phase);
        }
    }
    k
}

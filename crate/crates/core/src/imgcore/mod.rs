//! Raster containers shared by every other module.
//!
//! [`GrayImage`] is the storage type (32-bit samples, what files hold);
//! [`Plane`] is the 64-bit working buffer every computation runs on.

mod io;

pub use io::{load_image, save_image, ImageFormat};

use crate::{Error, Result};
use rustfft::num_complex::Complex64;

/// 2-D grayscale raster with 32-bit samples in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f32>,
    data_range: f32,
}

impl GrayImage {
    /// Builds an image with `data_range = 1.0`.
    pub fn new(width: usize, height: usize, pixels: Vec<f32>) -> Result<Self> {
        Self::with_range(width, height, pixels, 1.0)
    }

    pub fn with_range(width: usize, height: usize, pixels: Vec<f32>, data_range: f32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidInput("image dimensions overflow".into()))?;
        if pixels.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} image needs {expected} pixels, got {}",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite pixel at index {i}")));
        }
        if !(data_range.is_finite() && data_range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "data range must be positive, got {data_range}"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            data_range,
        })
    }

    /// Image filled with a single value.
    pub fn filled(width: usize, height: usize, value: f32) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Converts a working plane back to storage precision.
    pub fn from_plane(plane: &Plane, data_range: f32) -> Result<Self> {
        let pixels = plane.data().iter().map(|&v| v as f32).collect();
        Self::with_range(plane.width(), plane.height(), pixels, data_range)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn data_range(&self) -> f32 {
        self.data_range
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    /// True when every pixel lies in `[0, data_range]`.
    pub fn is_in_range(&self) -> bool {
        self.pixels
            .iter()
            .all(|&p| (0.0..=self.data_range).contains(&p))
    }

    /// Widens the samples to a 64-bit working plane.
    pub fn to_plane(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.pixels.iter().map(|&p| p as f64).collect(),
        }
    }

    /// Copies out a `w`×`h` window with top-left corner `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height || w == 0 || h == 0 {
            return Err(Error::InvalidParameter(format!(
                "crop {w}x{h}+{x0}+{y0} outside {}x{} image",
                self.width, self.height
            )));
        }
        let mut pixels = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            let row = y * self.width;
            pixels.extend_from_slice(&self.pixels[row + x0..row + x0 + w]);
        }
        Self::with_range(w, h, pixels, self.data_range)
    }
}

/// Affine min-max map of an image onto `[0, 1]`.
///
/// Constant images map to all zeros. The result always has `data_range = 1`.
pub fn normalize_unit(img: &GrayImage) -> GrayImage {
    let (lo, hi) = img
        .pixels
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p as f64), hi.max(p as f64))
        });
    let pixels = if hi > lo {
        let span = hi - lo;
        img.pixels
            .iter()
            .map(|&p| ((p as f64 - lo) / span) as f32)
            .collect()
    } else {
        vec![0.0; img.pixels.len()]
    };
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
        data_range: 1.0,
    }
}

/// Divides by the data range so intensities sit in `[0, 1]` without any
/// per-image stretching.
pub fn normalize_fixed(img: &GrayImage) -> GrayImage {
    let scale = 1.0 / img.data_range as f64;
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: img
            .pixels
            .iter()
            .map(|&p| (p as f64 * scale) as f32)
            .collect(),
        data_range: 1.0,
    }
}

/// Reference/distorted pair with matching geometry and range.
#[derive(Clone, Debug)]
pub struct ImagePair {
    reference: GrayImage,
    distorted: GrayImage,
}

impl ImagePair {
    pub fn new(reference: GrayImage, distorted: GrayImage) -> Result<Self> {
        if reference.width != distorted.width || reference.height != distorted.height {
            return Err(Error::DimensionMismatch(format!(
                "reference is {}x{}, distorted is {}x{}",
                reference.width, reference.height, distorted.width, distorted.height
            )));
        }
        if reference.data_range != distorted.data_range {
            return Err(Error::DimensionMismatch(format!(
                "data range {} vs {}",
                reference.data_range, distorted.data_range
            )));
        }
        Ok(Self {
            reference,
            distorted,
        })
    }

    pub fn reference(&self) -> &GrayImage {
        &self.reference
    }

    pub fn distorted(&self) -> &GrayImage {
        &self.distorted
    }

    pub fn width(&self) -> usize {
        self.reference.width
    }

    pub fn height(&self) -> usize {
        self.reference.height
    }

    pub fn data_range(&self) -> f64 {
        self.reference.data_range as f64
    }

    /// Same pair with the roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            reference: self.distorted.clone(),
            distorted: self.reference.clone(),
        }
    }

    /// Both images as working planes divided by the data range.
    pub(crate) fn unit_planes(&self) -> (Plane, Plane) {
        let s = 1.0 / self.data_range();
        (
            self.reference.to_plane().map(|v| v * s),
            self.distorted.to_plane().map(|v| v * s),
        )
    }
}

/// 64-bit row-major working buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width * height != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} plane needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    /// Builds a plane from `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Element-wise combination of two equally sized planes.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        assert_eq!(
            (self.width, self.height),
            (other.width, other.height),
            "zip_map on planes of different size"
        );
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Rotates counter-clockwise by 90 degrees.
    pub fn rot90(&self) -> Plane {
        let (w, h) = (self.width, self.height);
        Plane::from_fn(h, w, |x, y| self.get(w - 1 - y, x))
    }

    /// Sub-window copy; caller guarantees bounds.
    pub fn window(&self, x0: usize, y0: usize, w: usize, h: usize) -> Plane {
        Plane::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// Complex 2-D spectrum stored with DC at `(width / 2, height / 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KSpaceImage {
    width: usize,
    height: usize,
    values: Vec<Complex64>,
}

impl KSpaceImage {
    pub fn new(width: usize, height: usize, values: Vec<Complex64>) -> Result<Self> {
        if width * height != values.len() || width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} k-space needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite k-space value".into()));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.values[y * self.width + x]
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copies column `x` out of `other` (the acquired line in a Cartesian
    /// phase-encode scheme).
    pub fn copy_column_from(&mut self, other: &KSpaceImage, x: usize) {
        for y in 0..self.height {
            self.values[y * self.width + x] = other.values[y * other.width + x];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_affine() {
        let img = GrayImage::with_range(3, 1, vec![2.0, 4.0, 6.0], 10.0).unwrap();
        let out = normalize_unit(&img);
        assert_eq!(out.pixels(), &[0.0, 0.5, 1.0]);
        assert_eq!(out.data_range(), 1.0);
    }

    #[test]
    fn normalize_constant_is_zero() {
        let img = GrayImage::filled(4, 4, 0.3).unwrap();
        assert!(normalize_unit(&img).pixels().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn normalize_identity_on_unit() {
        let img = GrayImage::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert_eq!(normalize_unit(&img).pixels(), img.pixels());
    }

    #[test]
    fn rejects_nan_and_bad_length() {
        assert!(GrayImage::new(2, 1, vec![0.0, f32::NAN]).is_err());
        assert!(GrayImage::new(2, 2, vec![0.0; 3]).is_err());
        assert!(GrayImage::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn rot90_four_times_is_identity() {
        let p = Plane::from_fn(3, 5, |x, y| (x * 7 + y) as f64);
        assert_eq!(p.rot90().rot90().rot90().rot90(), p);
        assert_eq!(p.rot90().width(), 5);
    }

    proptest! {
        #[test]
        fn normalize_hits_unit_bounds(v in proptest::collection::vec(-50.0f32..50.0, 2..64)) {
            let n = v.len();
            let img = GrayImage::new(n, 1, v).unwrap();
            let out = normalize_unit(&img);
            let (lo, hi) = out.to_plane().min_max();
            if img.pixels().iter().any(|&p| p != img.pixels()[0]) {
                prop_assert_eq!(lo, 0.0);
                prop_assert!((hi - 1.0).abs() < 1e-6);
            }
        }

        #[test]
        fn pair_rejects_mismatch(w1 in 1usize..20, h1 in 1usize..20, w2 in 1usize..20, h2 in 1usize..20) {
            prop_assume!((w1, h1) != (w2, h2));
            let a = GrayImage::filled(w1, h1, 0.5).unwrap();
            let b = GrayImage::filled(w2, h2, 0.5).unwrap();
            prop_assert!(ImagePair::new(a, b).is_err());
        }
    }
}

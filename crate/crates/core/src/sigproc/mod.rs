//! Deterministic signal-processing primitives used by the metric and
//! degradation modules.
//!
//! Everything here works on [`Plane`] (64-bit) buffers; every output sample
//! is accumulated in a fixed order so results never depend on scheduling.

mod dct;
mod fft;
mod resample;
mod wavelet;

pub use dct::{dct2_blocks, dct_matrix, DctBlocks};
pub use fft::{dft2, fft2_unitary, fftshift, idft2, idft2_complex, idft2_magnitude, ifftshift};
pub use resample::{bilinear_zero, resize_bilinear, rotate_bilinear};
pub use wavelet::{haar_dwt, DetailBands, WaveletPyramid};

use crate::{Error, Plane, Result};

/// Border handling for [`conv2d`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Padding {
    /// Mirror without repeating the edge sample (`d c b | a b c d | c b a`).
    #[default]
    Reflect,
    Zero,
    /// No padding; output shrinks by `kernel - 1` on each axis.
    Valid,
}

/// Odd-sized correlation kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2D {
    width: usize,
    height: usize,
    weights: Vec<f64>,
}

impl Kernel2D {
    pub fn new(width: usize, height: usize, weights: Vec<f64>) -> Result<Self> {
        if width % 2 == 0 || height % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "kernel dimensions must be odd, got {width}x{height}"
            )));
        }
        if weights.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} kernel needs {} weights, got {}",
                width * height,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("non-finite kernel weight".into()));
        }
        Ok(Self {
            width,
            height,
            weights,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.weights[y * self.width + x]
    }

    pub fn transposed(&self) -> Kernel2D {
        let mut weights = Vec::with_capacity(self.weights.len());
        for y in 0..self.width {
            for x in 0..self.height {
                weights.push(self.get(y, x));
            }
        }
        Kernel2D {
            width: self.height,
            height: self.width,
            weights,
        }
    }
}

/// Isotropic Gaussian window normalised to unit sum.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Kernel2D> {
    if size == 0 || size % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian kernel size must be odd and positive, got {size}"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let r = (size / 2) as f64;
    let g: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let mut weights = Vec::with_capacity(size * size);
    for gy in &g {
        for gx in &g {
            weights.push(gy * gx);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Kernel2D::new(size, size, weights)
}

/// Maps an out-of-range index onto `0..n` by mirror reflection.
#[inline]
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut m = i.rem_euclid(period);
    if m >= n as isize {
        m = period - m;
    }
    m as usize
}

/// 2-D correlation `out(x, y) = Σ k(i, j) · img(x + i - rx, y + j - ry)`.
pub fn conv2d(img: &Plane, k: &Kernel2D, padding: Padding) -> Result<Plane> {
    let (w, h) = (img.width(), img.height());
    let (kw, kh) = (k.width(), k.height());
    let (rx, ry) = (kw / 2, kh / 2);
    if padding == Padding::Valid {
        if kw > w || kh > h {
            return Err(Error::TooSmall {
                what: "image side for valid convolution",
                got: w.min(h),
                need: kw.max(kh),
            });
        }
        let (ow, oh) = (w - kw + 1, h - kh + 1);
        let src = img.data();
        let mut out = Vec::with_capacity(ow * oh);
        for y in 0..oh {
            for x in 0..ow {
                let mut acc = 0.0;
                for j in 0..kh {
                    let row = &src[(y + j) * w + x..(y + j) * w + x + kw];
                    let krow = &k.weights()[j * kw..(j + 1) * kw];
                    for i in 0..kw {
                        acc += krow[i] * row[i];
                    }
                }
                out.push(acc);
            }
        }
        return Plane::new(ow, oh, out);
    }

    // Pad once, then run the valid kernel over the padded buffer.
    let (pw, ph) = (w + 2 * rx, h + 2 * ry);
    let padded = Plane::from_fn(pw, ph, |x, y| {
        let sx = x as isize - rx as isize;
        let sy = y as isize - ry as isize;
        match padding {
            Padding::Reflect => img.get(reflect_index(sx, w), reflect_index(sy, h)),
            _ => {
                if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                    0.0
                } else {
                    img.get(sx as usize, sy as usize)
                }
            }
        }
    });
    conv2d(&padded, k, Padding::Valid)
}

/// 2×2 mean pooling; an odd trailing row or column is dropped.
pub fn downsample2(img: &Plane) -> Result<Plane> {
    let (w, h) = (img.width(), img.height());
    if w < 2 || h < 2 {
        return Err(Error::TooSmall {
            what: "image side for 2x2 pooling",
            got: w.min(h),
            need: 2,
        });
    }
    Ok(Plane::from_fn(w / 2, h / 2, |x, y| {
        let (sx, sy) = (2 * x, 2 * y);
        (img.get(sx, sy) + img.get(sx + 1, sy) + img.get(sx, sy + 1) + img.get(sx + 1, sy + 1))
            * 0.25
    }))
}

/// 3×3 derivative operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientOperator {
    Prewitt,
    Scharr,
}

impl GradientOperator {
    /// Horizontal-derivative kernel; the vertical one is its transpose.
    pub fn kernel_x(self) -> Kernel2D {
        let w = match self {
            GradientOperator::Prewitt => {
                let t = 1.0 / 3.0;
                vec![t, 0.0, -t, t, 0.0, -t, t, 0.0, -t]
            }
            GradientOperator::Scharr => {
                let (a, b) = (3.0 / 16.0, 10.0 / 16.0);
                vec![a, 0.0, -a, b, 0.0, -b, a, 0.0, -a]
            }
        };
        Kernel2D::new(3, 3, w).expect("static kernel")
    }
}

#[derive(Clone, Debug)]
pub struct Gradients {
    pub gx: Plane,
    pub gy: Plane,
    pub magnitude: Plane,
}

/// Horizontal/vertical derivatives with reflect padding, plus their norm.
///
/// Equivalent to correlating with [`GradientOperator::kernel_x`] and its
/// transpose, but evaluated as weighted differences of opposite neighbours
/// so that flat regions give exactly zero.
pub fn gradient_maps(img: &Plane, operator: GradientOperator) -> Result<Gradients> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::TooSmall {
            what: "image side for gradient",
            got: w.min(h),
            need: 3,
        });
    }
    let s = match operator {
        GradientOperator::Prewitt => [1.0 / 3.0; 3],
        GradientOperator::Scharr => [3.0 / 16.0, 10.0 / 16.0, 3.0 / 16.0],
    };
    let at = |x: isize, y: isize| img.get(reflect_index(x, w), reflect_index(y, h));
    let mut gx = Plane::zeros(w, h);
    let mut gy = Plane::zeros(w, h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let (mut dx, mut dy) = (0.0, 0.0);
            for (j, wt) in s.iter().enumerate() {
                let o = j as isize - 1;
                dx += wt * (at(x - 1, y + o) - at(x + 1, y + o));
                dy += wt * (at(x + o, y - 1) - at(x + o, y + 1));
            }
            gx.set(x as usize, y as usize, dx);
            gy.set(x as usize, y as usize, dy);
        }
    }
    let magnitude = gx.zip_map(&gy, |a, b| (a * a + b * b).sqrt());
    Ok(Gradients { gx, gy, magnitude })
}

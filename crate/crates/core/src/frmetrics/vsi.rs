use super::{require_side, similarity, MetricId, MetricScore};
use crate::sigproc::{fft2_unitary, gradient_maps, ifftshift, resize_bilinear, GradientOperator};
use crate::{ImagePair, Plane, Result};
use rustfft::num_complex::Complex64;

/// Side of the square grid on which saliency is computed.
const SALIENCY_SIDE: usize = 256;

#[derive(Clone, Debug)]
pub struct VsiParams {
    /// Stabiliser of the saliency similarity (saliency lies in [0, 1]).
    pub c_vs: f64,
    /// Stabiliser of the gradient similarity on the 0–255 scale.
    pub c_gm: f64,
    /// Exponent on the gradient similarity.
    pub alpha: f64,
    pub omega0: f64,
    pub sigma_f: f64,
    /// Width of the centre prior, in saliency-grid pixels.
    pub sigma_d: f64,
}

impl Default for VsiParams {
    fn default() -> Self {
        Self {
            c_vs: 1.27,
            c_gm: 386.0,
            alpha: 0.4,
            omega0: 0.021,
            sigma_f: 1.34,
            sigma_d: 145.0,
        }
    }
}

pub fn vsi(pair: &ImagePair) -> Result<MetricScore> {
    vsi_with(pair, &VsiParams::default())
}

/// Visual saliency-induced index.
///
/// Grayscale input has no chroma, so the two chromatic similarity factors
/// are 1 and drop out.
pub fn vsi_with(pair: &ImagePair, p: &VsiParams) -> Result<MetricScore> {
    require_side(pair, "image side for VSI", 3)?;
    let (x, y) = pair.unit_planes();
    let mut sx = sdsp_saliency(&x, p);
    let mut sy = sdsp_saliency(&y, p);
    let mut lx = x.map(|v| 0.96 * 255.0 * v);
    let mut ly = y.map(|v| 0.96 * 255.0 * v);

    let factor = ((pair.width().min(pair.height()) as f64 / 256.0).round() as usize).max(1);
    if factor > 1 {
        sx = pool(&sx, factor);
        sy = pool(&sy, factor);
        lx = pool(&lx, factor);
        ly = pool(&ly, factor);
    }
    if lx.width().min(lx.height()) < 3 {
        return Err(crate::Error::TooSmall {
            what: "image side for VSI after pooling",
            got: lx.width().min(lx.height()),
            need: 3,
        });
    }
    let gx = gradient_maps(&lx, GradientOperator::Scharr)?.magnitude;
    let gy = gradient_maps(&ly, GradientOperator::Scharr)?.magnitude;

    let eps = 1e-12;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..gx.len() {
        let (a, b) = (sx.data()[i], sy.data()[i]);
        let s_vs = similarity(a, b, p.c_vs);
        let s_gm = similarity(gx.data()[i], gy.data()[i], p.c_gm);
        let w = a.max(b);
        num += s_vs * s_gm.powf(p.alpha) * w;
        den += w;
    }
    Ok(MetricScore::new(MetricId::Vsi, (num + eps) / (den + eps)))
}

/// Saliency map of a unit-range gray plane, min-max normalised to [0, 1].
///
/// The map combines a log-Gabor band-pass response of the lightness channel
/// with a Gaussian prior centred on the image. Computation runs on a
/// 256×256 resampled copy and the result is resampled back to the input
/// size.
pub fn sdsp_saliency(img: &Plane, p: &VsiParams) -> Plane {
    let n = SALIENCY_SIDE;
    let small = resize_bilinear(img, n, n, false);
    let mut buf: Vec<Complex64> = small
        .data()
        .iter()
        .map(|&v| Complex64::new(lightness(v), 0.0))
        .collect();
    fft2_unitary(&mut buf, n, n, false);
    let gabor = log_gabor(n, p.omega0, p.sigma_f);
    for (b, g) in buf.iter_mut().zip(&gabor) {
        *b *= g;
    }
    fft2_unitary(&mut buf, n, n, true);

    let half = (n / 2 - 1) as f64;
    let sd2 = p.sigma_d * p.sigma_d;
    let sal = Plane::from_fn(n, n, |x, y| {
        let (dx, dy) = (x as f64 - half, y as f64 - half);
        buf[y * n + x].re.abs() * (-(dx * dx + dy * dy) / sd2).exp()
    });
    let out = resize_bilinear(&sal, img.width(), img.height(), true);
    let (lo, hi) = out.min_max();
    out.map(|v| (v - lo) / (hi - lo + 1e-12))
}

/// CIE L* of an sRGB gray level in [0, 1].
fn lightness(v: f64) -> f64 {
    let lin = if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    };
    let f = if lin > 0.008856 {
        lin.cbrt()
    } else {
        7.787 * lin + 16.0 / 116.0
    };
    116.0 * f - 16.0
}

/// Frequency response in unshifted FFT order; zero at DC and beyond
/// radius 0.5.
fn log_gabor(n: usize, omega0: f64, sigma_f: f64) -> Vec<f64> {
    let half = (n / 2) as f64;
    let centred: Vec<f64> = (0..n * n)
        .map(|i| {
            let (x, y) = (i % n, i / n);
            let u = (x as f64 - half) / n as f64;
            let v = (y as f64 - half) / n as f64;
            let r = (u * u + v * v).sqrt();
            if r == 0.0 || r > 0.5 {
                0.0
            } else {
                (-(r / omega0).ln().powi(2) / (2.0 * sigma_f * sigma_f)).exp()
            }
        })
        .collect();
    ifftshift(&centred, n, n)
}

/// Non-overlapping `f`×`f` mean pooling; trailing partial blocks are dropped.
fn pool(p: &Plane, f: usize) -> Plane {
    let norm = 1.0 / (f * f) as f64;
    Plane::from_fn(p.width() / f, p.height() / f, |x, y| {
        let mut s = 0.0;
        for j in 0..f {
            for i in 0..f {
                s += p.get(x * f + i, y * f + j);
            }
        }
        s * norm
    })
}

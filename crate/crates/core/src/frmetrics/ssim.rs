use super::{require_side, MetricId, MetricScore};
use crate::sigproc::{conv2d, downsample2, gaussian_kernel, Kernel2D, Padding};
use crate::{Error, ImagePair, Plane, Result};

/// Canonical per-scale exponents, finest scale first.
pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

#[derive(Clone, Debug)]
pub struct SsimParams {
    pub window: Kernel2D,
    pub k1: f64,
    pub k2: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: gaussian_kernel(11, 1.5).expect("static kernel"),
            k1: 0.01,
            k2: 0.03,
        }
    }
}

/// Mean SSIM and mean contrast-structure term over the valid region.
///
/// Inputs are unit-range planes, so `C1 = k1²` and `C2 = k2²`.
pub fn ssim_components(x: &Plane, y: &Plane, params: &SsimParams) -> Result<(f64, f64)> {
    let w = &params.window;
    let c1 = params.k1 * params.k1;
    let c2 = params.k2 * params.k2;
    let mu_x = conv2d(x, w, Padding::Valid)?;
    let mu_y = conv2d(y, w, Padding::Valid)?;
    let xx = conv2d(&x.zip_map(x, |a, b| a * b), w, Padding::Valid)?;
    let yy = conv2d(&y.zip_map(y, |a, b| a * b), w, Padding::Valid)?;
    let xy = conv2d(&x.zip_map(y, |a, b| a * b), w, Padding::Valid)?;
    let n = mu_x.len() as f64;
    let (mut ssim_sum, mut cs_sum) = (0.0, 0.0);
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x.data()[i], mu_y.data()[i]);
        let sxx = xx.data()[i] - mx * mx;
        let syy = yy.data()[i] - my * my;
        let sxy = xy.data()[i] - mx * my;
        let cs = (2.0 * sxy + c2) / (sxx + syy + c2);
        let lum = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
        ssim_sum += lum * cs;
        cs_sum += cs;
    }
    Ok((ssim_sum / n, cs_sum / n))
}

pub fn ssim(pair: &ImagePair) -> Result<MetricScore> {
    ssim_with(pair, &SsimParams::default())
}

/// Gaussian-windowed SSIM averaged over the valid (unpadded) map.
pub fn ssim_with(pair: &ImagePair, params: &SsimParams) -> Result<MetricScore> {
    require_side(
        pair,
        "image side for SSIM window",
        params.window.width().max(params.window.height()),
    )?;
    let (x, y) = pair.unit_planes();
    let (s, _) = ssim_components(&x, &y, params)?;
    Ok(MetricScore::new(MetricId::Ssim, s))
}

pub fn ms_ssim(pair: &ImagePair) -> Result<MetricScore> {
    ms_ssim_with(pair, &SsimParams::default(), &MS_SSIM_WEIGHTS)
}

/// Product of per-scale contrast-structure terms, with the luminance term
/// entering only at the coarsest scale. Negative terms are clamped at 0
/// before exponentiation.
pub fn ms_ssim_with(pair: &ImagePair, params: &SsimParams, weights: &[f64]) -> Result<MetricScore> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter("MS-SSIM needs at least one scale".into()));
    }
    let scales = weights.len();
    let win = params.window.width().max(params.window.height());
    let need = (1usize << (scales - 1)) * win;
    require_side(pair, "image side, insufficient scales for MS-SSIM", need)?;
    let (mut x, mut y) = pair.unit_planes();
    let mut value = 1.0;
    for (s, &w) in weights.iter().enumerate() {
        let (ssim_s, cs_s) = ssim_components(&x, &y, params)?;
        if s + 1 == scales {
            value *= ssim_s.max(0.0).powf(w);
        } else {
            value *= cs_s.max(0.0).powf(w);
            x = downsample2(&x)?;
            y = downsample2(&y)?;
        }
    }
    Ok(MetricScore::new(MetricId::MsSsim, value))
}

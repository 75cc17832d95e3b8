use super::{require_side, MetricId, MetricScore};
use crate::sigproc::{conv2d, gaussian_kernel, Padding};
use crate::{ImagePair, Plane, Result};

#[derive(Clone, Debug)]
pub struct VifpParams {
    /// Variance of the visual noise on the 0–255 scale.
    pub sigma_n_sq: f64,
    pub scales: usize,
}

impl Default for VifpParams {
    fn default() -> Self {
        Self {
            sigma_n_sq: 2.0,
            scales: 4,
        }
    }
}

const EPS: f64 = 1e-10;

pub fn vifp(pair: &ImagePair) -> Result<MetricScore> {
    vifp_with(pair, &VifpParams::default())
}

/// Pixel-domain visual information fidelity.
///
/// At scale `s` the Gaussian window has side `2^(scales - s) + 1` and
/// standard deviation side/5; coarser scales are reached by filtering with
/// that window and keeping every other sample.
pub fn vifp_with(pair: &ImagePair, p: &VifpParams) -> Result<MetricScore> {
    if p.scales == 0 {
        return Err(crate::Error::InvalidParameter("VIFp needs at least one scale".into()));
    }
    require_side(pair, "image side for VIFp", (1 << p.scales) * 2 + 9)?;
    let (x, y) = pair.unit_planes();
    let mut x = x.map(|v| v * 255.0);
    let mut y = y.map(|v| v * 255.0);
    let (mut num, mut den) = (0.0, 0.0);
    for s in 0..p.scales {
        let side = (1usize << (p.scales - s)) + 1;
        let k = gaussian_kernel(side, side as f64 / 5.0)?;
        if s > 0 {
            x = decimate(&conv2d(&x, &k, Padding::Valid)?);
            y = decimate(&conv2d(&y, &k, Padding::Valid)?);
        }
        let mu1 = conv2d(&x, &k, Padding::Valid)?;
        let mu2 = conv2d(&y, &k, Padding::Valid)?;
        let xx = conv2d(&x.map(|v| v * v), &k, Padding::Valid)?;
        let yy = conv2d(&y.map(|v| v * v), &k, Padding::Valid)?;
        let xy = conv2d(&x.zip_map(&y, |a, b| a * b), &k, Padding::Valid)?;
        for i in 0..mu1.len() {
            let (m1, m2) = (mu1.data()[i], mu2.data()[i]);
            let s1 = (xx.data()[i] - m1 * m1).max(0.0);
            let s2 = (yy.data()[i] - m2 * m2).max(0.0);
            let s12 = xy.data()[i] - m1 * m2;
            let (g, sv, s1) = channel_gain(s1, s2, s12);
            num += (1.0 + g * g * s1 / (sv + p.sigma_n_sq)).log10();
            den += (1.0 + s1 / p.sigma_n_sq).log10();
        }
    }
    Ok(MetricScore::new(MetricId::Vifp, (num + EPS) / (den + EPS)))
}

/// Gain, distortion-noise variance and effective reference variance of the
/// local channel model, with the usual guards for flat neighbourhoods.
fn channel_gain(s1: f64, s2: f64, s12: f64) -> (f64, f64, f64) {
    let mut g = s12 / (s1 + EPS);
    let mut sv = s2 - g * s12;
    let mut s1 = s1;
    if s1 < EPS {
        g = 0.0;
        sv = s2;
        s1 = 0.0;
    }
    if s2 < EPS {
        g = 0.0;
        sv = 0.0;
    }
    if g < 0.0 {
        sv = s2;
        g = 0.0;
    }
    (g, sv.max(EPS), s1)
}

fn decimate(p: &Plane) -> Plane {
    Plane::from_fn(p.width().div_ceil(2), p.height().div_ceil(2), |x, y| p.get(2 * x, 2 * y))
}

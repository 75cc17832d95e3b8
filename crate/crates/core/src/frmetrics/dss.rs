use super::{require_side, MetricId, MetricScore};
use crate::sigproc::{conv2d, dct2_blocks, gaussian_kernel, Padding};
use crate::{ImagePair, Plane, Result};

#[derive(Clone, Debug)]
pub struct DssParams {
    pub block: usize,
    /// Spread of the Gaussian subband weighting, in frequency-index units.
    pub sigma_weight: f64,
    /// Subband weights below this are dropped before normalisation.
    pub weight_threshold: f64,
    pub kernel_size: usize,
    pub sigma_similarity: f64,
    /// Fraction of lowest local similarities that are averaged.
    pub percentile: f64,
    pub c_dc: f64,
    pub c_ac: f64,
}

impl Default for DssParams {
    fn default() -> Self {
        Self {
            block: 8,
            sigma_weight: 1.55,
            weight_threshold: 1e-2,
            kernel_size: 3,
            sigma_similarity: 1.5,
            percentile: 0.05,
            c_dc: 1000.0,
            c_ac: 300.0,
        }
    }
}

pub fn dss(pair: &ImagePair) -> Result<MetricScore> {
    dss_with(pair, &DssParams::default())
}

/// DCT subband similarity.
///
/// Both images (0–255 scale) are centre-cropped to whole blocks and
/// transformed blockwise. Each subband plane gets a local variance
/// similarity pooled over its worst-scoring positions; the DC subband also
/// gets a structure term. Subbands are combined with a Gaussian weighting
/// that favours low frequencies.
pub fn dss_with(pair: &ImagePair, p: &DssParams) -> Result<MetricScore> {
    require_side(pair, "image side for DSS", p.block)?;
    let (x, y) = pair.unit_planes();
    let bx = dct2_blocks(&x.map(|v| v * 255.0), p.block)?;
    let by = dct2_blocks(&y.map(|v| v * 255.0), p.block)?;
    let weights = subband_weights(p);
    let kernel = gaussian_kernel(p.kernel_size, p.sigma_similarity)?;
    let mut score = 0.0;
    for u in 0..p.block {
        for v in 0..p.block {
            let w = weights[u * p.block + v];
            if w == 0.0 {
                continue;
            }
            let dc = u == 0 && v == 0;
            let sim = subband_similarity(&bx.subband(u, v), &by.subband(u, v), dc, &kernel, p)?;
            score += w * sim;
        }
    }
    Ok(MetricScore::new(MetricId::Dss, score))
}

/// Normalised weights indexed `[u * block + v]`.
fn subband_weights(p: &DssParams) -> Vec<f64> {
    let n = p.block;
    let mut w: Vec<f64> = (0..n * n)
        .map(|i| {
            let (u, v) = ((i / n) as f64 + 0.5, (i % n) as f64 + 0.5);
            let e = (-(u * u + v * v) / (2.0 * p.sigma_weight * p.sigma_weight)).exp();
            if e < p.weight_threshold {
                0.0
            } else {
                e
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn subband_similarity(x: &Plane, y: &Plane, dc: bool, k: &crate::sigproc::Kernel2D, p: &DssParams) -> Result<f64> {
    let c = if dc { p.c_dc } else { p.c_ac };
    let mx = conv2d(x, k, Padding::Zero)?;
    let my = conv2d(y, k, Padding::Zero)?;
    let sxx = conv2d(&x.map(|v| v * v), k, Padding::Zero)?;
    let syy = conv2d(&y.map(|v| v * v), k, Padding::Zero)?;
    let n = x.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let sxy = if dc {
        Some(conv2d(&x.zip_map(y, |a, b| a * b), k, Padding::Zero)?)
    } else {
        None
    };
    for i in 0..n {
        let vx = (sxx.data()[i] - mx.data()[i] * mx.data()[i]).max(0.0);
        let vy = (syy.data()[i] - my.data()[i] * my.data()[i]).max(0.0);
        let root = (vx * vy).sqrt();
        left.push((2.0 * root + c) / (vx + vy + c));
        if let Some(sxy) = &sxy {
            let cov = sxy.data()[i] - mx.data()[i] * my.data()[i];
            right.push((cov + c) / (root + c));
        }
    }
    let keep = (p.percentile * n as f64).round_ties_even() as usize + 1;
    let mut sim = lowest_mean(&mut left, keep);
    if dc {
        sim *= lowest_mean(&mut right, keep);
    }
    Ok(sim)
}

fn lowest_mean(values: &mut [f64], keep: usize) -> f64 {
    values.sort_by(f64::total_cmp);
    let keep = keep.min(values.len());
    values[..keep].iter().sum::<f64>() / keep as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GrayImage;

    #[test]
    fn weights_are_normalised_and_sparse() {
        let w = subband_weights(&DssParams::default());
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(w[7 * 8 + 7], 0.0);
        assert!(w[0] > w[1] && w[1] == w[8]);
    }

    #[test]
    fn identity_is_one() {
        let a = GrayImage::new(20, 17, (0..340).map(|i| ((i * 31) % 97) as f32 / 96.0).collect()).unwrap();
        let v = dss(&ImagePair::new(a.clone(), a).unwrap()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn undersized() {
        let a = GrayImage::filled(7, 30, 0.2).unwrap();
        assert!(dss(&ImagePair::new(a.clone(), a).unwrap()).is_err());
    }
}

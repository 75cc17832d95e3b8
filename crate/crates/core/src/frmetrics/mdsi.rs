use super::{require_side, similarity, MetricId, MetricScore};
use crate::sigproc::{gradient_maps, GradientOperator};
use crate::{ImagePair, Result};
use rustfft::num_complex::Complex64;

/// Constants on the 0–255 scale.
#[derive(Clone, Debug)]
pub struct MdsiParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Weight of the gradient term in the fused map.
    pub alpha: f64,
    pub q: f64,
    pub rho: f64,
    pub o: f64,
}

impl Default for MdsiParams {
    fn default() -> Self {
        Self {
            c1: 140.0,
            c2: 55.0,
            c3: 550.0,
            alpha: 0.6,
            q: 0.25,
            rho: 1.0,
            o: 0.25,
        }
    }
}

pub fn mdsi(pair: &ImagePair) -> Result<MetricScore> {
    mdsi_with(pair, &MdsiParams::default())
}

/// Mean deviation similarity index with deviation pooling.
///
/// The single gray channel stands in for three equal colour channels, so
/// both opponent-colour channels vanish and the chromatic similarity is the
/// constant 1; only the gradient part varies.
pub fn mdsi_with(pair: &ImagePair, p: &MdsiParams) -> Result<MetricScore> {
    require_side(pair, "image side for MDSI", 3)?;
    let (x, y) = pair.unit_planes();
    // luminance of a replicated gray pixel: (0.2989 + 0.587 + 0.114) * v
    let lum = 0.9999 * 255.0;
    let x = x.map(|v| v * lum);
    let y = y.map(|v| v * lum);
    let avg = x.zip_map(&y, |a, b| 0.5 * (a + b));
    let gx = gradient_maps(&x, GradientOperator::Prewitt)?.magnitude;
    let gy = gradient_maps(&y, GradientOperator::Prewitt)?.magnitude;
    let ga = gradient_maps(&avg, GradientOperator::Prewitt)?.magnitude;
    let chroma = 1.0;

    let n = gx.len();
    let mut powered = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b, m) = (gx.data()[i], gy.data()[i], ga.data()[i]);
        let gs = similarity(a, b, p.c1) + similarity(a, m, p.c2) - similarity(b, m, p.c2);
        let gcs = p.alpha * gs + (1.0 - p.alpha) * chroma;
        // principal branch, so negative fused values stay well defined
        powered.push(Complex64::new(gcs, 0.0).powf(p.q));
    }
    let mean = powered.iter().sum::<Complex64>() / n as f64;
    let dev = powered
        .iter()
        .map(|z| (z - mean).norm().powf(p.rho))
        .sum::<f64>()
        / n as f64;
    let value = dev.powf(p.o / p.rho);
    Ok(MetricScore::new(MetricId::Mdsi, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GrayImage;

    #[test]
    fn constants_and_identity() {
        let a = GrayImage::filled(16, 16, 0.1).unwrap();
        let b = GrayImage::filled(16, 16, 0.8).unwrap();
        assert_eq!(mdsi(&ImagePair::new(a.clone(), b).unwrap()).unwrap().value, 0.0);
        let r = GrayImage::new(4, 4, (0..16).map(|i| (i % 5) as f32 / 5.0).collect()).unwrap();
        assert_eq!(mdsi(&ImagePair::new(r.clone(), r).unwrap()).unwrap().value, 0.0);
    }
}

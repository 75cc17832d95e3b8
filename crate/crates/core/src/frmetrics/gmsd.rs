use super::{require_side, similarity, MetricId, MetricScore};
use crate::sigproc::{downsample2, gradient_maps, GradientOperator};
use crate::{Error, ImagePair, Plane, Result};

/// Stabiliser 170 on the 0–255 scale, expressed on unit range.
pub const GMSD_C: f64 = 170.0 / (255.0 * 255.0);

pub fn gmsd(pair: &ImagePair) -> Result<MetricScore> {
    gmsd_with(pair, GMSD_C)
}

/// Population standard deviation of the Prewitt gradient-magnitude
/// similarity map, computed after 2×2 mean pooling.
pub fn gmsd_with(pair: &ImagePair, c: f64) -> Result<MetricScore> {
    require_side(pair, "image side for GMSD", 6)?;
    let (x, y) = pair.unit_planes();
    Ok(MetricScore::new(MetricId::Gmsd, gmsd_planes(&x, &y, c)?))
}

pub(crate) fn gmsd_planes(x: &Plane, y: &Plane, c: f64) -> Result<f64> {
    let x = downsample2(x)?;
    let y = downsample2(y)?;
    let mx = gradient_maps(&x, GradientOperator::Prewitt)?.magnitude;
    let my = gradient_maps(&y, GradientOperator::Prewitt)?.magnitude;
    let gms = mx.zip_map(&my, |a, b| similarity(a, b, c));
    let mean = gms.mean();
    let var = gms.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / gms.len() as f64;
    Ok(var.sqrt())
}

#[derive(Clone, Debug)]
pub struct MsGmsdParams {
    pub scale_weights: Vec<f64>,
    pub c: f64,
}

impl Default for MsGmsdParams {
    fn default() -> Self {
        Self {
            scale_weights: vec![0.096, 0.596, 0.289, 0.019],
            c: GMSD_C,
        }
    }
}

pub fn ms_gmsd(pair: &ImagePair) -> Result<MetricScore> {
    ms_gmsd_with(pair, &MsGmsdParams::default())
}

/// `sqrt(Σ_s w_s · GMSD_s²)` where scale `s` runs GMSD on the pair
/// downsampled `s` times.
pub fn ms_gmsd_with(pair: &ImagePair, params: &MsGmsdParams) -> Result<MetricScore> {
    let scales = params.scale_weights.len();
    if scales == 0 || params.scale_weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidParameter(
            "MS-GMSD needs at least one non-negative scale weight".into(),
        ));
    }
    require_side(pair, "image side for MS-GMSD scales", 6 << (scales - 1))?;
    let (mut x, mut y) = pair.unit_planes();
    let mut acc = 0.0;
    for (s, w) in params.scale_weights.iter().enumerate() {
        if s > 0 {
            x = downsample2(&x)?;
            y = downsample2(&y)?;
        }
        let g = gmsd_planes(&x, &y, params.c)?;
        acc += w * g * g;
    }
    Ok(MetricScore::new(MetricId::MsGmsd, acc.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GrayImage;

    #[test]
    fn distinct_constants_score_zero() {
        let r = GrayImage::filled(48, 48, 0.2).unwrap();
        let d = GrayImage::filled(48, 48, 0.9).unwrap();
        let pair = ImagePair::new(r, d).unwrap();
        assert_eq!(gmsd(&pair).unwrap().value, 0.0);
        assert_eq!(ms_gmsd(&pair).unwrap().value, 0.0);
    }

    #[test]
    fn single_scale_ms_equals_gmsd() {
        let r = GrayImage::new(8, 8, (0..64).map(|i| ((i * 37) % 64) as f32 / 64.0).collect()).unwrap();
        let d = GrayImage::new(8, 8, (0..64).map(|i| ((i * 11) % 64) as f32 / 64.0).collect()).unwrap();
        let pair = ImagePair::new(r, d).unwrap();
        let single = gmsd(&pair).unwrap().value;
        let ms = ms_gmsd_with(&pair, &MsGmsdParams { scale_weights: vec![1.0], c: GMSD_C })
            .unwrap()
            .value;
        assert!((single - ms).abs() < 1e-15);
        assert!(single > 0.0);
    }

    #[test]
    fn undersized() {
        let a = GrayImage::filled(40, 40, 0.5).unwrap();
        assert!(ms_gmsd(&ImagePair::new(a.clone(), a).unwrap()).is_err());
    }
}

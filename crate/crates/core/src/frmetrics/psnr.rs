use super::{MetricId, MetricScore};
use crate::{ImagePair, Result};

/// `10 log10(range² / MSE)`; identical images give `+inf`.
pub fn psnr(pair: &ImagePair) -> Result<MetricScore> {
    let (x, y) = pair.unit_planes();
    let mse = x
        .data()
        .iter()
        .zip(y.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64;
    let value = if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    };
    Ok(MetricScore::new(MetricId::Psnr, value))
}

//! Distribution metrics over tile features: FID, KID, MSID and the
//! Inception Score.
//!
//! An image pair becomes a pair of distributions by cutting both images
//! into overlapping tiles and mapping every tile to a feature vector.
//! Deep feature extractors run out of process and hand their output over
//! as FS32 files; the built-in provider flattens tiles, optionally through
//! a seeded random projection.

mod features;
mod fid;
mod inception;
mod kid;
mod msid;

pub use features::{features_raw, load_features, save_features, tile_image, FeatureSet, TileSet};
pub use fid::fid;
pub use inception::{inception_score, ProbabilitySet};
pub use kid::{kid, KidParams};
pub use msid::{heat_trace_exact, heat_trace_slq, log_t_grid, msid, MsidParams};

use crate::frmetrics::MetricId;
use crate::{Error, ImagePair, Result};

pub const DEFAULT_TILE: usize = 96;
pub const DEFAULT_STRIDE: usize = 32;

/// How an image pair is turned into two feature sets, and the settings of
/// the stochastic metrics.
#[derive(Clone, Debug)]
pub struct DbConfig {
    pub tile_size: usize,
    pub stride: usize,
    /// Output dimension of the random projection; `None` keeps raw pixels.
    pub projection_dim: Option<usize>,
    pub seed: u64,
    pub kid: KidParams,
    pub msid: MsidParams,
}

impl Default for DbConfig {
    fn default() -> Self {
        Self {
            tile_size: DEFAULT_TILE,
            stride: DEFAULT_STRIDE,
            projection_dim: None,
            seed: 0,
            kid: KidParams::default(),
            msid: MsidParams::default(),
        }
    }
}

/// Tiles both images with the configured provider.
pub fn pair_features(pair: &ImagePair, cfg: &DbConfig) -> Result<(FeatureSet, FeatureSet)> {
    let ta = tile_image(pair.reference(), cfg.tile_size, cfg.stride)?;
    let tb = tile_image(pair.distorted(), cfg.tile_size, cfg.stride)?;
    Ok((
        features_raw(&ta, cfg.projection_dim, cfg.seed)?,
        features_raw(&tb, cfg.projection_dim, cfg.seed)?,
    ))
}

/// Applies a distribution metric to precomputed feature sets. KID reports
/// its mean.
pub fn db_score(metric: MetricId, a: &FeatureSet, b: &FeatureSet, cfg: &DbConfig) -> Result<f64> {
    match metric {
        MetricId::Fid => fid(a, b),
        MetricId::Kid => kid(a, b, &cfg.kid).map(|(mean, _)| mean),
        MetricId::Msid => msid(a, b, &cfg.msid),
        other => Err(Error::InvalidParameter(format!(
            "{other} is not a tile distribution metric"
        ))),
    }
}

/// One score per image pair: tile, extract, compare.
pub fn db_pair_score(pair: &ImagePair, metric: MetricId, cfg: &DbConfig) -> Result<f64> {
    let (a, b) = pair_features(pair, cfg)?;
    db_score(metric, &a, &b, cfg)
}

/// Mean vector and `n - 1` normalised scatter, as used by FID.
pub(crate) fn mean_and_centered(fs: &FeatureSet) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = (fs.n(), fs.d());
    let mut mean = vec![0.0; d];
    for row in fs.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut centered = Vec::with_capacity(n * d);
    for row in fs.rows() {
        centered.extend(row.iter().zip(&mean).map(|(v, m)| v - m));
    }
    (mean, centered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GrayImage;

    #[test]
    fn identical_pair_scores_zero() {
        let img = GrayImage::new(
            160,
            160,
            (0..160 * 160).map(|i| ((i * 7907) % 1000) as f32 / 999.0).collect(),
        )
        .unwrap();
        let pair = ImagePair::new(img.clone(), img).unwrap();
        let cfg = DbConfig::default();
        let (a, b) = pair_features(&pair, &cfg).unwrap();
        assert_eq!((a.n(), b.n()), (9, 9));
        for m in [MetricId::Fid, MetricId::Kid, MetricId::Msid] {
            let v = db_score(m, &a, &b, &cfg).unwrap();
            assert!(v.abs() < 1e-6, "{m}: {v}");
        }
        assert!(db_pair_score(&pair, MetricId::Psnr, &cfg).is_err());
    }
}

use super::{MetricId, MetricScore};
use crate::distmetrics::FeatureSet;
use crate::{Error, Result};

const C1: f64 = 1e-6;
const C2: f64 = 1e-6;

/// One stage of a feature extractor: `channels` maps of `height`×`width`,
/// channel-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidInput("feature map with an empty axis".into()));
        }
        if channels.checked_mul(height).and_then(|v| v.checked_mul(width)) != Some(data.len()) {
            return Err(Error::InvalidInput(format!(
                "feature map {channels}x{height}x{width} needs {} values, got {}",
                channels * height * width,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("feature map contains non-finite values".into()));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    /// Rows become channels, columns become spatial positions (height 1).
    pub fn from_feature_set(fs: &FeatureSet) -> Result<Self> {
        Self::new(fs.n(), 1, fs.d(), fs.data().to_vec())
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }
}

/// Feature maps of one image together with the DISTS weights.
///
/// `alpha[s][c]` weighs the mean (texture) term and `beta[s][c]` the
/// covariance (structure) term of channel `c` at stage `s`. All weights are
/// non-negative and together sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureStack {
    stages: Vec<FeatureMap>,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
}

impl FeatureStack {
    pub fn new(stages: Vec<FeatureMap>, alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidInput("feature stack needs at least one stage".into()));
        }
        if alpha.len() != stages.len() || beta.len() != stages.len() {
            return Err(Error::InvalidParameter("one weight vector per stage required".into()));
        }
        let mut total = 0.0;
        for (s, st) in stages.iter().enumerate() {
            if alpha[s].len() != st.channels || beta[s].len() != st.channels {
                return Err(Error::InvalidParameter(format!(
                    "stage {s} has {} channels but weights for {}/{}",
                    st.channels,
                    alpha[s].len(),
                    beta[s].len()
                )));
            }
            for &w in alpha[s].iter().chain(&beta[s]) {
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::InvalidParameter("DISTS weights must be non-negative".into()));
                }
                total += w;
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("DISTS weights sum to {total}, expected 1")));
        }
        Ok(Self { stages, alpha, beta })
    }

    /// Equal weight on every mean and covariance term.
    pub fn uniform(stages: Vec<FeatureMap>) -> Result<Self> {
        let total: usize = stages.iter().map(|s| s.channels).sum();
        let w = 0.5 / total.max(1) as f64;
        let alpha = stages.iter().map(|s| vec![w; s.channels]).collect::<Vec<_>>();
        let beta = alpha.clone();
        Self::new(stages, alpha, beta)
    }

    pub fn stages(&self) -> &[FeatureMap] {
        &self.stages
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<f64>] {
        &self.beta
    }
}

/// Deep image structure and texture similarity over supplied features.
///
/// Statistics are global per channel with population normalisation. The
/// two stacks must agree in shape and weights.
pub fn dists(reference: &FeatureStack, distorted: &FeatureStack) -> Result<MetricScore> {
    if reference.stages.len() != distorted.stages.len() {
        return Err(Error::DimensionMismatch(format!(
            "feature stacks have {} and {} stages",
            reference.stages.len(),
            distorted.stages.len()
        )));
    }
    if reference.alpha != distorted.alpha || reference.beta != distorted.beta {
        return Err(Error::InvalidParameter("feature stacks carry different DISTS weights".into()));
    }
    let mut sim = 0.0;
    for (s, (a, b)) in reference.stages.iter().zip(&distorted.stages).enumerate() {
        if (a.channels, a.height, a.width) != (b.channels, b.height, b.width) {
            return Err(Error::DimensionMismatch(format!(
                "stage {s}: {}x{}x{} vs {}x{}x{}",
                a.channels, a.height, a.width, b.channels, b.height, b.width
            )));
        }
        for c in 0..a.channels {
            let (x, y) = (a.channel(c), b.channel(c));
            let n = x.len() as f64;
            let mx = x.iter().sum::<f64>() / n;
            let my = y.iter().sum::<f64>() / n;
            let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
            for (p, q) in x.iter().zip(y) {
                vx += (p - mx) * (p - mx);
                vy += (q - my) * (q - my);
                cov += (p - mx) * (q - my);
            }
            let (vx, vy, cov) = (vx / n, vy / n, cov / n);
            let texture = (2.0 * mx * my + C1) / (mx * mx + my * my + C1);
            let structure = (2.0 * cov + C2) / (vx + vy + C2);
            sim += reference.alpha[s][c] * texture + reference.beta[s][c] * structure;
        }
    }
    Ok(MetricScore::new(MetricId::Dists, 1.0 - sim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(c: usize, data: Vec<f64>) -> FeatureMap {
        let n = data.len() / c;
        FeatureMap::new(c, 1, n, data).unwrap()
    }

    #[test]
    fn identical_stacks_score_zero() {
        let st = FeatureStack::new(
            vec![map(2, vec![1.0, 2.0, 3.0, 4.0, 0.5, 0.1]), map(1, vec![5.0, 6.0])],
            vec![vec![0.1, 0.2], vec![0.3]],
            vec![vec![0.05, 0.05], vec![0.3]],
        )
        .unwrap();
        assert!(dists(&st, &st).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn constant_closed_form() {
        let a = FeatureStack::uniform(vec![map(1, vec![0.5; 16])]).unwrap();
        let b = FeatureStack::uniform(vec![map(1, vec![0.25; 16])]).unwrap();
        let s1 = (2.0 * 0.125 + C1) / (0.3125 + C1);
        let expect = 1.0 - 0.5 * s1 - 0.5;
        assert!((dists(&a, &b).unwrap().value - expect).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights_and_shapes() {
        assert!(FeatureStack::new(vec![map(1, vec![1.0])], vec![vec![0.6]], vec![vec![0.6]]).is_err());
        assert!(FeatureStack::new(vec![map(1, vec![1.0])], vec![vec![-0.5]], vec![vec![1.5]]).is_err());
        let a = FeatureStack::uniform(vec![map(1, vec![1.0, 2.0])]).unwrap();
        let b = FeatureStack::uniform(vec![map(2, vec![1.0, 2.0])]).unwrap();
        assert!(dists(&a, &b).is_err());
    }
}

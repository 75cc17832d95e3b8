use super::io::KappaPair;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KappaWeights {
    Linear,
    #[default]
    Quadratic,
}

impl FromStr for KappaWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            _ => Err(Error::InvalidParameter(format!("unknown kappa weighting '{s}'"))),
        }
    }
}

/// Weighted Cohen's kappa between two ratings of the same items on the
/// scale `1..=levels`.
///
/// Disagreement weights are `|i - j| / (levels - 1)`, squared for the
/// quadratic scheme. When the expected disagreement is zero (both sessions
/// use one level throughout) the agreement is perfect and 1 is returned.
pub fn weighted_kappa(v1: &[u8], v2: &[u8], weights: KappaWeights, levels: usize) -> Result<f64> {
    if v1.len() != v2.len() {
        return Err(Error::DimensionMismatch(format!(
            "rating lengths {} and {}",
            v1.len(),
            v2.len()
        )));
    }
    if v1.len() < 2 {
        return Err(Error::TooSmall {
            what: "number of rated items",
            got: v1.len(),
            need: 2,
        });
    }
    if levels < 2 {
        return Err(Error::InvalidParameter("kappa needs at least two levels".into()));
    }
    if let Some(bad) = v1.iter().chain(v2).find(|&&s| s == 0 || s as usize > levels) {
        return Err(Error::InvalidInput(format!("score {bad} outside 1..{levels}")));
    }
    let n = v1.len() as f64;
    let mut observed = vec![0.0; levels * levels];
    let mut rows = vec![0.0; levels];
    let mut cols = vec![0.0; levels];
    for (&a, &b) in v1.iter().zip(v2) {
        let (i, j) = (a as usize - 1, b as usize - 1);
        observed[i * levels + j] += 1.0 / n;
        rows[i] += 1.0 / n;
        cols[j] += 1.0 / n;
    }
    let (mut wo, mut we) = (0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let d = i.abs_diff(j) as f64 / (levels - 1) as f64;
            let w = match weights {
                KappaWeights::Linear => d,
                KappaWeights::Quadratic => d * d,
            };
            wo += w * observed[i * levels + j];
            we += w * rows[i] * cols[j];
        }
    }
    if we == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - wo / we)
}

/// Kappa of every rater's first session against their second, pooled over
/// items and criteria.
pub fn kappa_by_rater(pairs: &[KappaPair], weights: KappaWeights, levels: usize) -> Result<BTreeMap<String, f64>> {
    let mut grouped: BTreeMap<&str, (Vec<u8>, Vec<u8>)> = BTreeMap::new();
    for p in pairs {
        let e = grouped.entry(p.rater_id.as_str()).or_default();
        e.0.push(p.first);
        e.1.push(p.second);
    }
    grouped
        .into_iter()
        .map(|(r, (a, b))| Ok((r.to_string(), weighted_kappa(&a, &b, weights, levels)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement() {
        let v = [1, 2, 3, 4, 2, 2];
        assert_eq!(weighted_kappa(&v, &v, KappaWeights::Quadratic, 4).unwrap(), 1.0);
        assert_eq!(weighted_kappa(&[3, 3], &[3, 3], KappaWeights::Linear, 4).unwrap(), 1.0);
    }

    #[test]
    fn two_level_fixture() {
        // O = [[.25,.25],[.25,.25]], E = same: no better than chance.
        let k = weighted_kappa(&[1, 1, 2, 2], &[1, 2, 1, 2], KappaWeights::Quadratic, 2).unwrap();
        assert!(k.abs() < 1e-12);
        // complete disagreement on two levels
        let k = weighted_kappa(&[1, 2], &[2, 1], KappaWeights::Linear, 2).unwrap();
        assert!((k + 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(weighted_kappa(&[1, 5], &[1, 2], KappaWeights::Linear, 4).is_err());
        assert!(weighted_kappa(&[1, 2], &[1], KappaWeights::Linear, 4).is_err());
        assert!("cubic".parse::<KappaWeights>().is_err());
    }
}

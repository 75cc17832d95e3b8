use super::{check_lengths, mean};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KendallVariant {
    /// No tie correction.
    #[default]
    TauA,
    /// Tie-corrected denominator.
    TauB,
}

/// 1-based ranks; tied values share the mean of their positions.
pub(crate) fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson product-moment correlation; undefined for constant input.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y, 2)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 || !(sxx.is_finite() && syy.is_finite()) {
        return Err(Error::InvalidInput("correlation of constant or non-finite input".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation: Pearson correlation of average ranks.
pub fn srcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y, 3)?;
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN in rank correlation input".into()));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall correlation over all `i < j` pairs.
pub fn krcc(x: &[f64], y: &[f64], variant: KendallVariant) -> Result<f64> {
    check_lengths(x, y, 2)?;
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN in rank correlation input".into()));
    }
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = sign(x[i] - x[j]);
            let b = sign(y[i] - y[j]);
            s += a * b;
            tx += a.abs();
            ty += b.abs();
        }
    }
    match variant {
        KendallVariant::TauA => Ok(2.0 * s as f64 / (n * (n - 1)) as f64),
        KendallVariant::TauB => {
            if tx == 0 || ty == 0 {
                return Err(Error::InvalidInput("tau-b of constant input".into()));
            }
            Ok(s as f64 / ((tx as f64) * (ty as f64)).sqrt())
        }
    }
}

fn sign(v: f64) -> i64 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

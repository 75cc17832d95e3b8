use super::FeatureSet;
use crate::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct KidParams {
    pub degree: i32,
    /// Defaults to `1/d` when `None`.
    pub gamma: Option<f64>,
    pub coef0: f64,
    /// Size of each random subset; `None` uses the full sets once.
    pub subset_size: Option<usize>,
    /// Number of random subsets; defaults to 100 when only the size is set.
    pub subsets: Option<usize>,
    pub seed: u64,
}

impl Default for KidParams {
    fn default() -> Self {
        Self {
            degree: 3,
            gamma: None,
            coef0: 1.0,
            subset_size: None,
            subsets: None,
            seed: 0,
        }
    }
}

/// Kernel inception distance: unbiased MMD² with a polynomial kernel.
///
/// Returns the mean and population standard deviation over subsets; the
/// deviation is 0 for a single full-set estimate.
///
/// With equally sized samples the estimator pairs `x_i` with `y_i` and
/// drops every `i == j` term, cross terms included, which keeps it unbiased
/// and makes it exactly 0 for identical sets. Unequal sizes use the
/// classical form with the full cross-kernel mean.
pub fn kid(a: &FeatureSet, b: &FeatureSet, p: &KidParams) -> Result<(f64, f64)> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "feature dimensions {} and {}",
            a.d(),
            b.d()
        )));
    }
    let min_n = a.n().min(b.n());
    if min_n < 2 {
        return Err(Error::TooSmall {
            what: "samples per feature set for KID",
            got: min_n,
            need: 2,
        });
    }
    let gamma = p.gamma.unwrap_or(1.0 / a.d() as f64);
    let kernel = |x: &[f64], y: &[f64]| {
        let dot: f64 = x.iter().zip(y).map(|(u, v)| u * v).sum();
        (gamma * dot + p.coef0).powi(p.degree)
    };
    let kxx = gram(a, a, &kernel);
    let kyy = gram(b, b, &kernel);
    let kxy = gram(a, b, &kernel);

    if p.subset_size.is_none() && p.subsets.is_none() {
        let ia: Vec<usize> = (0..a.n()).collect();
        let ib: Vec<usize> = (0..b.n()).collect();
        return Ok((mmd2(&kxx, &kyy, &kxy, a.n(), b.n(), &ia, &ib), 0.0));
    }
    let size = p.subset_size.unwrap_or(min_n.min(1000));
    if size < 2 || size > min_n {
        return Err(Error::InvalidParameter(format!(
            "KID subset size {size} outside [2, {min_n}]"
        )));
    }
    let count = p.subsets.unwrap_or(100);
    if count == 0 {
        return Err(Error::InvalidParameter("KID needs at least one subset".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let ia = sample(&mut rng, a.n(), size).into_vec();
        let ib = if a.n() == b.n() {
            ia.clone()
        } else {
            sample(&mut rng, b.n(), size).into_vec()
        };
        values.push(mmd2(&kxx, &kyy, &kxy, a.n(), b.n(), &ia, &ib));
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    Ok((mean, var.sqrt()))
}

fn gram(a: &FeatureSet, b: &FeatureSet, k: &impl Fn(&[f64], &[f64]) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.n() * b.n());
    for i in 0..a.n() {
        for j in 0..b.n() {
            out.push(k(a.row(i), b.row(j)));
        }
    }
    out
}

/// Estimate on the rows `ia` of the first set and `ib` of the second.
fn mmd2(kxx: &[f64], kyy: &[f64], kxy: &[f64], na: usize, nb: usize, ia: &[usize], ib: &[usize]) -> f64 {
    let (m, n) = (ia.len(), ib.len());
    let mut sxx = 0.0;
    for (p, &i) in ia.iter().enumerate() {
        for (q, &j) in ia.iter().enumerate() {
            if p != q {
                sxx += kxx[i * na + j];
            }
        }
    }
    let mut syy = 0.0;
    for (p, &i) in ib.iter().enumerate() {
        for (q, &j) in ib.iter().enumerate() {
            if p != q {
                syy += kyy[i * nb + j];
            }
        }
    }
    let mut sxy = 0.0;
    if m == n {
        for (p, &i) in ia.iter().enumerate() {
            for (q, &j) in ib.iter().enumerate() {
                if p != q {
                    sxy += kxy[i * nb + j];
                }
            }
        }
        let norm = (m * (m - 1)) as f64;
        // sxy sums each unordered pair once per direction, as sxx and syy do
        (sxx + syy - 2.0 * sxy) / norm
    } else {
        for &i in ia {
            for &j in ib {
                sxy += kxy[i * nb + j];
            }
        }
        sxx / (m * (m - 1)) as f64 + syy / (n * (n - 1)) as f64 - 2.0 * sxy / (m * n) as f64
    }
}

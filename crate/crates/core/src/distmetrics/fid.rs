use super::{mean_and_centered, FeatureSet};
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Relative tolerance for negative eigenvalues produced by round-off.
const NEG_EIG_TOL: f64 = 1e-8;

/// Fréchet distance between Gaussians fitted to two feature sets.
///
/// Covariances use the `n - 1` denominator. When the dimension exceeds the
/// sample counts the trace of the matrix square root is taken from the
/// singular values of the small cross-Gram matrix instead of a `d`×`d`
/// eigendecomposition; both routes compute the same quantity.
pub fn fid(a: &FeatureSet, b: &FeatureSet) -> Result<f64> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "feature dimensions {} and {}",
            a.d(),
            b.d()
        )));
    }
    for (name, fs) in [("first", a), ("second", b)] {
        if fs.n() < 2 {
            return Err(Error::TooSmall {
                what: if name == "first" { "samples in first feature set" } else { "samples in second feature set" },
                got: fs.n(),
                need: 2,
            });
        }
    }
    // Squared distance; negative values are cancellation round-off.
    let v = if a.d() > a.n().max(b.n()) { fid_dual(a, b)? } else { fid_primal(a, b)? };
    Ok(v.max(0.0))
}

fn mean_term(ma: &[f64], mb: &[f64]) -> f64 {
    ma.iter().zip(mb).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn covariance(n: usize, d: usize, centered: &[f64]) -> DMatrix<f64> {
    let x = DMatrix::from_row_slice(n, d, centered);
    (x.transpose() * &x) / (n as f64 - 1.0)
}

/// Eigenvalues clamped at zero when only slightly negative.
fn clamped_eigen(m: DMatrix<f64>, what: &str) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let sym = (&m + m.transpose()) * 0.5;
    let mut eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    for v in eig.eigenvalues.iter_mut() {
        if *v < 0.0 {
            if *v < -NEG_EIG_TOL * max {
                return Err(Error::Numerical(format!(
                    "{what} has eigenvalue {v:e} below tolerance (largest {max:e})"
                )));
            }
            *v = 0.0;
        }
    }
    Ok(eig)
}

pub(crate) fn fid_primal(a: &FeatureSet, b: &FeatureSet) -> Result<f64> {
    let d = a.d();
    let (ma, ca) = mean_and_centered(a);
    let (mb, cb) = mean_and_centered(b);
    let sa = covariance(a.n(), d, &ca);
    let sb = covariance(b.n(), d, &cb);
    let ea = clamped_eigen(sa.clone(), "first covariance")?;
    let root_a = &ea.eigenvectors
        * DMatrix::from_diagonal(&ea.eigenvalues.map(f64::sqrt))
        * ea.eigenvectors.transpose();
    let inner = &root_a * &sb * &root_a;
    let ei = clamped_eigen(inner, "covariance product")?;
    let tr_root: f64 = ei.eigenvalues.iter().map(|v| v.sqrt()).sum();
    Ok(mean_term(&ma, &mb) + sa.trace() + sb.trace() - 2.0 * tr_root)
}

/// Trace of the root equals the nuclear norm of `Xa Xbᵀ / sqrt((na-1)(nb-1))`
/// for centred data matrices.
pub(crate) fn fid_dual(a: &FeatureSet, b: &FeatureSet) -> Result<f64> {
    let d = a.d();
    let (ma, ca) = mean_and_centered(a);
    let (mb, cb) = mean_and_centered(b);
    let xa = DMatrix::from_row_slice(a.n(), d, &ca);
    let xb = DMatrix::from_row_slice(b.n(), d, &cb);
    let (da, db) = (a.n() as f64 - 1.0, b.n() as f64 - 1.0);
    let tr_a = ca.iter().map(|v| v * v).sum::<f64>() / da;
    let tr_b = cb.iter().map(|v| v * v).sum::<f64>() / db;
    let cross = (&xa * xb.transpose()) / (da * db).sqrt();
    let nuclear: f64 = cross.singular_values().iter().sum();
    Ok(mean_term(&ma, &mb) + tr_a + tr_b - 2.0 * nuclear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(n: usize, d: usize, seed: u64) -> FeatureSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureSet::new(n, d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    #[test]
    fn one_dimensional_closed_form() {
        let a = FeatureSet::new(2, 1, vec![0.0, 2.0]).unwrap();
        let b = FeatureSet::new(2, 1, vec![1.0, 3.0]).unwrap();
        assert!((fid(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_distance_is_zero() {
        let x = random_set(40, 6, 1);
        assert!(fid(&x, &x).unwrap().abs() < 1e-8);
        let wide = random_set(9, 300, 2);
        assert!(fid(&wide, &wide).unwrap().abs() < 1e-8);
    }

    #[test]
    fn primal_and_dual_agree() {
        for seed in 0..5 {
            let a = random_set(20, 6, seed);
            let b = random_set(25, 6, seed + 100);
            let p = fid_primal(&a, &b).unwrap();
            let q = fid_dual(&a, &b).unwrap();
            assert!((p - q).abs() < 1e-9 * p.abs().max(1.0), "{p} vs {q}");
        }
    }

    #[test]
    fn dimension_and_size_errors() {
        assert!(fid(&random_set(5, 3, 0), &random_set(5, 4, 0)).is_err());
        assert!(fid(&random_set(1, 3, 0), &random_set(5, 3, 0)).is_err());
    }
}

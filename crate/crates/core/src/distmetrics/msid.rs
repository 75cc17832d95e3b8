use super::FeatureSet;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct MsidParams {
    pub k_neighbors: usize,
    pub t_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub lanczos_steps: usize,
    pub probes: usize,
    pub seed: u64,
    /// Sets with at most this many points use an exact eigendecomposition.
    pub exact_threshold: usize,
}

impl Default for MsidParams {
    fn default() -> Self {
        Self {
            k_neighbors: 5,
            t_points: 50,
            t_min: 0.1,
            t_max: 10.0,
            lanczos_steps: 10,
            probes: 100,
            seed: 0,
            exact_threshold: 512,
        }
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_t_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Multi-scale intrinsic distance.
///
/// Each set becomes a symmetrised k-nearest-neighbour graph whose
/// normalised-Laplacian heat trace `tr exp(-tL)` is sampled on the `t`
/// grid. Descriptors are `t · trace / n`, and the score is the largest
/// difference after weighting by `exp(-2(t + 1/t))`.
pub fn msid(a: &FeatureSet, b: &FeatureSet, p: &MsidParams) -> Result<f64> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "feature dimensions {} and {}",
            a.d(),
            b.d()
        )));
    }
    let ts = log_t_grid(p.t_min, p.t_max, p.t_points);
    let ha = descriptor(a, &ts, p)?;
    let hb = descriptor(b, &ts, p)?;
    Ok(ts
        .iter()
        .zip(ha.iter().zip(&hb))
        .map(|(t, (x, y))| (-2.0 * (t + 1.0 / t)).exp() * (x - y).abs())
        .fold(0.0, f64::max))
}

fn descriptor(fs: &FeatureSet, ts: &[f64], p: &MsidParams) -> Result<Vec<f64>> {
    let g = KnnGraph::build(fs, p.k_neighbors)?;
    let traces = if fs.n() <= p.exact_threshold {
        heat_trace_exact_graph(&g, ts)
    } else {
        heat_trace_slq_graph(&g, ts, p)
    };
    let n = fs.n() as f64;
    Ok(traces.iter().zip(ts).map(|(h, t)| t * h / n).collect())
}

/// `tr exp(-tL)` of the set's graph by full eigendecomposition.
pub fn heat_trace_exact(fs: &FeatureSet, k_neighbors: usize, ts: &[f64]) -> Result<Vec<f64>> {
    Ok(heat_trace_exact_graph(&KnnGraph::build(fs, k_neighbors)?, ts))
}

/// `tr exp(-tL)` by stochastic Lanczos quadrature.
pub fn heat_trace_slq(fs: &FeatureSet, ts: &[f64], p: &MsidParams) -> Result<Vec<f64>> {
    Ok(heat_trace_slq_graph(&KnnGraph::build(fs, p.k_neighbors)?, ts, p))
}

/// Binary symmetric adjacency lists plus degrees.
struct KnnGraph {
    neighbors: Vec<Vec<usize>>,
    inv_sqrt_deg: Vec<f64>,
}

impl KnnGraph {
    fn build(fs: &FeatureSet, k: usize) -> Result<Self> {
        let n = fs.n();
        if k == 0 {
            return Err(Error::InvalidParameter("k_neighbors must be positive".into()));
        }
        if n < k + 1 {
            return Err(Error::TooSmall {
                what: "samples for the neighbour graph",
                got: n,
                need: k + 1,
            });
        }
        let mut adj = vec![Vec::new(); n];
        let mut dist = Vec::with_capacity(n);
        for i in 0..n {
            dist.clear();
            let xi = fs.row(i);
            for j in (0..n).filter(|&j| j != i) {
                let d: f64 = xi.iter().zip(fs.row(j)).map(|(u, v)| (u - v) * (u - v)).sum();
                dist.push((d, j));
            }
            dist.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            for &(_, j) in &dist[..k] {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let inv_sqrt_deg = adj.iter().map(|l| 1.0 / (l.len() as f64).sqrt()).collect();
        Ok(Self {
            neighbors: adj,
            inv_sqrt_deg,
        })
    }

    fn len(&self) -> usize {
        self.neighbors.len()
    }

    /// `y = L x` with `L = I - D^{-1/2} A D^{-1/2}`.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.len() {
            let s: f64 = self.neighbors[i]
                .iter()
                .map(|&j| x[j] * self.inv_sqrt_deg[j])
                .sum();
            y[i] = x[i] - self.inv_sqrt_deg[i] * s;
        }
    }

    fn dense_laplacian(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut l = DMatrix::identity(n, n);
        for i in 0..n {
            for &j in &self.neighbors[i] {
                l[(i, j)] = -self.inv_sqrt_deg[i] * self.inv_sqrt_deg[j];
            }
        }
        l
    }

    /// Unit null vectors `D^{1/2} 1_C`, one per connected component.
    fn null_space(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut v = vec![0.0; n];
            while let Some(i) = stack.pop() {
                v[i] = 1.0 / self.inv_sqrt_deg[i];
                for &j in &self.neighbors[i] {
                    if comp[j] == usize::MAX {
                        comp[j] = id;
                        stack.push(j);
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
        out
    }
}

fn heat_trace_exact_graph(g: &KnnGraph, ts: &[f64]) -> Vec<f64> {
    let eig = SymmetricEigen::new(g.dense_laplacian());
    ts.iter()
        .map(|t| eig.eigenvalues.iter().map(|l| (-t * l.max(0.0)).exp()).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let c = dot(v, u);
        v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
    }
}

/// Each component's null vector contributes exactly 1 to the trace for
/// every `t`; probes are projected off that subspace so only the rest of
/// the spectrum is estimated.
fn heat_trace_slq_graph(g: &KnnGraph, ts: &[f64], p: &MsidParams) -> Vec<f64> {
    let n = g.len();
    let null = g.null_space();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut acc = vec![0.0; ts.len()];
    let steps = p.lanczos_steps.max(1).min(n);
    for _ in 0..p.probes {
        let mut z: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        project_out(&mut z, &null);
        let znorm2 = dot(&z, &z);
        if znorm2 < 1e-24 {
            continue;
        }
        let (alpha, beta) = lanczos(g, &z, steps, &null);
        let m = alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        for (slot, &tv) in acc.iter_mut().zip(ts) {
            let q: f64 = (0..m)
                .map(|k| eig.eigenvectors[(0, k)].powi(2) * (-tv * eig.eigenvalues[k]).exp())
                .sum();
            *slot += znorm2 * q;
        }
    }
    let probes = p.probes.max(1) as f64;
    acc.iter().map(|s| null.len() as f64 + s / probes).collect()
}

/// Lanczos tridiagonalisation with full reorthogonalisation; stops early
/// on breakdown.
fn lanczos(g: &KnnGraph, start: &[f64], steps: usize, deflate: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = start.len();
    let norm = dot(start, start).sqrt();
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|v| v / norm).collect()];
    let mut alpha = Vec::with_capacity(steps);
    let mut beta = Vec::with_capacity(steps);
    let mut w = vec![0.0; n];
    for j in 0..steps {
        g.apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        if j + 1 == steps {
            break;
        }
        for _ in 0..2 {
            project_out(&mut w, deflate);
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot(&w, &w).sqrt();
        if b < 1e-10 {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|v| v / b).collect());
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(n: usize, d: usize, seed: u64) -> FeatureSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureSet::new(n, d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    #[test]
    fn grid_endpoints() {
        let g = log_t_grid(0.1, 10.0, 50);
        assert_eq!(g.len(), 50);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[49] - 10.0).abs() < 1e-12);
        assert!((g[1] / g[0] - g[49] / g[48]).abs() < 1e-12);
    }

    #[test]
    fn self_distance_and_symmetry() {
        let a = blob(40, 3, 1);
        let b = blob(45, 3, 2);
        let p = MsidParams::default();
        assert_eq!(msid(&a, &a, &p).unwrap(), 0.0);
        assert_eq!(msid(&a, &b, &p).unwrap(), msid(&b, &a, &p).unwrap());
    }

    #[test]
    fn heat_trace_at_zero_is_n() {
        let a = blob(20, 2, 3);
        let h = heat_trace_exact(&a, 5, &[0.0, 1.0]).unwrap();
        assert!((h[0] - 20.0).abs() < 1e-9);
        assert!(h[1] < 20.0 && h[1] >= 1.0);
    }

    #[test]
    fn disconnected_graph_counts_components() {
        let mut data = Vec::new();
        for i in 0..12 {
            let off = if i < 6 { 0.0 } else { 1000.0 };
            data.extend([off + i as f64 * 0.01, off]);
        }
        let fs = FeatureSet::new(12, 2, data).unwrap();
        let ts = [50.0];
        let exact = heat_trace_exact(&fs, 5, &ts).unwrap();
        let slq = heat_trace_slq(&fs, &ts, &MsidParams { k_neighbors: 5, ..MsidParams::default() }).unwrap();
        assert!((exact[0] - 2.0).abs() < 1e-6, "{exact:?}");
        assert!((slq[0] - 2.0).abs() < 1e-6, "{slq:?}");
    }

    #[test]
    fn too_few_points() {
        let a = blob(5, 2, 0);
        assert!(msid(&a, &a, &MsidParams::default()).is_err());
    }
}

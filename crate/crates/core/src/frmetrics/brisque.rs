use super::{MetricId, MetricScore};
use crate::sigproc::{downsample2, gaussian_kernel, reflect_index};
use crate::{Error, GrayImage, Plane, Result};
use statrs::function::gamma::ln_gamma;
use std::path::Path;
use std::sync::OnceLock;

pub const BRISQUE_FEATURES: usize = 36;
const MIN_SIDE: usize = 32;
const MSCN_C: f64 = 1.0 / 255.0;
const GRID_START: f64 = 0.2;
const GRID_STEP: f64 = 0.001;
const GRID_LEN: usize = 9800;

/// Neighbour offsets `(dy, dx)` for the pairwise products.
const SHIFTS: [(usize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

/// Natural-scene statistics of one image, two scales of 18 values each:
/// GGD shape and variance of the MSCN field, then AGGD shape, mean, left
/// and right variance for each of the four neighbour products.
#[derive(Clone, Debug, PartialEq)]
pub struct BrisqueFeatures {
    values: [f64; BRISQUE_FEATURES],
}

impl BrisqueFeatures {
    pub fn values(&self) -> &[f64; BRISQUE_FEATURES] {
        &self.values
    }
}

/// Linear scoring model: 36 weights followed by a bias.
#[derive(Clone, Debug, PartialEq)]
pub struct BrisqueModel {
    weights: [f64; BRISQUE_FEATURES],
    bias: f64,
}

impl BrisqueModel {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        let weights: [f64; BRISQUE_FEATURES] = weights.try_into().map_err(|w: Vec<f64>| {
            Error::InvalidInput(format!("BRISQUE model needs {BRISQUE_FEATURES} weights, got {}", w.len()))
        })?;
        Ok(Self { weights, bias })
    }

    /// Whitespace-separated floats: 36 weights then the bias.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::format("brisque model", format!("not a number: '{t}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != BRISQUE_FEATURES + 1 {
            return Err(Error::format(
                "brisque model",
                format!("expected {} values, got {}", BRISQUE_FEATURES + 1, values.len()),
            ));
        }
        Self::new(values[..BRISQUE_FEATURES].to_vec(), values[BRISQUE_FEATURES])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

pub fn brisque_score(features: &BrisqueFeatures, model: &BrisqueModel) -> MetricScore {
    let dot: f64 = features.values.iter().zip(&model.weights).map(|(f, w)| f * w).sum();
    MetricScore::new(MetricId::Brisque, dot + model.bias)
}

/// Extracts the 36 features. A flat image yields shapes at the bottom of
/// the fitting grid and zero variances and means.
pub fn brisque_features(img: &GrayImage) -> Result<BrisqueFeatures> {
    let side = img.width().min(img.height());
    if side < MIN_SIDE {
        return Err(Error::TooSmall {
            what: "image side for BRISQUE",
            got: side,
            need: MIN_SIDE,
        });
    }
    let mut plane = img.to_plane().map(|v| v / img.data_range() as f64);
    let mut values = [0.0; BRISQUE_FEATURES];
    for scale in 0..2 {
        if scale > 0 {
            plane = downsample2(&plane)?;
        }
        let m = mscn(&plane)?;
        let out = &mut values[scale * 18..(scale + 1) * 18];
        let (shape, var) = fit_ggd(m.data());
        out[0] = shape;
        out[1] = var;
        for (i, &(dy, dx)) in SHIFTS.iter().enumerate() {
            let prod = neighbour_products(&m, dy, dx);
            let f = fit_aggd(&prod);
            out[2 + 4 * i..6 + 4 * i].copy_from_slice(&f);
        }
    }
    Ok(BrisqueFeatures { values })
}

/// Mean-subtracted contrast-normalised coefficients.
///
/// The deviation from the local mean is accumulated as weighted
/// differences to the neighbours, and the local variance as weighted
/// squared deviations, so a flat neighbourhood yields exactly zero.
pub(crate) fn mscn(p: &Plane) -> Result<Plane> {
    let k = gaussian_kernel(7, 7.0 / 6.0)?;
    let total: f64 = k.weights().iter().sum();
    let weights: Vec<f64> = k.weights().iter().map(|v| v / total).collect();
    let (w, h) = (p.width(), p.height());
    let r = 3isize;
    let mut out = Plane::zeros(w, h);
    let mut patch = [0.0; 49];
    for y in 0..h {
        for x in 0..w {
            let c = p.get(x, y);
            let mut dev = 0.0;
            for j in 0..7 {
                for i in 0..7 {
                    let v = p.get(
                        reflect_index(x as isize + i - r, w),
                        reflect_index(y as isize + j - r, h),
                    );
                    patch[(j * 7 + i) as usize] = v;
                    dev += weights[(j * 7 + i) as usize] * (c - v);
                }
            }
            let mu = c - dev;
            let var: f64 = patch.iter().zip(&weights).map(|(v, wt)| wt * (v - mu) * (v - mu)).sum();
            out.set(x, y, dev / (var.sqrt() + MSCN_C));
        }
    }
    Ok(out)
}

fn neighbour_products(m: &Plane, dy: usize, dx: isize) -> Vec<f64> {
    let (w, h) = (m.width(), m.height());
    let (x0, x1) = if dx >= 0 { (0, w - dx as usize) } else { (1, w) };
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h - dy {
        for x in x0..x1 {
            let nx = (x as isize + dx) as usize;
            out.push(m.get(x, y) * m.get(nx, y + dy));
        }
    }
    out
}

struct Grid {
    shapes: Vec<f64>,
    /// Γ(1/a)Γ(3/a)/Γ(2/a)²
    ggd_ratio: Vec<f64>,
}

fn grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let shapes: Vec<f64> = (0..GRID_LEN).map(|i| GRID_START + i as f64 * GRID_STEP).collect();
        let ggd_ratio = shapes
            .iter()
            .map(|&a| (ln_gamma(1.0 / a) + ln_gamma(3.0 / a) - 2.0 * ln_gamma(2.0 / a)).exp())
            .collect();
        Grid { shapes, ggd_ratio }
    })
}

/// Index of the first grid point minimising `cost`.
fn argmin(cost: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for i in 0..GRID_LEN {
        let c = cost(i);
        if c < best_cost {
            best = i;
            best_cost = c;
        }
    }
    best
}

/// Moment-matched generalised Gaussian: `(shape, variance)`.
pub(crate) fn fit_ggd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let var = x.iter().map(|v| v * v).sum::<f64>() / n;
    let e = x.iter().map(|v| v.abs()).sum::<f64>() / n;
    let g = grid();
    if var == 0.0 || e == 0.0 {
        return (g.shapes[0], 0.0);
    }
    let rho = var / (e * e);
    let i = argmin(|i| (rho - g.ggd_ratio[i]).abs());
    (g.shapes[i], var)
}

/// Moment-matched asymmetric generalised Gaussian:
/// `[shape, mean, left variance, right variance]`.
pub(crate) fn fit_aggd(x: &[f64]) -> [f64; 4] {
    let (mut ls, mut ln, mut rs, mut rn) = (0.0, 0usize, 0.0, 0usize);
    let (mut abs_sum, mut sq_sum) = (0.0, 0.0);
    for &v in x {
        if v < 0.0 {
            ls += v * v;
            ln += 1;
        } else if v > 0.0 {
            rs += v * v;
            rn += 1;
        }
        abs_sum += v.abs();
        sq_sum += v * v;
    }
    let g = grid();
    if sq_sum == 0.0 {
        return [g.shapes[0], 0.0, 0.0, 0.0];
    }
    let left_var = if ln > 0 { ls / ln as f64 } else { 0.0 };
    let right_var = if rn > 0 { rs / rn as f64 } else { 0.0 };
    let (l, r) = (left_var.sqrt(), right_var.sqrt());
    let n = x.len() as f64;
    let rhat = (abs_sum / n).powi(2) / (sq_sum / n);
    let target = if ln > 0 && rn > 0 {
        let gh = l / r;
        rhat * (gh.powi(3) + 1.0) * (gh + 1.0) / (gh * gh + 1.0).powi(2)
    } else {
        rhat
    };
    let i = argmin(|i| (1.0 / g.ggd_ratio[i] - target).powi(2));
    let a = g.shapes[i];
    let mean = (r - l)
        * (ln_gamma(2.0 / a) - ln_gamma(1.0 / a)).exp()
        * (0.5 * (ln_gamma(1.0 / a) - ln_gamma(3.0 / a))).exp();
    [a, mean, left_var, right_var]
}

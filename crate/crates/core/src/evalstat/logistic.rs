use super::rank::pearson;
use super::{check_lengths, mean};
use crate::{Error, Result};

const MAX_ITER: usize = 2000;
const TOL: f64 = 1e-10;
const MAX_RESTARTS: usize = 8;

/// Five-parameter logistic with linear term:
/// `Q(x) = b1 (1/2 - 1/(1 + exp(b2 (x - b3)))) + b4 x + b5`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticFit {
    pub beta: [f64; 5],
    /// Root-mean-square residual on the fitted data.
    pub rmse: f64,
}

impl LogisticFit {
    pub fn predict(&self, x: f64) -> f64 {
        q(&self.beta, x)
    }
}

fn q(b: &[f64; 5], x: f64) -> f64 {
    b[0] * (0.5 - 1.0 / (1.0 + (b[1] * (x - b[2])).exp())) + b[3] * x + b[4]
}

fn rmse(b: &[f64; 5], x: &[f64], y: &[f64]) -> f64 {
    let ss: f64 = x.iter().zip(y).map(|(&a, &t)| (q(b, a) - t).powi(2)).sum();
    let r = (ss / x.len() as f64).sqrt();
    if r.is_finite() {
        r
    } else {
        f64::INFINITY
    }
}

/// Least-squares fit of `Q` by Nelder–Mead.
///
/// The search runs on standardised `x` and `y` from four deterministic
/// starts and restarts each until it stops improving. The exact linear
/// fit (`b1 = 0`) is always a candidate, and every candidate gets a final
/// least-squares affine correction of its output, so the result is never
/// worse than the best straight line.
pub fn fit_logistic(x: &[f64], y: &[f64]) -> Result<LogisticFit> {
    check_lengths(x, y, 6)?;
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("logistic fit needs finite values".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let sx = (x.iter().map(|v| (v - mx) * (v - mx)).sum::<f64>() / x.len() as f64).sqrt();
    if sx == 0.0 {
        return Err(Error::InvalidInput("logistic fit of constant x".into()));
    }
    let sy_raw = (y.iter().map(|v| (v - my) * (v - my)).sum::<f64>() / y.len() as f64).sqrt();
    let sy = if sy_raw > 0.0 { sy_raw } else { 1.0 };
    let xs: Vec<f64> = x.iter().map(|v| (v - mx) / sx).collect();
    let ys: Vec<f64> = y.iter().map(|v| (v - my) / sy).collect();

    let slope = xs.iter().zip(&ys).map(|(a, b)| a * b).sum::<f64>() / xs.len() as f64;
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let (ymin, ymax) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = ymax - ymin;

    let mut candidates = vec![[0.0, 1.0, 0.0, slope, 0.0]];
    for centre in [median, 0.0] {
        for steep in [1.0, -1.0] {
            let start = [range, steep, centre, slope, 0.0];
            candidates.push(minimize(start, &xs, &ys));
        }
    }
    let mut best: Option<([f64; 5], f64)> = None;
    for c in candidates {
        let c = affine_refit(c, &xs, &ys);
        let r = rmse(&c, &xs, &ys);
        if best.as_ref().is_none_or(|(_, br)| r < *br) {
            best = Some((c, r));
        }
    }
    let (b, _) = best.expect("at least one candidate");
    let beta = [
        sy * b[0],
        b[1] / sx,
        mx + sx * b[2],
        sy * b[3] / sx,
        my + sy * (b[4] - b[3] * mx / sx),
    ];
    let fit_rmse = rmse(&beta, x, y);
    Ok(LogisticFit { beta, rmse: fit_rmse })
}

/// Replaces `Q` by the least-squares `a Q + c`.
fn affine_refit(b: [f64; 5], x: &[f64], y: &[f64]) -> [f64; 5] {
    let p: Vec<f64> = x.iter().map(|&v| q(&b, v)).collect();
    if p.iter().any(|v| !v.is_finite()) {
        return b;
    }
    let (mp, my) = (mean(&p), mean(y));
    let spp: f64 = p.iter().map(|v| (v - mp) * (v - mp)).sum();
    if spp == 0.0 {
        return [0.0, b[1], b[2], 0.0, my];
    }
    let spy: f64 = p.iter().zip(y).map(|(a, t)| (a - mp) * (t - my)).sum();
    let a = spy / spp;
    let c = my - a * mp;
    [a * b[0], b[1], b[2], a * b[3], a * b[4] + c]
}

fn minimize(start: [f64; 5], x: &[f64], y: &[f64]) -> [f64; 5] {
    let f = |b: &[f64; 5]| rmse(b, x, y);
    let mut best = start;
    let mut best_val = f(&best);
    for _ in 0..=MAX_RESTARTS {
        let (b, v) = nelder_mead(&f, best);
        let improved = v < best_val - TOL * 1e-3;
        if v <= best_val {
            best = b;
            best_val = v;
        }
        if !improved {
            break;
        }
    }
    best
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Stops when the spread of simplex values drops below the
/// tolerance or after the iteration cap.
fn nelder_mead(f: &impl Fn(&[f64; 5]) -> f64, start: [f64; 5]) -> ([f64; 5], f64) {
    let mut simplex: Vec<([f64; 5], f64)> = Vec::with_capacity(6);
    simplex.push((start, f(&start)));
    for i in 0..5 {
        let mut p = start;
        p[i] += if p[i].abs() > 1e-3 { 0.1 * p[i].abs() } else { 0.1 };
        simplex.push((p, f(&p)));
    }
    for _ in 0..MAX_ITER {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[5].1 - simplex[0].1).abs() <= TOL * 1e-2 {
            break;
        }
        let mut centroid = [0.0; 5];
        for (p, _) in &simplex[..5] {
            for k in 0..5 {
                centroid[k] += p[k] / 5.0;
            }
        }
        let worst = simplex[5];
        let along = |t: f64| -> [f64; 5] { std::array::from_fn(|k| centroid[k] + t * (worst.0[k] - centroid[k])) };
        let r = along(-1.0);
        let fr = f(&r);
        if fr < simplex[0].1 {
            let e = along(-2.0);
            let fe = f(&e);
            simplex[5] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < simplex[4].1 {
            simplex[5] = (r, fr);
        } else {
            let c = if fr < worst.1 { along(-0.5) } else { along(0.5) };
            let fc = f(&c);
            if fc < worst.1.min(fr) {
                simplex[5] = (c, fc);
            } else {
                let b = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    let p: [f64; 5] = std::array::from_fn(|k| b[k] + 0.5 * (s.0[k] - b[k]));
                    *s = (p, f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// Pearson correlation between the fitted logistic predictions and `y`.
pub fn plcc(x: &[f64], y: &[f64]) -> Result<f64> {
    let fit = fit_logistic(x, y)?;
    let pred: Vec<f64> = x.iter().map(|&v| fit.predict(v)).collect();
    pearson(&pred, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn recovers_exact_model() {
        let beta = [2.0, 1.0, 0.0, 0.5, 1.0];
        let x = linspace(-5.0, 5.0, 50);
        let y: Vec<f64> = x.iter().map(|&v| q(&beta, v)).collect();
        let fit = fit_logistic(&x, &y).unwrap();
        assert!(fit.rmse < 1e-6, "{:?}", fit);
        assert!((plcc(&x, &y).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_target() {
        let x = linspace(0.0, 1.0, 10);
        let fit = fit_logistic(&x, &[3.0; 10]).unwrap();
        assert!(fit.rmse < 1e-10);
        assert!(x.iter().all(|&v| (fit.predict(v) - 3.0).abs() < 1e-10));
        assert!(fit_logistic(&[1.0; 10], &x).is_err());
    }

    #[test]
    fn negative_linear() {
        let x = linspace(-2.0, 7.0, 30);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((plcc(&x, &y).unwrap().abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn monotone_data_gives_monotone_fit() {
        let x = linspace(0.0, 10.0, 40);
        let y: Vec<f64> = x.iter().map(|&v| (v / 2.0 - 2.0).tanh() + 0.01 * v).collect();
        let fit = fit_logistic(&x, &y).unwrap();
        let grid = linspace(0.0, 10.0, 200);
        for w in grid.windows(2) {
            assert!(fit.predict(w[1]) >= fit.predict(w[0]) - 1e-9);
        }
    }
}

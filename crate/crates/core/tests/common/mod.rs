//! Brute-force reference implementations and synthetic inputs shared by
//! the oracle and acceptance targets. Each oracle is a literal transcription
//! of the metric definition with no shared code paths.

#![allow(dead_code)]

use mriqa::distmetrics::{kid, FeatureSet, KidParams};
use mriqa::evalstat::{krcc, srcc, weighted_kappa, KappaWeights, KendallVariant};
use mriqa::frmetrics::{dss, gmsd, haarpsi, ssim};
use mriqa::sigproc::{conv2d, gradient_maps, GradientOperator, Kernel2D, Padding};
use mriqa::{GrayImage, ImagePair, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    GrayImage::new(w, h, (0..w * h).map(|_| r.random::<f32>()).collect()).unwrap()
}

/// Random image mixing a smooth pattern and pixel noise.
pub fn textured_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    let (fx, fy, ph): (f64, f64, f64) = (r.random_range(0.05..0.3), r.random_range(0.05..0.3), r.random_range(0.0..6.0));
    let px: Vec<f32> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let smooth = 0.5 + 0.3 * (fx * x + ph).sin() * (fy * y).cos();
            (smooth + 0.2 * (r.random::<f64>() - 0.5)).clamp(0.0, 1.0) as f32
        })
        .collect();
    GrayImage::new(w, h, px).unwrap()
}

/// Head-like phantom: a bright ellipse on a dark background holding a few
/// random inner ellipses and a faint texture.
pub fn phantom(side: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    let s = side as f64;
    let mut ellipses = vec![(0.5 * s, 0.5 * s, r.random_range(0.36..0.44) * s, r.random_range(0.40..0.46) * s, 0.0f64, 0.6f64)];
    for _ in 0..5 {
        ellipses.push((
            r.random_range(0.3..0.7) * s,
            r.random_range(0.3..0.7) * s,
            r.random_range(0.04..0.15) * s,
            r.random_range(0.04..0.15) * s,
            r.random_range(0.0..PI),
            r.random_range(-0.3..0.35),
        ));
    }
    let (tf, tp): (f64, f64) = (r.random_range(0.15..0.35), r.random_range(0.0..6.0));
    let px: Vec<f32> = (0..side * side)
        .map(|i| {
            let (x, y) = ((i % side) as f64 + 0.5, (i / side) as f64 + 0.5);
            let mut v = 0.0;
            for &(cx, cy, a, b, th, val) in &ellipses {
                let (dx, dy) = (x - cx, y - cy);
                let (u, w) = (dx * th.cos() + dy * th.sin(), -dx * th.sin() + dy * th.cos());
                if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                    v += val;
                }
            }
            if v > 0.0 {
                v += 0.05 * (tf * x + tp).sin() * (0.7 * tf * y).cos();
            }
            v.clamp(0.0, 1.0) as f32
        })
        .collect();
    GrayImage::new(side, side, px).unwrap()
}

fn pixels(img: &GrayImage) -> Vec<f64> {
    img.pixels().iter().map(|&v| v as f64 / img.data_range() as f64).collect()
}

/// numpy-style "reflect" by repeated mirroring.
fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    while i < 0 || i >= n {
        if i < 0 {
            i = -i;
        }
        if i >= n {
            i = 2 * (n - 1) - i;
        }
    }
    i as usize
}

// ---------------------------------------------------------------- conv2d

pub fn conv_oracle(img: &[f64], w: usize, h: usize, k: &[f64], kw: usize, kh: usize, pad: Padding) -> (Vec<f64>, usize, usize) {
    let (rx, ry) = ((kw / 2) as isize, (kh / 2) as isize);
    let sample = |x: isize, y: isize| -> f64 {
        match pad {
            Padding::Reflect => img[mirror(y, h) * w + mirror(x, w)],
            _ => {
                if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
                    0.0
                } else {
                    img[y as usize * w + x as usize]
                }
            }
        }
    };
    let (ow, oh, off) = if pad == Padding::Valid { (w + 1 - kw, h + 1 - kh, 0isize) } else { (w, h, 1) };
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh as isize {
        for x in 0..ow as isize {
            let (cx, cy) = if off == 1 { (x, y) } else { (x + rx, y + ry) };
            let mut acc = 0.0;
            for j in 0..kh as isize {
                for i in 0..kw as isize {
                    acc += k[(j * kw as isize + i) as usize] * sample(cx + i - rx, cy + j - ry);
                }
            }
            out[(y * ow as isize + x) as usize] = acc;
        }
    }
    (out, ow, oh)
}

pub fn check_conv2d(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(1000 + seed);
        let (w, h) = (r.random_range(5..14), r.random_range(5..14));
        let (kw, kh) = (2 * r.random_range(0..3) + 1, 2 * r.random_range(0..3) + 1);
        let img: Vec<f64> = (0..w * h).map(|_| r.random_range(-1.0..1.0)).collect();
        let k: Vec<f64> = (0..kw * kh).map(|_| r.random_range(-1.0..1.0)).collect();
        let plane = Plane::new(w, h, img.clone()).unwrap();
        let kernel = Kernel2D::new(kw, kh, k.clone()).unwrap();
        for pad in [Padding::Reflect, Padding::Zero, Padding::Valid] {
            let got = conv2d(&plane, &kernel, pad).map_err(|e| e.to_string())?;
            let (want, ow, oh) = conv_oracle(&img, w, h, &k, kw, kh, pad);
            if (got.width(), got.height()) != (ow, oh) {
                return Err(format!("seed {seed} {pad:?}: shape {}x{} vs {ow}x{oh}", got.width(), got.height()));
            }
            worst = nan_max(worst, max_abs(got.data(), &want));
        }
    }
    within(worst, 1e-12, "conv2d")
}

// -------------------------------------------------------------- gradients

pub fn check_gradients(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(2000 + seed);
        let (w, h) = (r.random_range(3..12), r.random_range(3..12));
        let img: Vec<f64> = (0..w * h).map(|_| r.random::<f64>()).collect();
        let plane = Plane::new(w, h, img.clone()).unwrap();
        for (op, a, b) in [(GradientOperator::Prewitt, 1.0 / 3.0, 1.0 / 3.0), (GradientOperator::Scharr, 3.0 / 16.0, 10.0 / 16.0)] {
            let kx = [a, 0.0, -a, b, 0.0, -b, a, 0.0, -a];
            let ky = [a, b, a, 0.0, 0.0, 0.0, -a, -b, -a];
            let (gx, _, _) = conv_oracle(&img, w, h, &kx, 3, 3, Padding::Reflect);
            let (gy, _, _) = conv_oracle(&img, w, h, &ky, 3, 3, Padding::Reflect);
            let mag: Vec<f64> = gx.iter().zip(&gy).map(|(p, q)| (p * p + q * q).sqrt()).collect();
            let g = gradient_maps(&plane, op).map_err(|e| e.to_string())?;
            worst = nan_max(nan_max(nan_max(worst, max_abs(g.gx.data(), &gx)), max_abs(g.gy.data(), &gy)), max_abs(g.magnitude.data(), &mag));
        }
    }
    within(worst, 1e-12, "gradient_maps")
}

// ------------------------------------------------------------------- SSIM

pub fn ssim_oracle(a: &GrayImage, b: &GrayImage) -> f64 {
    let (w, h) = (a.width(), a.height());
    let (x, y) = (pixels(a), pixels(b));
    let g: Vec<f64> = (0..11).map(|i| (-((i as f64 - 5.0).powi(2)) / (2.0 * 1.5 * 1.5)).exp()).collect();
    let total: f64 = g.iter().map(|p| g.iter().map(|q| p * q).sum::<f64>()).sum();
    let (c1, c2) = (1e-4, 9e-4);
    let mut sum = 0.0;
    let mut count = 0;
    for oy in 0..=h - 11 {
        for ox in 0..=w - 11 {
            let win = |f: &dyn Fn(usize) -> f64| -> f64 {
                let mut acc = 0.0;
                for j in 0..11 {
                    for i in 0..11 {
                        acc += g[i] * g[j] / total * f((oy + j) * w + ox + i);
                    }
                }
                acc
            };
            let mx = win(&|k| x[k]);
            let my = win(&|k| y[k]);
            let vx = win(&|k| (x[k] - mx).powi(2));
            let vy = win(&|k| (y[k] - my).powi(2));
            let cxy = win(&|k| (x[k] - mx) * (y[k] - my));
            sum += (2.0 * mx * my + c1) * (2.0 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    sum / count as f64
}

pub fn check_ssim(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(3000 + seed);
        let (w, h) = (r.random_range(11..20), r.random_range(11..20));
        let a = textured_image(w, h, 2 * seed);
        let b = textured_image(w, h, 2 * seed + 1);
        let got = ssim(&ImagePair::new(a.clone(), b.clone()).unwrap()).map_err(|e| e.to_string())?.value;
        worst = nan_max(worst, (got - ssim_oracle(&a, &b)).abs());
    }
    within(worst, 1e-10, "ssim")
}

// ------------------------------------------------------------------- GMSD

pub fn gmsd_oracle(a: &GrayImage, b: &GrayImage) -> f64 {
    let (w, h) = (a.width() / 2, a.height() / 2);
    let pool = |img: &GrayImage| -> Vec<f64> {
        let p = pixels(img);
        let iw = img.width();
        (0..w * h)
            .map(|i| {
                let (x, y) = (2 * (i % w), 2 * (i / w));
                (p[y * iw + x] + p[y * iw + x + 1] + p[(y + 1) * iw + x] + p[(y + 1) * iw + x + 1]) / 4.0
            })
            .collect()
    };
    let t = 1.0 / 3.0;
    let kx = [t, 0.0, -t, t, 0.0, -t, t, 0.0, -t];
    let ky = [t, t, t, 0.0, 0.0, 0.0, -t, -t, -t];
    let mag = |p: &[f64]| -> Vec<f64> {
        let (gx, _, _) = conv_oracle(p, w, h, &kx, 3, 3, Padding::Reflect);
        let (gy, _, _) = conv_oracle(p, w, h, &ky, 3, 3, Padding::Reflect);
        gx.iter().zip(&gy).map(|(u, v)| (u * u + v * v).sqrt()).collect()
    };
    let (ma, mb) = (mag(&pool(a)), mag(&pool(b)));
    let c = 170.0 / 65025.0;
    let gms: Vec<f64> = ma.iter().zip(&mb).map(|(p, q)| (2.0 * p * q + c) / (p * p + q * q + c)).collect();
    let mean = gms.iter().sum::<f64>() / gms.len() as f64;
    (gms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / gms.len() as f64).sqrt()
}

pub fn check_gmsd(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(4000 + seed);
        let (w, h) = (r.random_range(6..24), r.random_range(6..24));
        let a = textured_image(w, h, 100 + 2 * seed);
        let b = textured_image(w, h, 101 + 2 * seed);
        let got = gmsd(&ImagePair::new(a.clone(), b.clone()).unwrap()).map_err(|e| e.to_string())?.value;
        worst = nan_max(worst, (got - gmsd_oracle(&a, &b)).abs());
    }
    within(worst, 1e-12, "gmsd")
}

// ---------------------------------------------------------------- HaarPSI

pub fn haarpsi_oracle(a: &GrayImage, b: &GrayImage) -> f64 {
    let (c, alpha) = (30.0, 4.2);
    let (iw, ih) = (a.width(), a.height());
    let (w, h) = (iw.div_ceil(2), ih.div_ceil(2));
    let prep = |img: &GrayImage| -> Vec<f64> {
        let p = pixels(img);
        let at = |x: usize, y: usize| if x < iw && y < ih { 255.0 * p[y * iw + x] } else { 0.0 };
        (0..w * h)
            .map(|i| {
                let (x, y) = (2 * (i % w), 2 * (i / w));
                (at(x, y) + at(x + 1, y) + at(x, y + 1) + at(x + 1, y + 1)) / 4.0
            })
            .collect()
    };
    // (vertical, horizontal) responses of the k×k Haar pair
    let haar = |p: &[f64], k: usize| -> (Vec<f64>, Vec<f64>) {
        let at = |x: isize, y: isize| if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h { p[y as usize * w + x as usize] } else { 0.0 };
        let before = (k / 2) as isize - 1;
        let mut v = vec![0.0; w * h];
        let mut hz = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (mut sv, mut sh) = (0.0, 0.0);
                for j in 0..k {
                    for i in 0..k {
                        let val = at(x as isize - before + i as isize, y as isize - before + j as isize);
                        sv += if j < k / 2 { val } else { -val };
                        sh += if i < k / 2 { val } else { -val };
                    }
                }
                v[y * w + x] = sv / k as f64;
                hz[y * w + x] = sh / k as f64;
            }
        }
        (v, hz)
    };
    let (pa, pb) = (prep(a), prep(b));
    let ra: Vec<_> = [2, 4, 8].iter().map(|&k| haar(&pa, k)).collect();
    let rb: Vec<_> = [2, 4, 8].iter().map(|&k| haar(&pb, k)).collect();
    let sim = |p: f64, q: f64| (2.0 * p * q + c) / (p * p + q * q + c);
    let logistic = |v: f64| 1.0 / (1.0 + (-v).exp());
    let (mut num, mut den) = (0.0, 0.0);
    for o in 0..2 {
        let get = |r: &Vec<(Vec<f64>, Vec<f64>)>, s: usize, i: usize| if o == 0 { r[s].0[i].abs() } else { r[s].1[i].abs() };
        for i in 0..w * h {
            let local = (sim(get(&ra, 0, i), get(&rb, 0, i)) + sim(get(&ra, 1, i), get(&rb, 1, i))) / 2.0;
            let weight = get(&ra, 2, i).max(get(&rb, 2, i));
            num += logistic(alpha * local) * weight;
            den += weight;
        }
    }
    let pooled = num / den;
    ((pooled / (1.0 - pooled)).ln() / alpha).powi(2)
}

pub fn check_haarpsi(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(5000 + seed);
        let (w, h) = (r.random_range(16..30), r.random_range(16..30));
        let a = textured_image(w, h, 200 + 2 * seed);
        let b = textured_image(w, h, 201 + 2 * seed);
        let got = haarpsi(&ImagePair::new(a.clone(), b.clone()).unwrap()).map_err(|e| e.to_string())?.value;
        worst = nan_max(worst, (got - haarpsi_oracle(&a, &b)).abs());
    }
    within(worst, 1e-10, "haarpsi")
}

// -------------------------------------------------------------------- DSS

pub fn dss_oracle(a: &GrayImage, b: &GrayImage) -> f64 {
    let n = 8usize;
    let (iw, ih) = (a.width(), a.height());
    let (bw, bh) = (iw / n, ih / n);
    let (x0, y0) = ((iw - bw * n) / 2, (ih - bh * n) / 2);
    let alpha = |u: usize| if u == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
    // coefficient (u vertical, v horizontal) of every block
    let dct = |img: &GrayImage| -> Vec<Vec<f64>> {
        let p = pixels(img);
        let mut out = vec![vec![0.0; bw * bh]; n * n];
        for by in 0..bh {
            for bx in 0..bw {
                for u in 0..n {
                    for v in 0..n {
                        let mut acc = 0.0;
                        for y in 0..n {
                            for x in 0..n {
                                let val = 255.0 * p[(y0 + by * n + y) * iw + x0 + bx * n + x];
                                acc += val
                                    * (PI * (2 * y + 1) as f64 * u as f64 / (2 * n) as f64).cos()
                                    * (PI * (2 * x + 1) as f64 * v as f64 / (2 * n) as f64).cos();
                            }
                        }
                        out[u * n + v][by * bw + bx] = alpha(u) * alpha(v) * acc;
                    }
                }
            }
        }
        out
    };
    let g: Vec<f64> = (0..3).map(|i| (-((i as f64 - 1.0).powi(2)) / (2.0 * 1.5 * 1.5)).exp()).collect();
    let gt: f64 = g.iter().map(|p| g.iter().map(|q| p * q).sum::<f64>()).sum();
    let kernel: Vec<f64> = (0..9).map(|i| g[i / 3] * g[i % 3] / gt).collect();
    let local = |p: &[f64]| conv_oracle(p, bw, bh, &kernel, 3, 3, Padding::Zero).0;
    let mut weights: Vec<f64> = (0..n * n)
        .map(|i| {
            let (u, v) = ((i / n) as f64 + 0.5, (i % n) as f64 + 0.5);
            let e = (-(u * u + v * v) / (2.0 * 1.55 * 1.55)).exp();
            if e < 1e-2 { 0.0 } else { e }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let (da, db) = (dct(a), dct(b));
    let count = bw * bh;
    let keep = (0.05 * count as f64).round_ties_even() as usize + 1;
    let keep = keep.min(count);
    let low_mean = |mut v: Vec<f64>| {
        v.sort_by(|p, q| p.partial_cmp(q).unwrap());
        v[..keep].iter().sum::<f64>() / keep as f64
    };
    let mut score = 0.0;
    for s in 0..n * n {
        if weights[s] == 0.0 {
            continue;
        }
        let c = if s == 0 { 1000.0 } else { 300.0 };
        let (xs, ys) = (&da[s], &db[s]);
        let (mx, my) = (local(xs), local(ys));
        let sq = |v: &[f64]| v.iter().map(|t| t * t).collect::<Vec<_>>();
        let (ex, ey) = (local(&sq(xs)), local(&sq(ys)));
        let exy = local(&xs.iter().zip(ys).map(|(p, q)| p * q).collect::<Vec<_>>());
        let mut left = Vec::new();
        let mut right = Vec::new();
        for i in 0..count {
            let vx = (ex[i] - mx[i] * mx[i]).max(0.0);
            let vy = (ey[i] - my[i] * my[i]).max(0.0);
            left.push((2.0 * (vx * vy).sqrt() + c) / (vx + vy + c));
            right.push((exy[i] - mx[i] * my[i] + c) / ((vx * vy).sqrt() + c));
        }
        let mut sim = low_mean(left);
        if s == 0 {
            sim *= low_mean(right);
        }
        score += weights[s] * sim;
    }
    score
}

pub fn check_dss(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(6000 + seed);
        let (w, h) = (r.random_range(16..44), r.random_range(16..44));
        let a = textured_image(w, h, 300 + 2 * seed);
        let b = textured_image(w, h, 301 + 2 * seed);
        let got = dss(&ImagePair::new(a.clone(), b.clone()).unwrap()).map_err(|e| e.to_string())?.value;
        worst = nan_max(worst, (got - dss_oracle(&a, &b)).abs());
    }
    within(worst, 1e-8, "dss")
}

// ------------------------------------------------------- rank statistics

pub fn srcc_oracle(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let less = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// `(tau_a, tau_b)` from concordant/discordant pair counts.
pub fn kendall_oracle(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len();
    let (mut conc, mut disc, mut tie_x, mut tie_y) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..i {
            let (dx, dy) = (x[i] - x[j], y[i] - y[j]);
            if dx == 0.0 {
                tie_x += 1.0;
            }
            if dy == 0.0 {
                tie_y += 1.0;
            }
            if dx * dy > 0.0 {
                conc += 1.0;
            } else if dx * dy < 0.0 {
                disc += 1.0;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    ((conc - disc) / pairs, (conc - disc) / ((pairs - tie_x) * (pairs - tie_y)).sqrt())
}

fn tied_samples(seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let n = r.random_range(5..40);
    let levels = r.random_range(3..12);
    let x: Vec<f64> = (0..n).map(|_| r.random_range(0..levels) as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| v + r.random_range(0..levels) as f64 * 0.5).collect();
    (x, y)
}

fn non_constant(v: &[f64]) -> bool {
    v.iter().any(|a| *a != v[0])
}

pub fn check_srcc(instances: u64) -> Check {
    let mut worst = 0.0f64;
    let mut done = 0;
    for seed in 0.. {
        if done == instances {
            break;
        }
        let (x, y) = tied_samples(7000 + seed);
        if !(non_constant(&x) && non_constant(&y)) {
            continue;
        }
        done += 1;
        let got = srcc(&x, &y).map_err(|e| e.to_string())?;
        worst = nan_max(worst, (got - srcc_oracle(&x, &y)).abs());
    }
    within(worst, 1e-12, "srcc")
}

pub fn check_krcc(instances: u64) -> Check {
    let mut worst = 0.0f64;
    let mut done = 0;
    for seed in 0.. {
        if done == instances {
            break;
        }
        let (x, y) = tied_samples(8000 + seed);
        if !(non_constant(&x) && non_constant(&y)) {
            continue;
        }
        done += 1;
        let (ta, tb) = kendall_oracle(&x, &y);
        let ga = krcc(&x, &y, KendallVariant::TauA).map_err(|e| e.to_string())?;
        let gb = krcc(&x, &y, KendallVariant::TauB).map_err(|e| e.to_string())?;
        worst = nan_max(nan_max(worst, (ga - ta).abs()), (gb - tb).abs());
    }
    within(worst, 1e-12, "krcc")
}

// ------------------------------------------------------------------ kappa

pub fn kappa_oracle(v1: &[u8], v2: &[u8], quadratic: bool, levels: usize) -> f64 {
    let n = v1.len() as f64;
    let mut counts = vec![vec![0.0; levels]; levels];
    for (a, b) in v1.iter().zip(v2) {
        counts[*a as usize - 1][*b as usize - 1] += 1.0;
    }
    let row: Vec<f64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..levels).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    let (mut o, mut e) = (0.0, 0.0);
    for i in 0..levels {
        for j in 0..levels {
            let d = (i as f64 - j as f64).abs() / (levels - 1) as f64;
            let w = if quadratic { d * d } else { d };
            o += w * counts[i][j] / n;
            e += w * row[i] * col[j] / (n * n);
        }
    }
    1.0 - o / e
}

pub fn check_kappa(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(9000 + seed);
        let n = r.random_range(4..60);
        let v1: Vec<u8> = (0..n).map(|_| r.random_range(1..=4)).collect();
        let v2: Vec<u8> = v1.iter().map(|&v| if r.random::<f64>() < 0.6 { v } else { r.random_range(1..=4) }).collect();
        if !non_constant(&v1.iter().map(|&v| v as f64).collect::<Vec<_>>()) {
            continue;
        }
        for (weights, quadratic) in [(KappaWeights::Linear, false), (KappaWeights::Quadratic, true)] {
            let got = weighted_kappa(&v1, &v2, weights, 4).map_err(|e| e.to_string())?;
            worst = nan_max(worst, (got - kappa_oracle(&v1, &v2, quadratic, 4)).abs());
        }
    }
    within(worst, 1e-12, "weighted_kappa")
}

// -------------------------------------------------------------------- KID

pub fn kid_oracle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let d = a[0].len() as f64;
    let k = |x: &[f64], y: &[f64]| (x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() / d + 1.0).powi(3);
    let (m, n) = (a.len(), b.len());
    let mut xx = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                xx += k(&a[i], &a[j]);
            }
        }
    }
    let mut yy = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                yy += k(&b[i], &b[j]);
            }
        }
    }
    if m == n {
        let mut h = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    h -= k(&a[i], &b[j]) + k(&a[j], &b[i]);
                }
            }
        }
        (xx + yy + h) / (m * (m - 1)) as f64
    } else {
        let mut xy = 0.0;
        for p in a {
            for q in b {
                xy += k(p, q);
            }
        }
        xx / (m * (m - 1)) as f64 + yy / (n * (n - 1)) as f64 - 2.0 * xy / (m * n) as f64
    }
}

pub fn feature_rows(n: usize, d: usize, shift: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| (0..d).map(|_| r.random_range(-1.0..1.0) + shift).collect()).collect()
}

pub fn to_set(rows: &[Vec<f64>]) -> FeatureSet {
    FeatureSet::new(rows.len(), rows[0].len(), rows.concat()).unwrap()
}

pub fn check_kid(instances: u64) -> Check {
    let mut worst = 0.0f64;
    for seed in 0..instances {
        let mut r = rng(10_000 + seed);
        let d = r.random_range(1..12);
        let m = r.random_range(2..20);
        let n = if seed % 2 == 0 { m } else { r.random_range(2..20) };
        let a = feature_rows(m, d, 0.0, 2 * seed);
        let b = feature_rows(n, d, 0.3, 2 * seed + 1);
        let (got, _) = kid(&to_set(&a), &to_set(&b), &KidParams::default()).map_err(|e| e.to_string())?;
        let want = kid_oracle(&a, &b);
        worst = nan_max(worst, (got - want).abs() / want.abs().max(1.0));
    }
    within(worst, 1e-10, "kid")
}

// ---------------------------------------------------------------- helpers

/// Like `f64::max` but a NaN wins, so a NaN result can never pass.
pub fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, nan_max)
}

fn within(worst: f64, tol: f64, what: &str) -> Check {
    if worst <= tol {
        Ok(format!("{what} max deviation {worst:.2e} <= {tol:.0e}"))
    } else {
        Err(format!("{what} max deviation {worst:.2e} > {tol:.0e}"))
    }
}

pub const ORACLE_INSTANCES: u64 = 20;

pub fn oracle_suite() -> Vec<(&'static str, fn(u64) -> Check)> {
    vec![
        ("ssim", check_ssim),
        ("gmsd", check_gmsd),
        ("haarpsi", check_haarpsi),
        ("dss", check_dss),
        ("conv2d", check_conv2d),
        ("gradient_maps", check_gradients),
        ("srcc", check_srcc),
        ("krcc", check_krcc),
        ("weighted_kappa", check_kappa),
        ("kid", check_kid),
    ]
}

use super::{require_side, similarity, MetricId, MetricScore};
use crate::{ImagePair, Plane, Result};

#[derive(Clone, Debug)]
pub struct HaarPsiParams {
    /// Similarity stabiliser on the 0–255 scale.
    pub c: f64,
    /// Logistic steepness.
    pub alpha: f64,
    /// Apply the 2×2 pre-pooling step.
    pub subsample: bool,
}

impl Default for HaarPsiParams {
    fn default() -> Self {
        Self {
            c: 30.0,
            alpha: 4.2,
            subsample: true,
        }
    }
}

pub fn haarpsi(pair: &ImagePair) -> Result<MetricScore> {
    haarpsi_with(pair, &HaarPsiParams::default())
}

/// Haar wavelet-based perceptual similarity.
///
/// Undecimated Haar filters of size 2, 4 and 8 give horizontal and vertical
/// detail responses. The two finest scales feed a local similarity per
/// orientation; the coarsest scale supplies the pooling weights. Scores are
/// pooled through a logistic and mapped back with the squared logit so that
/// identical images give exactly the logistic's fixed point, 1.
pub fn haarpsi_with(pair: &ImagePair, params: &HaarPsiParams) -> Result<MetricScore> {
    require_side(pair, "image side for HaarPSI", 16)?;
    let (x, y) = pair.unit_planes();
    let mut x = x.map(|v| v * 255.0);
    let mut y = y.map(|v| v * 255.0);
    if params.subsample {
        x = pool2_extend(&x);
        y = pool2_extend(&y);
    }
    let rx: Vec<(Plane, Plane)> = (1..=3).map(|s| haar_responses(&x, 1 << s)).collect();
    let ry: Vec<(Plane, Plane)> = (1..=3).map(|s| haar_responses(&y, 1 << s)).collect();
    let pick = |r: &(Plane, Plane), o: usize| if o == 0 { r.0.clone() } else { r.1.clone() };

    let c = params.c;
    let alpha = params.alpha;
    let (mut num, mut den) = (0.0, 0.0);
    for o in 0..2 {
        let (x1, x2, x3) = (pick(&rx[0], o), pick(&rx[1], o), pick(&rx[2], o));
        let (y1, y2, y3) = (pick(&ry[0], o), pick(&ry[1], o), pick(&ry[2], o));
        for i in 0..x1.len() {
            let s1 = similarity(x1.data()[i].abs(), y1.data()[i].abs(), c);
            let s2 = similarity(x2.data()[i].abs(), y2.data()[i].abs(), c);
            let local = 0.5 * (s1 + s2);
            let weight = x3.data()[i].abs().max(y3.data()[i].abs());
            num += logistic(alpha * local) * weight;
            den += weight;
        }
    }
    // Flat images carry no weight anywhere; fall back to unweighted pooling.
    if den == 0.0 {
        let n = 2 * x.len();
        num = logistic(alpha) * n as f64;
        den = n as f64;
    }
    let pooled = num / den;
    let value = ((pooled / (1.0 - pooled)).ln() / alpha).powi(2);
    Ok(MetricScore::new(MetricId::Haarpsi, value))
}

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// 2×2 mean pooling with zero extension of an odd trailing row/column.
fn pool2_extend(p: &Plane) -> Plane {
    let (w, h) = (p.width(), p.height());
    let at = |x: usize, y: usize| if x < w && y < h { p.get(x, y) } else { 0.0 };
    Plane::from_fn(w.div_ceil(2), h.div_ceil(2), |x, y| {
        0.25 * (at(2 * x, 2 * y) + at(2 * x + 1, 2 * y) + at(2 * x, 2 * y + 1) + at(2 * x + 1, 2 * y + 1))
    })
}

/// Responses of the `k`×`k` Haar pair at every pixel, zero padded with
/// `k/2 - 1` samples before and `k/2` after.
///
/// The first plane is the vertical difference (top half minus bottom half,
/// scaled by `1/k`), the second its transpose.
fn haar_responses(p: &Plane, k: usize) -> (Plane, Plane) {
    let (w, h) = (p.width(), p.height());
    // summed-area table with a zero border
    let mut sat = vec![0.0; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += p.get(x, y);
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    let box_sum = |x0: isize, y0: isize, x1: isize, y1: isize| -> f64 {
        // inclusive-exclusive box, clipped to the image
        let cx0 = x0.clamp(0, w as isize) as usize;
        let cy0 = y0.clamp(0, h as isize) as usize;
        let cx1 = x1.clamp(0, w as isize) as usize;
        let cy1 = y1.clamp(0, h as isize) as usize;
        if cx1 <= cx0 || cy1 <= cy0 {
            return 0.0;
        }
        sat[cy1 * (w + 1) + cx1] - sat[cy0 * (w + 1) + cx1] - sat[cy1 * (w + 1) + cx0]
            + sat[cy0 * (w + 1) + cx0]
    };
    let half = (k / 2) as isize;
    let before = half - 1;
    let scale = 1.0 / k as f64;
    let vertical = Plane::from_fn(w, h, |x, y| {
        let (x0, y0) = (x as isize - before, y as isize - before);
        let top = box_sum(x0, y0, x0 + k as isize, y0 + half);
        let bottom = box_sum(x0, y0 + half, x0 + k as isize, y0 + k as isize);
        (top - bottom) * scale
    });
    let horizontal = Plane::from_fn(w, h, |x, y| {
        let (x0, y0) = (x as isize - before, y as isize - before);
        let left = box_sum(x0, y0, x0 + half, y0 + k as isize);
        let right = box_sum(x0 + half, y0, x0 + k as isize, y0 + k as isize);
        (left - right) * scale
    });
    (vertical, horizontal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GrayImage;

    #[test]
    fn haar_response_matches_direct_sum() {
        let p = Plane::from_fn(9, 7, |x, y| ((x * 13 + y * 7) % 10) as f64);
        let (v, hz) = haar_responses(&p, 4);
        let at = |x: isize, y: isize| {
            if x < 0 || y < 0 || x >= 9 || y >= 7 {
                0.0
            } else {
                p.get(x as usize, y as usize)
            }
        };
        for y in 0..7isize {
            for x in 0..9isize {
                let (mut ev, mut eh) = (0.0, 0.0);
                for j in 0..4isize {
                    for i in 0..4isize {
                        let s = at(x - 1 + i, y - 1 + j) / 4.0;
                        ev += if j < 2 { s } else { -s };
                        eh += if i < 2 { s } else { -s };
                    }
                }
                assert!((v.get(x as usize, y as usize) - ev).abs() < 1e-12);
                assert!((hz.get(x as usize, y as usize) - eh).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_images() {
        let a = GrayImage::filled(32, 32, 0.3).unwrap();
        let b = GrayImage::filled(32, 32, 0.6).unwrap();
        let same = haarpsi(&ImagePair::new(a.clone(), a.clone()).unwrap()).unwrap().value;
        assert!((same - 1.0).abs() < 1e-12, "{same}");
        // zero padding makes the borders of a flat image carry structure
        let v = haarpsi(&ImagePair::new(a, b).unwrap()).unwrap().value;
        assert!(v > 0.0 && v < 1.0, "{v}");
    }
}

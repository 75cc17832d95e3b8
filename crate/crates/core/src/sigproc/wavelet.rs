use crate::{Error, Plane, Result};

/// Detail subbands of one decomposition level.
#[derive(Clone, Debug)]
pub struct DetailBands {
    pub horizontal: Plane,
    pub vertical: Plane,
    pub diagonal: Plane,
}

/// Multi-level orthonormal Haar decomposition, finest level first.
#[derive(Clone, Debug)]
pub struct WaveletPyramid {
    pub levels: Vec<DetailBands>,
    pub approximation: Plane,
}

impl WaveletPyramid {
    /// Sum of squares over every subband and the approximation.
    pub fn energy(&self) -> f64 {
        let sq = |p: &Plane| p.data().iter().map(|v| v * v).sum::<f64>();
        self.levels
            .iter()
            .map(|l| sq(&l.horizontal) + sq(&l.vertical) + sq(&l.diagonal))
            .sum::<f64>()
            + sq(&self.approximation)
    }
}

/// Orthonormal Haar analysis applied `levels` times to the running
/// approximation. For a 2×2 block `[a b; c d]`:
/// approximation `(a+b+c+d)/2`, horizontal `(a-b+c-d)/2`,
/// vertical `(a+b-c-d)/2`, diagonal `(a-b-c+d)/2`.
///
/// Odd sides are zero-extended, so subbands have `ceil(n/2)` samples and
/// energy is still preserved exactly.
pub fn haar_dwt(img: &Plane, levels: usize) -> Result<WaveletPyramid> {
    if levels == 0 {
        return Err(Error::InvalidParameter("haar_dwt needs at least one level".into()));
    }
    let min_side = img.width().min(img.height());
    let need = 1usize.checked_shl(levels as u32).unwrap_or(usize::MAX);
    if min_side < need {
        return Err(Error::TooSmall {
            what: "image side for requested Haar levels",
            got: min_side,
            need,
        });
    }
    let mut approx = img.clone();
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (w, h) = (approx.width(), approx.height());
        let (ow, oh) = (w.div_ceil(2), h.div_ceil(2));
        let at = |x: usize, y: usize| if x < w && y < h { approx.get(x, y) } else { 0.0 };
        let mut a = Plane::zeros(ow, oh);
        let mut hz = Plane::zeros(ow, oh);
        let mut vt = Plane::zeros(ow, oh);
        let mut dg = Plane::zeros(ow, oh);
        for y in 0..oh {
            for x in 0..ow {
                let (p, q) = (at(2 * x, 2 * y), at(2 * x + 1, 2 * y));
                let (r, s) = (at(2 * x, 2 * y + 1), at(2 * x + 1, 2 * y + 1));
                a.set(x, y, (p + q + r + s) * 0.5);
                hz.set(x, y, (p - q + r - s) * 0.5);
                vt.set(x, y, (p + q - r - s) * 0.5);
                dg.set(x, y, (p - q - r + s) * 0.5);
            }
        }
        out.push(DetailBands {
            horizontal: hz,
            vertical: vt,
            diagonal: dg,
        });
        approx = a;
    }
    Ok(WaveletPyramid {
        levels: out,
        approximation: approx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, c, d) = (0.1, 0.7, 0.4, 0.9);
        let p = Plane::new(2, 2, vec![a, b, c, d]).unwrap();
        let pyr = haar_dwt(&p, 1).unwrap();
        let l = &pyr.levels[0];
        assert!((pyr.approximation.get(0, 0) - (a + b + c + d) / 2.0).abs() < 1e-15);
        assert!((l.horizontal.get(0, 0) - (a - b + c - d) / 2.0).abs() < 1e-15);
        assert!((l.vertical.get(0, 0) - (a + b - c - d) / 2.0).abs() < 1e-15);
        assert!((l.diagonal.get(0, 0) - (a - b - c + d) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_has_no_detail() {
        let p = Plane::from_fn(16, 16, |_, _| 0.42);
        let pyr = haar_dwt(&p, 3).unwrap();
        for l in &pyr.levels {
            for band in [&l.horizontal, &l.vertical, &l.diagonal] {
                assert!(band.data().iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn energy_preserved() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for (w, h) in [(16, 16), (13, 10)] {
            let p = Plane::from_fn(w, h, |_, _| rng.random::<f64>() - 0.5);
            let e: f64 = p.data().iter().map(|v| v * v).sum();
            let pyr = haar_dwt(&p, 3).unwrap();
            assert!((pyr.energy() - e).abs() <= 1e-9 * e);
            assert_eq!(pyr.levels[1].diagonal.width(), w.div_ceil(2).div_ceil(2));
        }
    }

    #[test]
    fn too_many_levels() {
        assert!(haar_dwt(&Plane::zeros(8, 8), 4).is_err());
        assert!(haar_dwt(&Plane::zeros(8, 8), 0).is_err());
    }
}

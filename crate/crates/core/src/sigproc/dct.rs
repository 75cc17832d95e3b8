use crate::{Error, Plane, Result};

/// Orthonormal DCT-II basis, `m[u * n + x] = a(u) cos(pi (2x + 1) u / 2n)`.
pub fn dct_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    let nf = n as f64;
    for u in 0..n {
        let a = if u == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        for x in 0..n {
            m[u * n + x] =
                a * (std::f64::consts::PI * (2.0 * x as f64 + 1.0) * u as f64 / (2.0 * nf)).cos();
        }
    }
    m
}

/// Block DCT coefficients laid out in place of the spatial blocks: the
/// coefficient `(u, v)` of block `(bx, by)` sits at pixel
/// `(bx * block + v, by * block + u)`, `u` being the vertical frequency.
#[derive(Clone, Debug)]
pub struct DctBlocks {
    pub block: usize,
    pub blocks_x: usize,
    pub blocks_y: usize,
    /// Top-left corner of the centred crop that was transformed.
    pub crop_origin: (usize, usize),
    pub coefficients: Plane,
}

impl DctBlocks {
    pub fn coefficient(&self, bx: usize, by: usize, u: usize, v: usize) -> f64 {
        self.coefficients
            .get(bx * self.block + v, by * self.block + u)
    }

    /// All blocks' `(u, v)` coefficient as a `blocks_x`×`blocks_y` plane.
    pub fn subband(&self, u: usize, v: usize) -> Plane {
        Plane::from_fn(self.blocks_x, self.blocks_y, |bx, by| {
            self.coefficient(bx, by, u, v)
        })
    }
}

/// Orthonormal type-II DCT over non-overlapping `block`×`block` tiles of the
/// centred crop whose sides are multiples of `block`.
pub fn dct2_blocks(img: &Plane, block: usize) -> Result<DctBlocks> {
    if block == 0 {
        return Err(Error::InvalidParameter("DCT block size must be positive".into()));
    }
    let (w, h) = (img.width(), img.height());
    if w < block || h < block {
        return Err(Error::TooSmall {
            what: "image side for block DCT",
            got: w.min(h),
            need: block,
        });
    }
    let (bx_n, by_n) = (w / block, h / block);
    let (cw, ch) = (bx_n * block, by_n * block);
    let (x0, y0) = ((w - cw) / 2, (h - ch) / 2);
    let c = dct_matrix(block);
    let mut out = Plane::zeros(cw, ch);
    let mut tmp = vec![0.0; block * block];
    for by in 0..by_n {
        for bx in 0..bx_n {
            // tmp = C · B
            for u in 0..block {
                for x in 0..block {
                    let mut acc = 0.0;
                    for y in 0..block {
                        acc += c[u * block + y] * img.get(x0 + bx * block + x, y0 + by * block + y);
                    }
                    tmp[u * block + x] = acc;
                }
            }
            // out = tmp · Cᵀ
            for u in 0..block {
                for v in 0..block {
                    let mut acc = 0.0;
                    for x in 0..block {
                        acc += tmp[u * block + x] * c[v * block + x];
                    }
                    out.set(bx * block + v, by * block + u, acc);
                }
            }
        }
    }
    Ok(DctBlocks {
        block,
        blocks_x: bx_n,
        blocks_y: by_n,
        crop_origin: (x0, y0),
        coefficients: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_block_is_dc_only() {
        let p = Plane::from_fn(8, 8, |_, _| 0.3);
        let d = dct2_blocks(&p, 8).unwrap();
        for u in 0..8 {
            for v in 0..8 {
                let want = if (u, v) == (0, 0) { 8.0 * 0.3 } else { 0.0 };
                assert!((d.coefficient(0, 0, u, v) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_function_maps_to_unit_coefficient() {
        let c = dct_matrix(8);
        // separable basis: row frequency 0, column frequency 1
        let p = Plane::from_fn(8, 8, |x, y| c[y] * c[8 + x]);
        let d = dct2_blocks(&p, 8).unwrap();
        for u in 0..8 {
            for v in 0..8 {
                let want = if (u, v) == (0, 1) { 1.0 } else { 0.0 };
                assert!((d.coefficient(0, 0, u, v) - want).abs() < 1e-12, "{u},{v}");
            }
        }
    }

    #[test]
    fn centre_crop_and_errors() {
        let p = Plane::from_fn(21, 18, |x, y| (x + 100 * y) as f64);
        let d = dct2_blocks(&p, 8).unwrap();
        assert_eq!((d.blocks_x, d.blocks_y), (2, 2));
        assert_eq!(d.crop_origin, (2, 1));
        assert!(dct2_blocks(&Plane::zeros(7, 30), 8).is_err());
    }
}

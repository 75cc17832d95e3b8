//! Unitary 2-D DFT with the DC sample stored at the array centre.
//!
//! Arbitrary sizes are handled by `rustfft`'s mixed-radix / Bluestein
//! planner; both directions scale by `1/sqrt(N)`.

use crate::{Error, KSpaceImage, Plane, Result};
use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unitary 2-D FFT over a row-major `width`×`height` buffer
/// (no shifting).
pub fn fft2_unitary(data: &mut [Complex64], width: usize, height: usize, inverse: bool) {
    assert_eq!(data.len(), width * height);
    let direction = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(width, direction);
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft(height, direction);
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = data[y * width + x];
        }
        col_fft.process(&mut column);
        for y in 0..height {
            data[y * width + x] = column[y];
        }
    }
    let scale = 1.0 / ((width * height) as f64).sqrt();
    data.iter_mut().for_each(|c| *c *= scale);
}

fn shift<T: Copy>(data: &[T], width: usize, height: usize, forward: bool) -> Vec<T> {
    // fftshift moves index i to (i + n/2) mod n; ifftshift undoes it.
    let (sx, sy) = if forward {
        (width / 2, height / 2)
    } else {
        (width - width / 2, height - height / 2)
    };
    let mut out = data.to_vec();
    for y in 0..height {
        let ty = (y + sy) % height;
        for x in 0..width {
            let tx = (x + sx) % width;
            out[ty * width + tx] = data[y * width + x];
        }
    }
    out
}

/// Moves the zero-frequency sample from `(0, 0)` to `(w/2, h/2)`.
pub fn fftshift<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    shift(data, width, height, true)
}

/// Inverse of [`fftshift`] (differs from it only for odd sizes).
pub fn ifftshift<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    shift(data, width, height, false)
}

/// Forward transform of a real image into centred k-space.
pub fn dft2(img: &Plane) -> KSpaceImage {
    let (w, h) = (img.width(), img.height());
    let mut buf: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_unitary(&mut buf, w, h, false);
    KSpaceImage::new(w, h, fftshift(&buf, w, h)).expect("dimensions preserved")
}

/// Complex image-domain result of the inverse transform.
pub fn idft2_complex(k: &KSpaceImage) -> Vec<Complex64> {
    let (w, h) = (k.width(), k.height());
    let mut buf = ifftshift(k.values(), w, h);
    fft2_unitary(&mut buf, w, h, true);
    buf
}

/// Inverse transform keeping the real part; warns when the discarded
/// imaginary part is not negligible (`> 1e-4`).
pub fn idft2(k: &KSpaceImage) -> Result<Plane> {
    let buf = idft2_complex(k);
    let max_imag = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if max_imag > 1e-4 {
        log::warn!("idft2: discarding imaginary part up to {max_imag:.3e}");
    }
    let data: Vec<f64> = buf.iter().map(|c| c.re).collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite inverse transform".into()));
    }
    Plane::new(k.width(), k.height(), data)
}

/// Inverse transform followed by the complex modulus, the usual way a
/// magnitude MR image is formed from (possibly corrupted) k-space.
pub fn idft2_magnitude(k: &KSpaceImage) -> Plane {
    let buf = idft2_complex(k);
    Plane::new(k.width(), k.height(), buf.iter().map(|c| c.norm()).collect())
        .expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_is_dc_only() {
        let (w, h) = (6, 10);
        let img = Plane::from_fn(w, h, |_, _| 0.3);
        let k = dft2(&img);
        for y in 0..h {
            for x in 0..w {
                let v = k.get(x, y);
                if (x, y) == (w / 2, h / 2) {
                    assert!((v.re - 0.3 * ((w * h) as f64).sqrt()).abs() < 1e-12);
                } else {
                    assert!(v.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn impulse_gives_flat_spectrum() {
        let img = Plane::from_fn(8, 8, |x, y| if x == 0 && y == 0 { 1.0 } else { 0.0 });
        let k = dft2(&img);
        assert!(k.values().iter().all(|c| (c.norm() - 0.125).abs() < 1e-12));
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (w, h) in [(32, 32), (15, 22), (7, 9)] {
            let img = Plane::from_fn(w, h, |_, _| rng.random::<f64>());
            let k = dft2(&img);
            let back = idft2(&k).unwrap();
            let dev = img
                .data()
                .iter()
                .zip(back.data())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(dev < 1e-6, "{w}x{h}: {dev}");
            let e_img: f64 = img.data().iter().map(|v| v * v).sum();
            assert!((k.energy() - e_img).abs() / e_img < 1e-6);
        }
    }

    #[test]
    fn shift_round_trip_odd() {
        let v: Vec<u32> = (0..15).collect();
        assert_eq!(ifftshift(&fftshift(&v, 5, 3), 5, 3), v);
        assert_ne!(fftshift(&v, 5, 3), ifftshift(&v, 5, 3));
    }
}

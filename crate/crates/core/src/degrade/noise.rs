use super::clamp_to_image;
use crate::{Error, GrayImage, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::str::FromStr;

pub const MIN_ROI_PIXELS: usize = 64;

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl FromStr for Roi {
    type Err = Error;

    /// `x,y,w,h`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("roi '{s}' is not x,y,w,h")))?;
        match parts[..] {
            [x, y, width, height] => Ok(Roi { x, y, width, height }),
            _ => Err(Error::InvalidParameter(format!("roi '{s}' is not x,y,w,h"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    /// Standard deviation as a fraction of the image's data range.
    pub sigma: f64,
    pub amplification: f64,
}

/// Sample standard deviation (`n - 1`) inside a background region.
pub fn estimate_background_sigma(img: &GrayImage, roi: Roi) -> Result<f64> {
    let n = roi.width * roi.height;
    if n < MIN_ROI_PIXELS {
        return Err(Error::InvalidParameter(format!(
            "roi too small: {n} pixels, need {MIN_ROI_PIXELS}"
        )));
    }
    let inside = roi.x.checked_add(roi.width).is_some_and(|r| r <= img.width())
        && roi.y.checked_add(roi.height).is_some_and(|b| b <= img.height());
    if !inside {
        return Err(Error::InvalidParameter(format!(
            "roi {}x{}+{}+{} outside {}x{} image",
            roi.width,
            roi.height,
            roi.x,
            roi.y,
            img.width(),
            img.height()
        )));
    }
    let crop = img.crop(roi.x, roi.y, roi.width, roi.height)?;
    let values: Vec<f64> = crop.pixels().iter().map(|&v| v as f64).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((ss / (n - 1) as f64).sqrt() / img.data_range() as f64)
}

/// Adds i.i.d. N(0, (sigma * amplification * range)²) noise and clamps to
/// the image range. A zero standard deviation returns the input unchanged.
pub fn add_noise(img: &GrayImage, p: &NoiseParams, seed: u64) -> Result<GrayImage> {
    if !(p.sigma >= 0.0 && p.sigma.is_finite() && p.amplification >= 0.0 && p.amplification.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma {} and amplification {} must be non-negative",
            p.sigma, p.amplification
        )));
    }
    let std = p.sigma * p.amplification * img.data_range() as f64;
    if std == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plane = img.to_plane().map(|v| v + normal.sample(&mut rng));
    clamp_to_image(&plane, img.data_range())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_identity() {
        let img = GrayImage::new(4, 4, (0..16).map(|i| i as f32 / 15.0).collect()).unwrap();
        let p = NoiseParams {
            sigma: 0.0,
            amplification: 3.0,
        };
        assert_eq!(add_noise(&img, &p, 1).unwrap(), img);
    }

    #[test]
    fn amplified_noise_level() {
        let img = GrayImage::filled(256, 256, 0.5).unwrap();
        let p = NoiseParams {
            sigma: 0.05,
            amplification: 2.0,
        };
        let out = add_noise(&img, &p, 9).unwrap();
        assert_eq!(out, add_noise(&img, &p, 9).unwrap());
        let roi = Roi { x: 0, y: 0, width: 256, height: 256 };
        let s = estimate_background_sigma(&out, roi).unwrap();
        assert!((0.095..=0.105).contains(&s), "{s}");
    }

    #[test]
    fn roi_contracts() {
        let img = GrayImage::filled(16, 16, 0.0).unwrap();
        let roi = Roi { x: 0, y: 0, width: 8, height: 8 };
        assert_eq!(estimate_background_sigma(&img, roi).unwrap(), 0.0);
        let tiny = Roi { x: 0, y: 0, width: 1, height: 1 };
        assert!(estimate_background_sigma(&img, tiny).unwrap_err().to_string().contains("roi too small"));
        let outside = Roi { x: 10, y: 0, width: 8, height: 8 };
        assert!(estimate_background_sigma(&img, outside).is_err());
        assert_eq!("1,2,30,40".parse::<Roi>().unwrap(), Roi { x: 1, y: 2, width: 30, height: 40 });
        assert!("1,2,3".parse::<Roi>().is_err());
    }
}

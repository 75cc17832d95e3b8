use crate::{Error, GrayImage, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fs;
use std::path::Path;

const FS32_MAGIC: &[u8; 4] = b"FS32";

/// Square tiles cut from one image on a regular grid.
#[derive(Clone, Debug)]
pub struct TileSet {
    pub tiles: Vec<GrayImage>,
    pub tile_size: usize,
    pub stride: usize,
    pub source_width: usize,
    pub source_height: usize,
}

impl TileSet {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

/// Row-major raster of tile origins; tiles that would cross the right or
/// bottom edge are dropped.
pub fn tile_image(img: &GrayImage, tile_size: usize, stride: usize) -> Result<TileSet> {
    if tile_size == 0 || stride == 0 {
        return Err(Error::InvalidParameter("tile size and stride must be positive".into()));
    }
    let (w, h) = (img.width(), img.height());
    if w.min(h) < tile_size {
        return Err(Error::TooSmall {
            what: "image smaller than tile",
            got: w.min(h),
            need: tile_size,
        });
    }
    let mut tiles = Vec::new();
    for y in (0..=h - tile_size).step_by(stride) {
        for x in (0..=w - tile_size).step_by(stride) {
            tiles.push(img.crop(x, y, tile_size, tile_size)?);
        }
    }
    Ok(TileSet {
        tiles,
        tile_size,
        stride,
        source_width: w,
        source_height: h,
    })
}

/// `n` feature vectors of dimension `d`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSet {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl FeatureSet {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("empty feature set".into()));
        }
        if d == 0 {
            return Err(Error::InvalidInput("feature dimension is zero".into()));
        }
        if n.checked_mul(d) != Some(data.len()) {
            return Err(Error::InvalidInput(format!(
                "feature set {n}x{d} needs {} values, got {}",
                n.saturating_mul(d),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("feature set contains non-finite values".into()));
        }
        Ok(Self { n, d, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Rows picked by index, in the given order.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self::new(idx.len(), self.d, data)
    }
}

/// Flattens every tile; with `projection_dim = Some(k)` the vectors are
/// multiplied by a `d`×`k` matrix of N(0, 1/k) entries drawn from `seed`.
pub fn features_raw(tiles: &TileSet, projection_dim: Option<usize>, seed: u64) -> Result<FeatureSet> {
    if tiles.is_empty() {
        return Err(Error::InvalidInput("empty tile set".into()));
    }
    let d = tiles.tile_size * tiles.tile_size;
    let n = tiles.len();
    let mut raw = Vec::with_capacity(n * d);
    for t in &tiles.tiles {
        raw.extend(t.pixels().iter().map(|&v| v as f64));
    }
    let Some(k) = projection_dim else {
        return FeatureSet::new(n, d, raw);
    };
    if k == 0 {
        return Err(Error::InvalidParameter("projection dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (k as f64).sqrt();
    let proj: Vec<f64> = (0..d * k)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        })
        .collect();
    let mut out = vec![0.0; n * k];
    for i in 0..n {
        let row = &raw[i * d..(i + 1) * d];
        let dst = &mut out[i * k..(i + 1) * k];
        for (j, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for (o, p) in dst.iter_mut().zip(&proj[j * k..(j + 1) * k]) {
                *o += v * p;
            }
        }
    }
    FeatureSet::new(n, k, out)
}

/// Reads an FS32 file: magic `FS32`, little-endian `u32` n and d, then
/// `n * d` little-endian `f32` values.
pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureSet> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_fs32(&bytes)
}

/// Values are narrowed to `f32`.
pub fn save_features(fs: &FeatureSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(12 + 4 * fs.data.len());
    out.extend_from_slice(FS32_MAGIC);
    let n = u32::try_from(fs.n).map_err(|_| Error::format("fs32", "sample count exceeds u32"))?;
    let d = u32::try_from(fs.d).map_err(|_| Error::format("fs32", "dimension exceeds u32"))?;
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&d.to_le_bytes());
    for &v in &fs.data {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub(crate) fn decode_fs32(bytes: &[u8]) -> Result<FeatureSet> {
    if bytes.len() < 12 || &bytes[..4] != FS32_MAGIC {
        return Err(Error::format("fs32", "bad magic"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if n == 0 {
        return Err(Error::format("fs32", "empty feature set"));
    }
    let count = n
        .checked_mul(d)
        .filter(|c| c.checked_mul(4).is_some())
        .ok_or_else(|| Error::format("fs32", "dimension overflow"))?;
    let payload = &bytes[12..];
    if payload.len() != count * 4 {
        return Err(Error::format(
            "fs32",
            format!("payload holds {} bytes, header promises {}", payload.len(), count * 4),
        ));
    }
    let data: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    if data.iter().any(|v| v.is_nan()) {
        return Err(Error::format("fs32", "NaN in payload"));
    }
    FeatureSet::new(n, d, data)
}

//! PGM ("P5") and RF32 raster files.
//!
//! RF32 layout: magic `RF32`, little-endian `u32` width and height, then
//! `width * height` little-endian `f32` samples in row-major order.

use super::GrayImage;
use crate::{Error, Result};
use std::fs;
use std::path::Path;

const RF32_MAGIC: &[u8; 4] = b"RF32";
/// Largest accepted pixel count (2^28); anything above is treated as a
/// corrupt header rather than an allocation request.
const MAX_PIXELS: usize = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm8,
    Pgm16,
    Rf32,
}

impl ImageFormat {
    /// Guesses the format from a file extension (`.rf32`, `.pgm`); PGM
    /// depth is resolved from the header on load, and defaults to 16 bits
    /// on save.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "rf32" => Some(ImageFormat::Rf32),
            "pgm" => Some(ImageFormat::Pgm16),
            _ => None,
        }
    }
}

pub fn load_image(path: impl AsRef<Path>, format: ImageFormat) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        ImageFormat::Rf32 => decode_rf32(&bytes),
        ImageFormat::Pgm8 => decode_pgm(&bytes, Some(8)),
        ImageFormat::Pgm16 => decode_pgm(&bytes, None),
    }
}

pub fn save_image(img: &GrayImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        ImageFormat::Rf32 => encode_rf32(img),
        ImageFormat::Pgm8 => encode_pgm(img, 255),
        ImageFormat::Pgm16 => encode_pgm(img, 65535),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn checked_pixels(width: usize, height: usize, format: &'static str) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::format(format, "zero dimension"));
    }
    width
        .checked_mul(height)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or_else(|| Error::format(format, format!("dimension overflow {width}x{height}")))
}

pub(crate) fn decode_rf32(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 12 || &bytes[..4] != RF32_MAGIC {
        return Err(Error::format("rf32", "missing RF32 magic"));
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let n = checked_pixels(width, height, "rf32")?;
    let payload = &bytes[12..];
    if payload.len() != n * 4 {
        return Err(Error::format(
            "rf32",
            format!("truncated payload: expected {} bytes, got {}", n * 4, payload.len()),
        ));
    }
    let mut clamped = 0usize;
    let mut pixels = Vec::with_capacity(n);
    for chunk in payload.chunks_exact(4) {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if v.is_nan() {
            return Err(Error::format("rf32", "NaN in payload"));
        }
        let c = v.clamp(0.0, 1.0);
        if c != v {
            clamped += 1;
        }
        pixels.push(c);
    }
    if clamped > 0 {
        log::warn!("rf32: clamped {clamped} samples outside [0, 1]");
    }
    GrayImage::new(width, height, pixels)
}

fn encode_rf32(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + img.pixels().len() * 4);
    out.extend_from_slice(RF32_MAGIC);
    out.extend_from_slice(&(img.width() as u32).to_le_bytes());
    out.extend_from_slice(&(img.height() as u32).to_le_bytes());
    for p in img.pixels() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

/// Reads the next whitespace-delimited header token, skipping `#` comments.
fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::format("pgm", "truncated header"));
    }
    Ok(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::format("pgm", format!("bad header field {:?}", String::from_utf8_lossy(tok))))
}

/// Decodes a binary PGM. `depth = Some(8)` insists on one byte per sample.
fn decode_pgm(bytes: &[u8], depth: Option<u32>) -> Result<GrayImage> {
    let mut pos = 0;
    if header_token(bytes, &mut pos)? != b"P5" {
        return Err(Error::format("pgm", "not a binary (P5) PGM"));
    }
    let width = header_number(bytes, &mut pos)?;
    let height = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format("pgm", format!("maxval {maxval} out of range")));
    }
    let wide = maxval > 255;
    if depth == Some(8) && wide {
        return Err(Error::format("pgm", format!("expected 8-bit PGM, maxval is {maxval}")));
    }
    // exactly one whitespace byte separates header and raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format("pgm", "truncated header"));
    }
    pos += 1;
    let n = checked_pixels(width, height, "pgm")?;
    let bps = if wide { 2 } else { 1 };
    let payload = &bytes[pos..];
    if payload.len() < n * bps {
        return Err(Error::format(
            "pgm",
            format!("truncated payload: expected {} bytes, got {}", n * bps, payload.len()),
        ));
    }
    let scale = maxval as f64;
    let pixels = if wide {
        payload[..2 * n]
            .chunks_exact(2)
            .map(|c| (u16::from_be_bytes([c[0], c[1]]) as f64 / scale).min(1.0) as f32)
            .collect()
    } else {
        payload[..n]
            .iter()
            .map(|&b| (b as f64 / scale).min(1.0) as f32)
            .collect()
    };
    GrayImage::new(width, height, pixels)
}

fn encode_pgm(img: &GrayImage, maxval: u32) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    let scale = maxval as f64 / img.data_range() as f64;
    for &p in img.pixels() {
        let q = (p as f64 * scale).round().clamp(0.0, maxval as f64) as u32;
        if maxval > 255 {
            out.extend_from_slice(&(q as u16).to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    out
}

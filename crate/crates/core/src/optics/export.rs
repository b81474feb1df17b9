//! Image export: 16-bit binary PGM and a raw `f64` dump.
//!
//! Raw layout, all little-endian:
//!
//! ```text
//! b"EULRIMG1"  u32 rows  u32 cols  u32 flags  rows*cols f64 (row-major)
//! ```
//!
//! Bit 0 of `flags` marks a max-normalized image; other bits must be zero.

use super::field::IntensityImage;
use crate::error::{Error, Result};

pub const RAW_MAGIC: &[u8; 8] = b"EULRIMG1";

const HEADER_LEN: usize = 8 + 4 + 4 + 4;

/// Largest pixel count accepted by [`parse_raw_image`].
pub const MAX_RAW_PIXELS: usize = 1 << 26;

/// Grayscale PGM with values scaled so the maximum maps to 65535 and
/// negative values clip to 0.
pub fn encode_pgm16(image: &IntensityImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n65535\n", image.cols(), image.rows());
    let peak = image.max();
    let scale = if peak > 0.0 { 65535.0 / peak } else { 0.0 };
    let mut out = Vec::with_capacity(header.len() + 2 * image.data().len());
    out.extend_from_slice(header.as_bytes());
    for &v in image.data() {
        let q = (v * scale).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

pub fn encode_raw_image(image: &IntensityImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * image.data().len());
    out.extend_from_slice(RAW_MAGIC);
    out.extend_from_slice(&(image.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(image.cols() as u32).to_le_bytes());
    out.extend_from_slice(&u32::from(image.is_normalized()).to_le_bytes());
    for &v in image.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("four bytes"))
}

pub fn parse_raw_image(bytes: &[u8]) -> Result<IntensityImage> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::input("raw image shorter than its header"));
    }
    if &bytes[..8] != RAW_MAGIC {
        return Err(Error::input("raw image has wrong magic"));
    }
    let rows = read_u32(bytes, 8) as usize;
    let cols = read_u32(bytes, 12) as usize;
    let flags = read_u32(bytes, 16);
    if flags & !1 != 0 {
        return Err(Error::input(format!("unknown raw image flags {flags:#x}")));
    }
    let pixels = rows
        .checked_mul(cols)
        .filter(|&p| p > 0 && p <= MAX_RAW_PIXELS)
        .ok_or_else(|| Error::input(format!("raw image dimensions {rows}x{cols} out of range")))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * pixels {
        return Err(Error::input(format!(
            "raw image body is {} bytes, expected {}",
            body.len(),
            8 * pixels
        )));
    }
    let data: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("raw image contains non-finite values"));
    }
    let normalized = flags & 1 == 1;
    if normalized && data.iter().copied().fold(f64::NEG_INFINITY, f64::max) != 1.0 {
        return Err(Error::input("raw image flagged normalized but its maximum is not 1"));
    }
    Ok(IntensityImage::from_parts(rows, cols, data, normalized))
}

//! 8-bit binary PGM (P5) images.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ImageFormat("image has zero size".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::ImageFormat(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Diagonal ramp from 0 in the top-left corner to 255 in the bottom-right.
    pub fn gradient(width: usize, height: usize) -> Result<Self> {
        let span = (width + height).saturating_sub(2).max(1) as f64;
        let pixels = (0..height)
            .flat_map(|r| (0..width).map(move |c| (255.0 * (r + c) as f64 / span).round() as u8))
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
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
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::ImageFormat("truncated header".into()));
    }
    Ok(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = next_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::ImageFormat(format!("bad {what} in header")))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    if next_token(bytes, &mut pos)? != b"P5" {
        return Err(Error::ImageFormat("not a binary PGM (missing P5 magic)".into()));
    }
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::ImageFormat(format!("only 8-bit PGM is supported, maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::ImageFormat("truncated header".into()));
    }
    pos += 1;
    let need = width
        .checked_mul(height)
        .ok_or_else(|| Error::ImageFormat("image too large".into()))?;
    let data = bytes.get(pos..pos + need).ok_or_else(|| {
        Error::ImageFormat(format!("expected {need} pixel bytes, found {}", bytes.len() - pos))
    })?;
    let pixels = if maxval == 255 {
        data.to_vec()
    } else {
        data.iter()
            .map(|&v| ((v as usize * 255 + maxval / 2) / maxval).min(255) as u8)
            .collect()
    };
    GrayImage::new(width, height, pixels)
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    decode_pgm(&std::fs::read(path)?)
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    std::fs::write(path, encode_pgm(img))?;
    Ok(())
}

//! Binary PGM (P5) output for decoded convolution results.
//!
//! Decoded integer grids are affinely rescaled into the 0..=255 gray range;
//! the rescale parameters go into a sidecar metadata file so the original
//! integers stay recoverable.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Affine rescale used to map integers onto gray levels:
/// `gray = round((y - min) * scale)` with `scale = 255 / (max - min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaleMeta {
    pub min: i32,
    pub max: i32,
    pub scale: f64,
}

impl RescaleMeta {
    pub fn from_values(values: &[i32]) -> Result<Self> {
        let min = *values.iter().min().ok_or(Error::EmptyDataset)?;
        let max = *values.iter().max().ok_or(Error::EmptyDataset)?;
        let scale = if max > min {
            255.0 / (max - min) as f64
        } else {
            0.0
        };
        Ok(Self { min, max, scale })
    }

    pub fn to_gray(&self, y: i32) -> u8 {
        ((y - self.min) as f64 * self.scale).round().clamp(0.0, 255.0) as u8
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"min\": {}, \"max\": {}, \"scale\": {}}}\n",
            self.min, self.max, self.scale
        )
    }
}

/// Write an integer grid as binary PGM plus its sidecar metadata file
/// (`<path>.meta.json`).
pub fn write_scaled_pgm<P: AsRef<Path>>(path: P, values: &[i32], h: usize, w: usize) -> Result<()> {
    if values.len() != h * w {
        return Err(Error::ShapeMismatch(format!(
            "{} values for a {h}x{w} image",
            values.len()
        )));
    }
    let meta = RescaleMeta::from_values(values)?;
    let gray: Vec<u8> = values.iter().map(|&y| meta.to_gray(y)).collect();
    write_pgm(&path, &gray, h, w)?;
    let meta_path = path.as_ref().with_extension("pgm.meta.json");
    std::fs::write(meta_path, meta.to_json())?;
    Ok(())
}

/// Write raw gray bytes as binary PGM (P5, maxval 255).
pub fn write_pgm<P: AsRef<Path>>(path: P, gray: &[u8], h: usize, w: usize) -> Result<()> {
    if gray.len() != h * w {
        return Err(Error::ShapeMismatch(format!(
            "{} bytes for a {h}x{w} image",
            gray.len()
        )));
    }
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{w} {h}\n255\n")?;
    out.write_all(gray)?;
    out.flush()?;
    Ok(())
}

/// Read back a binary PGM (maxval 255 only).
pub fn read_pgm<P: AsRef<Path>>(path: P) -> Result<(Vec<u8>, usize, usize)> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    let header_end = raw
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .nth(2)
        .map(|(i, _)| i + 1)
        .ok_or_else(|| Error::Format("truncated PGM header".into()))?;
    let header = std::str::from_utf8(&raw[..header_end])
        .map_err(|_| Error::Format("non-UTF8 PGM header".into()))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("P5") {
        return Err(Error::Format("missing P5 magic".into()));
    }
    let w: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("bad PGM width".into()))?;
    let h: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("bad PGM height".into()))?;
    let maxval: usize = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("bad PGM maxval".into()))?;
    if maxval != 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval}")));
    }
    let pixels = raw[header_end..].to_vec();
    if pixels.len() != h * w {
        return Err(Error::Format(format!(
            "PGM payload {} bytes, expected {}",
            pixels.len(),
            h * w
        )));
    }
    Ok((pixels, h, w))
}

//! IDX dataset container (the MNIST on-disk format).
//!
//! Big-endian magic: `0x00000803` for u8 image stacks (dims n, h, w) and
//! `0x00000801` for u8 label vectors (dims n).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::conv::ImageU8;
use crate::error::{Error, Result};

pub const MAGIC_IMAGES: u32 = 0x0000_0803;
pub const MAGIC_LABELS: u32 = 0x0000_0801;

fn read_u32_be<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_be_bytes(buf))
}

/// Read a `0x00000803` image stack.
pub fn read_images<R: Read>(r: &mut R) -> Result<Vec<ImageU8>> {
    let magic = read_u32_be(r)?;
    if magic != MAGIC_IMAGES {
        return Err(Error::Format(format!(
            "bad image magic {magic:#010x}, expected {MAGIC_IMAGES:#010x}"
        )));
    }
    let n = read_u32_be(r)? as usize;
    let h = read_u32_be(r)? as usize;
    let w = read_u32_be(r)? as usize;
    let mut images = Vec::with_capacity(n);
    let mut buf = vec![0u8; h * w];
    for _ in 0..n {
        r.read_exact(&mut buf)?;
        images.push(ImageU8::new(buf.clone(), h, w)?);
    }
    Ok(images)
}

/// Read a `0x00000801` label vector.
pub fn read_labels<R: Read>(r: &mut R) -> Result<Vec<u8>> {
    let magic = read_u32_be(r)?;
    if magic != MAGIC_LABELS {
        return Err(Error::Format(format!(
            "bad label magic {magic:#010x}, expected {MAGIC_LABELS:#010x}"
        )));
    }
    let n = read_u32_be(r)? as usize;
    let mut labels = vec![0u8; n];
    r.read_exact(&mut labels)?;
    Ok(labels)
}

pub fn write_images<W: Write>(w: &mut W, images: &[ImageU8]) -> Result<()> {
    let (h, width) = match images.first() {
        Some(img) => (img.h(), img.w()),
        None => return Err(Error::EmptyDataset),
    };
    w.write_all(&MAGIC_IMAGES.to_be_bytes())?;
    w.write_all(&(images.len() as u32).to_be_bytes())?;
    w.write_all(&(h as u32).to_be_bytes())?;
    w.write_all(&(width as u32).to_be_bytes())?;
    for img in images {
        if img.h() != h || img.w() != width {
            return Err(Error::ShapeMismatch(format!(
                "image {}x{} in a {}x{} stack",
                img.h(),
                img.w(),
                h,
                width
            )));
        }
        w.write_all(img.pixels())?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(w: &mut W, labels: &[u8]) -> Result<()> {
    w.write_all(&MAGIC_LABELS.to_be_bytes())?;
    w.write_all(&(labels.len() as u32).to_be_bytes())?;
    w.write_all(labels)?;
    Ok(())
}

pub fn read_images_file<P: AsRef<Path>>(path: P) -> Result<Vec<ImageU8>> {
    read_images(&mut BufReader::new(File::open(path)?))
}

pub fn read_labels_file<P: AsRef<Path>>(path: P) -> Result<Vec<u8>> {
    read_labels(&mut BufReader::new(File::open(path)?))
}

pub fn write_images_file<P: AsRef<Path>>(path: P, images: &[ImageU8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_images(&mut w, images)?;
    w.flush()?;
    Ok(())
}

pub fn write_labels_file<P: AsRef<Path>>(path: P, labels: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_labels(&mut w, labels)?;
    w.flush()?;
    Ok(())
}

//! Self-describing binary tensor container.
//!
//! Layout: magic `RXT1`, a u8 dtype tag (0 = f64 little-endian,
//! 1 = i32 little-endian), a u8 rank, `rank` u32 little-endian dims,
//! then the row-major payload. Round-trips are bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::RealTensor;

const MAGIC: &[u8; 4] = b"RXT1";
const DTYPE_F64: u8 = 0;
const DTYPE_I32: u8 = 1;

/// Payload of an RXT file.
#[derive(Debug, Clone, PartialEq)]
pub enum RxtData {
    F64(RealTensor),
    I32 { values: Vec<i32>, shape: Vec<usize> },
}

impl RxtData {
    pub fn shape(&self) -> &[usize] {
        match self {
            RxtData::F64(t) => t.shape(),
            RxtData::I32 { shape, .. } => shape,
        }
    }
}

fn write_header<W: Write>(w: &mut W, dtype: u8, shape: &[usize]) -> Result<()> {
    if shape.len() > u8::MAX as usize {
        return Err(Error::Format(format!("rank {} too large", shape.len())));
    }
    w.write_all(MAGIC)?;
    w.write_all(&[dtype, shape.len() as u8])?;
    for &dim in shape {
        let dim = u32::try_from(dim)
            .map_err(|_| Error::Format(format!("dimension {dim} exceeds u32")))?;
        w.write_all(&dim.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_f64<W: Write>(w: &mut W, tensor: &RealTensor) -> Result<()> {
    write_header(w, DTYPE_F64, tensor.shape())?;
    for &v in tensor.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_i32<W: Write>(w: &mut W, values: &[i32], shape: &[usize]) -> Result<()> {
    let expected: usize = shape.iter().product();
    if values.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "shape {shape:?} wants {expected} values, got {}",
            values.len()
        )));
    }
    write_header(w, DTYPE_I32, shape)?;
    for &v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read<R: Read>(r: &mut R) -> Result<RxtData> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not an RXT1 file".into()));
    }
    let mut head = [0u8; 2];
    r.read_exact(&mut head)?;
    let (dtype, rank) = (head[0], head[1] as usize);
    let mut shape = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut dim = [0u8; 4];
        r.read_exact(&mut dim)?;
        shape.push(u32::from_le_bytes(dim) as usize);
    }
    let count: usize = shape.iter().product();
    match dtype {
        DTYPE_F64 => {
            let mut values = Vec::with_capacity(count);
            let mut buf = [0u8; 8];
            for _ in 0..count {
                r.read_exact(&mut buf)?;
                values.push(f64::from_le_bytes(buf));
            }
            Ok(RxtData::F64(RealTensor::new(values, shape)?))
        }
        DTYPE_I32 => {
            let mut values = Vec::with_capacity(count);
            let mut buf = [0u8; 4];
            for _ in 0..count {
                r.read_exact(&mut buf)?;
                values.push(i32::from_le_bytes(buf));
            }
            Ok(RxtData::I32 { values, shape })
        }
        other => Err(Error::Format(format!("unknown dtype tag {other}"))),
    }
}

pub fn write_f64_file<P: AsRef<Path>>(path: P, tensor: &RealTensor) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_f64(&mut w, tensor)?;
    w.flush()?;
    Ok(())
}

pub fn write_i32_file<P: AsRef<Path>>(path: P, values: &[i32], shape: &[usize]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_i32(&mut w, values, shape)?;
    w.flush()?;
    Ok(())
}

pub fn read_file<P: AsRef<Path>>(path: P) -> Result<RxtData> {
    read(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip_is_bit_exact() {
        let t = RealTensor::new(vec![-1.5, 0.0, 3.25, 1e-300, -2e17, 0.1], vec![2, 3]).unwrap();
        let mut buf = Vec::new();
        write_f64(&mut buf, &t).unwrap();
        assert_eq!(&buf[..4], b"RXT1");
        assert_eq!(buf[4], DTYPE_F64);
        assert_eq!(buf[5], 2);
        match read(&mut buf.as_slice()).unwrap() {
            RxtData::F64(back) => {
                assert_eq!(back.shape(), t.shape());
                for (a, b) in back.values().iter().zip(t.values()) {
                    assert_eq!(a.to_bits(), b.to_bits());
                }
            }
            _ => panic!("wrong dtype"),
        }
        // Serialize again: byte-identical.
        let mut buf2 = Vec::new();
        write_f64(&mut buf2, &t).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn i32_round_trip() {
        let values = vec![-2, -1, 0, 1, 2, 2];
        let mut buf = Vec::new();
        write_i32(&mut buf, &values, &[3, 2]).unwrap();
        match read(&mut buf.as_slice()).unwrap() {
            RxtData::I32 {
                values: back,
                shape,
            } => {
                assert_eq!(back, values);
                assert_eq!(shape, vec![3, 2]);
            }
            _ => panic!("wrong dtype"),
        }
    }

    #[test]
    fn rejects_bad_magic_and_dtype() {
        assert!(read(&mut &b"NOPE\x00\x01"[..]).is_err());
        let mut buf = Vec::new();
        write_i32(&mut buf, &[1], &[1]).unwrap();
        buf[4] = 9;
        assert!(read(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let mut buf = Vec::new();
        write_i32(&mut buf, &[1, 2, 3], &[3]).unwrap();
        buf.truncate(buf.len() - 2);
        assert!(read(&mut buf.as_slice()).is_err());
    }
}

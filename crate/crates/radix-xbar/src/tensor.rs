//! Dense row-major tensors used throughout the simulator.
//!
//! Two concrete types cover everything the pipeline needs: [`RealTensor`]
//! holds pre-trained floating-point data, [`QuantizedTensor`] holds integer
//! levels together with the closed alphabet bounds they must stay inside.

use crate::error::{Error, Result};

/// Floating-point tensor with an explicit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTensor {
    values: Vec<f64>,
    shape: Vec<usize>,
}

impl RealTensor {
    /// Build a tensor, checking that the element count matches the shape
    /// and that every value is finite.
    pub fn new(values: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} wants {} values, got {}",
                shape,
                expected,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values, shape })
    }

    /// 1-D convenience constructor.
    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Minimum and maximum element. Errors on an empty tensor.
    pub fn min_max(&self) -> Result<(f64, f64)> {
        if self.values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }
}

/// Integer-valued tensor with inclusive alphabet bounds.
///
/// Every element is guaranteed to lie in `[lo, hi]`; constructors enforce
/// this so downstream code can rely on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedTensor {
    values: Vec<i32>,
    shape: Vec<usize>,
    bounds: (i32, i32),
}

impl QuantizedTensor {
    pub fn new(values: Vec<i32>, shape: Vec<usize>, bounds: (i32, i32)) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} wants {} values, got {}",
                shape,
                expected,
                values.len()
            )));
        }
        let (lo, hi) = bounds;
        for &v in &values {
            if v < lo || v > hi {
                return Err(Error::OutOfAlphabet { value: v, lo, hi });
            }
        }
        Ok(Self {
            values,
            shape,
            bounds,
        })
    }

    pub fn from_vec(values: Vec<i32>, bounds: (i32, i32)) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![n], bounds)
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn bounds(&self) -> (i32, i32) {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Element at 2-D index (row-major). Panics if the tensor is not 2-D.
    pub fn at2(&self, row: usize, col: usize) -> i32 {
        assert_eq!(self.shape.len(), 2, "at2 requires a 2-D tensor");
        self.values[row * self.shape[1] + col]
    }
}

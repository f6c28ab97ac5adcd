//! On-disk formats: RXT tensors, IDX datasets, PGM images.

pub mod idx;
pub mod pgm;
pub mod rxt;

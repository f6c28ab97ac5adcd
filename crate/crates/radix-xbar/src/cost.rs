//! Parametric column/device accounting for the competing array schemes.
//!
//! Absolute layout areas are process-specific and not modeled; the
//! reproducible quantities are physical column counts, worst-case device
//! counts, and representable precision levels, with relative area taken as
//! column count times a unit column width.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::quantizer::RadixConfig;

/// Array organizations being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Parallel-device junctions with one shared zero-weight reference
    /// column: `m + 1` physical columns.
    RadixReference,
    /// One differential column pair per logical column, single bit-plane:
    /// `2m` physical columns.
    DifferentialPair,
    /// Binary-encoded weights with `b` bit-planes, each a differential
    /// pair: `2 b m` physical columns.
    BinaryEncodedDifferential,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::RadixReference => "radix_x_reference",
            Scheme::DifferentialPair => "differential_pair",
            Scheme::BinaryEncodedDifferential => "binary_encoded_differential",
        }
    }
}

/// Precision parameter for a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Radix(u32),
    Bits(u32),
}

/// Column, device and precision accounting for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayCostReport {
    pub scheme: Scheme,
    pub columns: u64,
    /// Worst-case programmed device count.
    pub devices: u64,
    pub precision_levels: u64,
    /// Physical columns times a unit column width.
    pub relative_area: f64,
}

/// Cost of implementing `m_logical` logical columns of `n_rows` weights.
///
/// Worst-case devices: for the radix scheme every junction carries its
/// full `x - 1` devices plus the reference column; differential schemes
/// place one device per junction per physical column.
pub fn cost(scheme: Scheme, n_rows: u64, m_logical: u64, precision: Precision) -> Result<ArrayCostReport> {
    let report = match (scheme, precision) {
        (Scheme::RadixReference, Precision::Radix(x)) => {
            let cfg = RadixConfig::new(x)?;
            let columns = m_logical + 1;
            let per_cell = (cfg.x() - 1) as u64;
            let reference = n_rows * cfg.w_min_q().unsigned_abs() as u64;
            ArrayCostReport {
                scheme,
                columns,
                devices: n_rows * m_logical * per_cell + reference,
                precision_levels: x as u64,
                relative_area: columns as f64,
            }
        }
        (Scheme::DifferentialPair, Precision::Bits(_)) | (Scheme::DifferentialPair, Precision::Radix(_)) => {
            let columns = 2 * m_logical;
            ArrayCostReport {
                scheme,
                columns,
                devices: n_rows * columns,
                // One pair stores +g, 0 or -g.
                precision_levels: 3,
                relative_area: columns as f64,
            }
        }
        (Scheme::BinaryEncodedDifferential, Precision::Bits(b)) => {
            if b == 0 {
                return Err(Error::Format("bit width must be at least 1".into()));
            }
            let columns = 2 * b as u64 * m_logical;
            ArrayCostReport {
                scheme,
                columns,
                devices: n_rows * columns,
                precision_levels: 1u64 << b,
                relative_area: columns as f64,
            }
        }
        (Scheme::BinaryEncodedDifferential, Precision::Radix(_))
        | (Scheme::RadixReference, Precision::Bits(_)) => {
            return Err(Error::Format(format!(
                "scheme {} needs the matching precision parameter",
                scheme.label()
            )));
        }
    };
    Ok(report)
}

/// Exact accounting for an already-programmed crossbar: physical columns
/// and the programmed device count (signal cells plus reference column).
pub fn cost_of_program(program: &crate::crossbar::CrossbarProgram) -> ArrayCostReport {
    let columns = program.m() as u64 + 1;
    ArrayCostReport {
        scheme: Scheme::RadixReference,
        columns,
        devices: program.device_count(),
        precision_levels: program.cfg().x() as u64,
        relative_area: columns as f64,
    }
}

/// Side-by-side comparison of the radix scheme against the binary-encoded
/// differential baseline of equivalent precision.
#[derive(Debug, Clone, PartialEq)]
pub struct CostComparison {
    pub radix: ArrayCostReport,
    pub baseline: ArrayCostReport,
}

impl CostComparison {
    /// Radix-x array against the closest binary baseline (`b` bits such
    /// that `2^b` is the largest power of two not exceeding `x`).
    pub fn closest_binary(n_rows: u64, m_logical: u64, x: u32) -> Result<Self> {
        let bits = (32 - x.leading_zeros()).saturating_sub(1).max(1);
        Ok(Self {
            radix: cost(Scheme::RadixReference, n_rows, m_logical, Precision::Radix(x))?,
            baseline: cost(
                Scheme::BinaryEncodedDifferential,
                n_rows,
                m_logical,
                Precision::Bits(bits),
            )?,
        })
    }

    pub fn column_ratio(&self) -> f64 {
        self.radix.columns as f64 / self.baseline.columns as f64
    }

    /// Level-count ratio of the two schemes (raw precision comparison).
    pub fn level_ratio(&self) -> f64 {
        self.radix.precision_levels as f64 / self.baseline.precision_levels as f64
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<28} {:>8} {:>12} {:>7} {:>14}",
            "scheme", "columns", "devices", "levels", "relative_area"
        )
        .unwrap();
        for r in [&self.radix, &self.baseline] {
            writeln!(
                out,
                "{:<28} {:>8} {:>12} {:>7} {:>14}",
                r.scheme.label(),
                r.columns,
                r.devices,
                r.precision_levels,
                r.relative_area
            )
            .unwrap();
        }
        writeln!(
            out,
            "column ratio: {:.4} ({:.1}% reduction)",
            self.column_ratio(),
            100.0 * (1.0 - self.column_ratio())
        )
        .unwrap();
        // Both readings of the precision gap: the radix scheme's raw gain
        // and the baseline's shortfall.
        writeln!(
            out,
            "levels: {} vs {} ({:+.0}% raw level count; baseline carries {:.0}% fewer levels)",
            self.radix.precision_levels,
            self.baseline.precision_levels,
            100.0 * (self.level_ratio() - 1.0),
            100.0 * (1.0 - 1.0 / self.level_ratio())
        )
        .unwrap();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,columns,devices,levels,relative_area\n");
        for r in [&self.radix, &self.baseline] {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.scheme.label(),
                r.columns,
                r.devices,
                r.precision_levels,
                r.relative_area
            )
            .unwrap();
        }
        out
    }
}

//! Physical crossbar image of a quantized weight matrix.
//!
//! Each crosspoint holds 0..=x-1 parallel low-resistance memristors; the
//! signed weight alphabet maps onto those counts by a level shift, and one
//! extra reference column programmed to the zero-weight count makes the
//! shift removable downstream. The array is read-only: programs are built
//! once and never mutated.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quantizer::RadixConfig;
use crate::tensor::QuantizedTensor;

/// Number of low-resistance memristors wired in parallel at one junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrosspointCell {
    pub active_count: u32,
}

impl CrosspointCell {
    pub fn new(active_count: u32) -> Self {
        Self { active_count }
    }
}

/// Electrical constants of a single memristor device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    /// Low-resistance-state resistance in ohms.
    pub r_m: f64,
    /// R_off / R_on ratio; `f64::INFINITY` models an ideal open.
    pub hrs_ratio: f64,
    /// Relative standard deviation of per-device conductance.
    pub sigma_g: f64,
    /// Switching threshold in volts; read voltages must stay below it.
    pub v_th: f64,
    /// When true, junction slots without an active device still leak
    /// through their high-resistance state. Default off: the mask layout
    /// hard-wires connections, so absent devices are true opens.
    pub hrs_leak: bool,
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self {
            r_m: 100e3,
            hrs_ratio: 100.0,
            sigma_g: 0.0,
            v_th: 0.5,
            hrs_leak: false,
        }
    }
}

impl DeviceModel {
    /// Constants of the fabricated 4x4 test array. The bench measured a
    /// fully connected four-device junction drawing 1.6 uA at the 0.4 V
    /// read level, which puts a single constituent device at 1 MOhm.
    pub fn prototype() -> Self {
        Self {
            r_m: 1e6,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r_m.is_finite() || self.r_m <= 0.0 {
            return Err(Error::Format(format!("r_m must be positive, got {}", self.r_m)));
        }
        // Infinite hrs_ratio means ideal opens and is allowed.
        if self.hrs_ratio.is_nan() || self.hrs_ratio < 1.0 {
            return Err(Error::Format(format!(
                "hrs_ratio must be >= 1, got {}",
                self.hrs_ratio
            )));
        }
        if !self.sigma_g.is_finite() || self.sigma_g < 0.0 {
            return Err(Error::Format(format!(
                "sigma_g must be >= 0, got {}",
                self.sigma_g
            )));
        }
        if !self.v_th.is_finite() || self.v_th <= 0.0 {
            return Err(Error::Format(format!("v_th must be positive, got {}", self.v_th)));
        }
        Ok(())
    }
}

/// Identifies one junction for noise purposes: the perturbation stream is
/// partitioned per (seed, column, row, device) so evaluation order and
/// concurrency cannot change results.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSite {
    pub seed: u64,
    pub column: u32,
    pub row: u32,
}

/// Map a weight level to its parallel-device count: `w_q + |w_min_q|`.
pub fn weight_to_count(w_q: i32, cfg: &RadixConfig) -> Result<u32> {
    let (lo, hi) = cfg.weight_bounds();
    if w_q < lo || w_q > hi {
        return Err(Error::OutOfAlphabet { value: w_q, lo, hi });
    }
    Ok((w_q - lo) as u32)
}

/// Inverse of [`weight_to_count`]: recover the weight level from a count.
pub fn count_to_weight(count: u32, cfg: &RadixConfig) -> Result<i32> {
    let w = count as i32 + cfg.w_min_q();
    let (lo, hi) = cfg.weight_bounds();
    if w < lo || w > hi {
        return Err(Error::OutOfAlphabet { value: w, lo, hi });
    }
    Ok(w)
}

/// Lognormal multiplier with mean 1 and relative standard deviation
/// `sigma`, drawn deterministically for device index `device` at `site`.
fn device_factor(sigma: f64, site: NoiseSite, device: u32) -> f64 {
    // sigma parameterizes std/mean exactly: var of ln is ln(1 + sigma^2).
    let ln_var = (1.0 + sigma * sigma).ln();
    let ln_sigma = ln_var.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(site.seed, site.column, site.row, device));
    let z: f64 = StandardNormal.sample(&mut rng);
    (-0.5 * ln_var + ln_sigma * z).exp()
}

/// SplitMix64-style avalanche over the site coordinates.
fn mix64(seed: u64, column: u32, row: u32, device: u32) -> u64 {
    let mut h = seed
        ^ (column as u64).wrapping_mul(0x9e3779b97f4a7c15)
        ^ (row as u64).wrapping_mul(0xbf58476d1ce4e5b9)
        ^ (device as u64).wrapping_mul(0x94d049bb133111eb);
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d049bb133111eb);
    h ^= h >> 31;
    h
}

/// Conductance of one junction in siemens.
///
/// Ideal value is `active_count / r_m`. With `hrs_leak` on and a finite
/// `hrs_ratio`, the `x - 1 - active_count` inactive slots contribute
/// `1 / (hrs_ratio * r_m)` each. With `sigma_g > 0` and a noise site,
/// every constituent device is scaled by an independent lognormal factor.
pub fn cell_conductance(
    cell: CrosspointCell,
    cfg: &RadixConfig,
    dev: &DeviceModel,
    site: Option<NoiseSite>,
) -> f64 {
    let g_lrs = 1.0 / dev.r_m;
    let slots = cfg.x() - 1;
    let hrs_g = if dev.hrs_leak && dev.hrs_ratio.is_finite() {
        g_lrs / dev.hrs_ratio
    } else {
        0.0
    };

    match site {
        Some(site) if dev.sigma_g > 0.0 => {
            let mut g = 0.0;
            for d in 0..cell.active_count {
                g += g_lrs * device_factor(dev.sigma_g, site, d);
            }
            if hrs_g > 0.0 {
                for d in cell.active_count..slots {
                    g += hrs_g * device_factor(dev.sigma_g, site, d);
                }
            }
            g
        }
        // sigma_g = 0 takes the exact ideal path: no draws at all.
        _ => cell.active_count as f64 * g_lrs + (slots - cell.active_count) as f64 * hrs_g,
    }
}

/// A programmed crossbar: `n x m` signal cells plus the reference column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossbarProgram {
    cells: Vec<CrosspointCell>,
    reference: CrosspointCell,
    cfg: RadixConfig,
    n: usize,
    m: usize,
}

impl CrossbarProgram {
    /// Row count (inputs).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Signal column count (outputs); the reference column is extra.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cfg(&self) -> &RadixConfig {
        &self.cfg
    }

    pub fn cell(&self, row: usize, col: usize) -> CrosspointCell {
        self.cells[row * self.m + col]
    }

    /// Reference-column cell for a row; every row holds the zero-weight
    /// count `|w_min_q|`.
    pub fn reference_cell(&self, _row: usize) -> CrosspointCell {
        self.reference
    }

    /// Column index the reference line occupies for noise partitioning.
    pub fn reference_column_index(&self) -> u32 {
        self.m as u32
    }

    /// Total programmed devices: sum of all signal counts plus the
    /// reference column.
    pub fn device_count(&self) -> u64 {
        let signal: u64 = self.cells.iter().map(|c| c.active_count as u64).sum();
        signal + self.n as u64 * self.reference.active_count as u64
    }

    /// Recover the programmed weight matrix from the cell counts.
    pub fn to_weights(&self) -> Result<QuantizedTensor> {
        let values: Result<Vec<i32>> = self
            .cells
            .iter()
            .map(|c| count_to_weight(c.active_count, &self.cfg))
            .collect();
        QuantizedTensor::new(values?, vec![self.n, self.m], self.cfg.weight_bounds())
    }

    /// Text form: a header line followed by one line per row holding the
    /// m signal counts with the reference count last.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "XBAR x={} n={} m={}", self.cfg.x(), self.n, self.m).unwrap();
        for i in 0..self.n {
            for j in 0..self.m {
                write!(out, "{} ", self.cell(i, j).active_count).unwrap();
            }
            writeln!(out, "{}", self.reference.active_count).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty crossbar file".into()))?;
        let mut x = None;
        let mut n = None;
        let mut m = None;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("XBAR") {
            return Err(Error::Format("missing XBAR header".into()));
        }
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header field '{field}'")))?;
            let value: usize = value
                .parse()
                .map_err(|_| Error::Format(format!("bad header value '{field}'")))?;
            match key {
                "x" => x = Some(value),
                "n" => n = Some(value),
                "m" => m = Some(value),
                _ => return Err(Error::Format(format!("unknown header key '{key}'"))),
            }
        }
        let (x, n, m) = match (x, n, m) {
            (Some(x), Some(n), Some(m)) => (x, n, m),
            _ => return Err(Error::Format("header must carry x, n and m".into())),
        };
        let cfg = RadixConfig::new(x as u32)?;
        let ref_count = cfg.w_min_q().unsigned_abs();

        let mut cells = Vec::with_capacity(n * m);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing row {i}")))?;
            let counts: Vec<u32> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|_| Error::Format(format!("bad count '{tok}' in row {i}")))
                })
                .collect::<Result<_>>()?;
            if counts.len() != m + 1 {
                return Err(Error::Format(format!(
                    "row {i} has {} counts, expected {}",
                    counts.len(),
                    m + 1
                )));
            }
            for &c in &counts[..m] {
                if c > cfg.x() - 1 {
                    return Err(Error::Format(format!("count {c} exceeds x-1 in row {i}")));
                }
                cells.push(CrosspointCell::new(c));
            }
            if counts[m] != ref_count {
                return Err(Error::Format(format!(
                    "reference count {} in row {i}, expected {ref_count}",
                    counts[m]
                )));
            }
        }
        Ok(Self {
            cells,
            reference: CrosspointCell::new(ref_count),
            cfg,
            n,
            m,
        })
    }
}

/// Translate a 2-D quantized weight matrix into a crossbar program.
pub fn program_crossbar(w_q: &QuantizedTensor, cfg: &RadixConfig) -> Result<CrossbarProgram> {
    if w_q.shape().len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "crossbar weights must be 2-D, got shape {:?}",
            w_q.shape()
        )));
    }
    let n = w_q.shape()[0];
    let m = w_q.shape()[1];
    let cells: Result<Vec<CrosspointCell>> = w_q
        .values()
        .iter()
        .map(|&w| weight_to_count(w, cfg).map(CrosspointCell::new))
        .collect();
    Ok(CrossbarProgram {
        cells: cells?,
        reference: CrosspointCell::new(cfg.w_min_q().unsigned_abs()),
        cfg: *cfg,
        n,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    fn cfg5() -> RadixConfig {
        RadixConfig::radix5()
    }

    #[test]
    fn weight_count_mapping_matches_level_shift() {
        let cfg = cfg5();
        assert_eq!(weight_to_count(-2, &cfg).unwrap(), 0);
        assert_eq!(weight_to_count(-1, &cfg).unwrap(), 1);
        assert_eq!(weight_to_count(0, &cfg).unwrap(), 2);
        assert_eq!(weight_to_count(1, &cfg).unwrap(), 3);
        assert_eq!(weight_to_count(2, &cfg).unwrap(), 4);
        assert!(matches!(
            weight_to_count(3, &cfg),
            Err(Error::OutOfAlphabet { .. })
        ));
    }

    #[test]
    fn count_mapping_is_a_bijection() {
        for x in [3u32, 5, 7, 9] {
            let cfg = RadixConfig::new(x).unwrap();
            for w in cfg.w_min_q()..=cfg.w_max_q() {
                let c = weight_to_count(w, &cfg).unwrap();
                assert!(c < x);
                assert_eq!(count_to_weight(c, &cfg).unwrap(), w);
            }
        }
    }

    #[test]
    fn ideal_conductances_from_counts() {
        let cfg = cfg5();
        let dev = DeviceModel::default();
        let g = cell_conductance(CrosspointCell::new(2), &cfg, &dev, None);
        assert_eq!(g, 20e-6);
        let g0 = cell_conductance(CrosspointCell::new(0), &cfg, &dev, None);
        assert_eq!(g0, 0.0);
    }

    #[test]
    fn zero_variance_noise_is_identity() {
        let cfg = cfg5();
        let dev = DeviceModel::default();
        let site = NoiseSite {
            seed: 123,
            column: 0,
            row: 0,
        };
        let cell = CrosspointCell::new(4);
        let noisy = cell_conductance(cell, &cfg, &dev, Some(site));
        let ideal = cell_conductance(cell, &cfg, &dev, None);
        assert_eq!(noisy, ideal);
        assert_eq!(ideal, 40e-6);
    }

    #[test]
    fn hrs_leak_adds_inactive_slot_conductance() {
        let cfg = cfg5();
        let dev = DeviceModel {
            hrs_leak: true,
            ..DeviceModel::default()
        };
        // One active device plus three leaking slots at ratio 100.
        let g = cell_conductance(CrosspointCell::new(1), &cfg, &dev, None);
        let expected = 1.0 / 100e3 + 3.0 / (100.0 * 100e3);
        assert!((g - expected).abs() < 1e-18);
        // Infinite ratio keeps opens ideal even in leak mode.
        let dev_inf = DeviceModel {
            hrs_leak: true,
            hrs_ratio: f64::INFINITY,
            ..DeviceModel::default()
        };
        let g_inf = cell_conductance(CrosspointCell::new(1), &cfg, &dev_inf, None);
        assert_eq!(g_inf, 1.0 / 100e3);
    }

    #[test]
    fn noise_is_deterministic_per_site() {
        let cfg = cfg5();
        let dev = DeviceModel {
            sigma_g: 0.1,
            ..DeviceModel::default()
        };
        let cell = CrosspointCell::new(3);
        let site = NoiseSite {
            seed: 9,
            column: 4,
            row: 17,
        };
        let a = cell_conductance(cell, &cfg, &dev, Some(site));
        let b = cell_conductance(cell, &cfg, &dev, Some(site));
        assert_eq!(a, b);

        let other = NoiseSite {
            seed: 9,
            column: 5,
            row: 17,
        };
        assert_ne!(a, cell_conductance(cell, &cfg, &dev, Some(other)));
    }

    #[test]
    fn noise_statistics_match_requested_sigma() {
        let cfg = cfg5();
        let sigma = 0.2;
        let dev = DeviceModel {
            sigma_g: sigma,
            ..DeviceModel::default()
        };
        let cell = CrosspointCell::new(1);
        let n = 20_000;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let site = NoiseSite {
                    seed: 77,
                    column: 0,
                    row: i as u32,
                };
                cell_conductance(cell, &cfg, &dev, Some(site)) * dev.r_m
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!((var.sqrt() - sigma).abs() < 0.01, "std {}", var.sqrt());
    }

    #[test]
    fn programming_matches_table_mapping() {
        let cfg = cfg5();
        let w = QuantizedTensor::new(vec![2, -1, -1], vec![3, 1], cfg.weight_bounds()).unwrap();
        let prog = program_crossbar(&w, &cfg).unwrap();
        assert_eq!(prog.cell(0, 0).active_count, 4);
        assert_eq!(prog.cell(1, 0).active_count, 1);
        assert_eq!(prog.cell(2, 0).active_count, 1);
        for i in 0..3 {
            assert_eq!(prog.reference_cell(i).active_count, 2);
        }
        assert_eq!(prog.device_count(), 6 + 6);
    }

    #[test]
    fn all_zero_weights_equal_reference() {
        let cfg = cfg5();
        let w = QuantizedTensor::new(vec![0; 6], vec![2, 3], cfg.weight_bounds()).unwrap();
        let prog = program_crossbar(&w, &cfg).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(prog.cell(i, j), prog.reference_cell(i));
            }
        }
    }

    #[test]
    fn program_round_trips_through_weights() {
        let cfg = cfg5();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values: Vec<i32> = (0..64).map(|_| rng.gen_range(-2..=2)).collect();
        let w = QuantizedTensor::new(values, vec![8, 8], cfg.weight_bounds()).unwrap();
        let prog = program_crossbar(&w, &cfg).unwrap();
        assert_eq!(prog.to_weights().unwrap(), w);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let cfg = cfg5();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let values: Vec<i32> = (0..12).map(|_| rng.gen_range(-2..=2)).collect();
        let w = QuantizedTensor::new(values, vec![4, 3], cfg.weight_bounds()).unwrap();
        let prog = program_crossbar(&w, &cfg).unwrap();
        let text = prog.to_text();
        let parsed = CrossbarProgram::from_text(&text).unwrap();
        assert_eq!(parsed, prog);
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn text_parse_rejects_bad_reference() {
        let text = "XBAR x=5 n=1 m=2\n0 1 3\n";
        assert!(CrossbarProgram::from_text(text).is_err());
    }
}

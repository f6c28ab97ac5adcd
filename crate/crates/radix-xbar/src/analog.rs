//! Steady-state evaluation of the analog read-out chain.
//!
//! One read applies a voltage vector to the rows, sums junction currents
//! down each column wire (the columns sit at virtual ground), converts the
//! currents to voltages through inverting amplifiers, and subtracts the
//! reference-column voltage so the level-shifted conductances recover the
//! signed matrix-vector product. Under ideal devices the column voltage is
//! `(r_fb / (r_m * s)) * y` for integer output `y`, which `decode_output`
//! inverts.

use std::fmt::Write as _;

use crate::crossbar::{cell_conductance, CrossbarProgram, DeviceModel, NoiseSite};
use crate::error::{Error, Result};
use crate::quantizer::RadixConfig;
use crate::tensor::QuantizedTensor;

/// Electrical constants of the read-out periphery.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams {
    pub dev: DeviceModel,
    /// Feedback resistance of the inverting amplifiers, ohms.
    pub r_fb: f64,
    /// Input scaling factor: an activation level `a` drives `a / s` volts.
    pub s: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self {
            dev: DeviceModel::default(),
            r_fb: 10.0,
            s: 10.0,
        }
    }
}

impl CircuitParams {
    /// Read-out constants paired with the fabricated test array.
    pub fn prototype() -> Self {
        Self {
            dev: DeviceModel::prototype(),
            ..Self::default()
        }
    }

    /// Check the electrical invariants, including that the largest
    /// activation level still reads below the switching threshold.
    pub fn validate(&self, cfg: &RadixConfig) -> Result<()> {
        self.dev.validate()?;
        if !self.r_fb.is_finite() || self.r_fb <= 0.0 {
            return Err(Error::Format(format!(
                "r_fb must be positive, got {}",
                self.r_fb
            )));
        }
        if !self.s.is_finite() || self.s <= 0.0 {
            return Err(Error::Format(format!("s must be positive, got {}", self.s)));
        }
        let v_max = cfg.a_max() as f64 / self.s;
        if v_max >= self.dev.v_th {
            return Err(Error::ReadVoltageExceedsThreshold {
                voltage: v_max,
                threshold: self.dev.v_th,
            });
        }
        Ok(())
    }

    /// Voltage-to-integer decode factor `r_m * s / r_fb`.
    pub fn decode_gain(&self) -> f64 {
        self.dev.r_m * self.s / self.r_fb
    }
}

/// Column and reference currents for one applied input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnCurrents {
    /// Per-signal-column current in amperes.
    pub i_tot: Vec<f64>,
    /// Reference-column current in amperes.
    pub i_ref: f64,
}

/// Full read-out: currents plus the amplifier and subtractor voltages.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogReadout {
    pub i_tot: Vec<f64>,
    pub i_ref: f64,
    /// Inverting-amplifier outputs, `-r_fb * i_tot`.
    pub v_inv: Vec<f64>,
    /// Reference inverting-amplifier output, `-r_fb * i_ref`.
    pub v_ref: f64,
    /// Subtractor outputs, `v_ref - v_inv`.
    pub v_col: Vec<f64>,
}

/// Map activation levels to row voltages `v_i = x_i / s`, rejecting any
/// level whose read voltage would reach the switching threshold.
pub fn encode_inputs(x: &QuantizedTensor, params: &CircuitParams) -> Result<Vec<f64>> {
    let mut v = Vec::with_capacity(x.len());
    for &level in x.values() {
        if level < 0 {
            return Err(Error::OutOfAlphabet {
                value: level,
                lo: 0,
                hi: i32::MAX,
            });
        }
        let voltage = level as f64 / params.s;
        if voltage >= params.dev.v_th {
            return Err(Error::ReadVoltageExceedsThreshold {
                voltage,
                threshold: params.dev.v_th,
            });
        }
        v.push(voltage);
    }
    Ok(v)
}

/// Sum junction currents down every column for the applied row voltages.
///
/// With `noise_seed` set and `sigma_g > 0`, every junction (reference
/// column included) is perturbed independently; with `sigma_g = 0` the
/// result is bit-identical to the ideal path.
pub fn column_currents(
    program: &CrossbarProgram,
    v: &[f64],
    params: &CircuitParams,
    noise_seed: Option<u64>,
) -> Result<ColumnCurrents> {
    if v.len() != program.n() {
        return Err(Error::DimensionMismatch {
            expected: program.n(),
            got: v.len(),
        });
    }
    let site_for = |column: u32, row: usize| {
        noise_seed.map(|seed| NoiseSite {
            seed,
            column,
            row: row as u32,
        })
    };

    let mut i_tot = vec![0.0; program.m()];
    for (j, current) in i_tot.iter_mut().enumerate() {
        for (i, &voltage) in v.iter().enumerate() {
            let g = cell_conductance(
                program.cell(i, j),
                program.cfg(),
                &params.dev,
                site_for(j as u32, i),
            );
            *current += g * voltage;
        }
    }

    let ref_col = program.reference_column_index();
    let mut i_ref = 0.0;
    for (i, &voltage) in v.iter().enumerate() {
        let g = cell_conductance(
            program.reference_cell(i),
            program.cfg(),
            &params.dev,
            site_for(ref_col, i),
        );
        i_ref += g * voltage;
    }

    Ok(ColumnCurrents { i_tot, i_ref })
}

/// Run the currents through the inverting amplifiers and the subtractor.
pub fn output_stage(currents: ColumnCurrents, params: &CircuitParams) -> AnalogReadout {
    let v_inv: Vec<f64> = currents.i_tot.iter().map(|&i| -params.r_fb * i).collect();
    let v_ref = -params.r_fb * currents.i_ref;
    let v_col: Vec<f64> = v_inv.iter().map(|&vi| v_ref - vi).collect();
    AnalogReadout {
        i_tot: currents.i_tot,
        i_ref: currents.i_ref,
        v_inv,
        v_ref,
        v_col,
    }
}

/// Full read of one input vector: encode, sum currents, output stage.
pub fn simulate_mvm(
    program: &CrossbarProgram,
    x: &QuantizedTensor,
    params: &CircuitParams,
    noise_seed: Option<u64>,
) -> Result<AnalogReadout> {
    let v = encode_inputs(x, params)?;
    let currents = column_currents(program, &v, params, noise_seed)?;
    Ok(output_stage(currents, params))
}

/// Invert the output scaling: `y_hat = round(v_col * r_m * s / r_fb)`,
/// rounding ties to even. Exact under ideal devices.
pub fn decode_output(readout: &AnalogReadout, params: &CircuitParams) -> Vec<i32> {
    let gain = params.decode_gain();
    readout
        .v_col
        .iter()
        .map(|&v| (v * gain).round_ties_even() as i32)
        .collect()
}

/// CSV export: one row per column plus one reference row.
pub fn readout_to_csv(readout: &AnalogReadout, decoded: &[i32]) -> String {
    let mut out = String::from("col,i_tot_A,v_inv_V,v_col_V,y_hat\n");
    for (j, y_hat) in decoded.iter().enumerate() {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{}",
            j, readout.i_tot[j], readout.v_inv[j], readout.v_col[j], y_hat
        )
        .unwrap();
    }
    writeln!(out, "ref,{:e},{:e},,", readout.i_ref, readout.v_ref).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossbar::program_crossbar;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg5() -> RadixConfig {
        RadixConfig::radix5()
    }

    fn qt(values: Vec<i32>, rows: usize, cols: usize) -> QuantizedTensor {
        QuantizedTensor::new(values, vec![rows, cols], cfg5().weight_bounds()).unwrap()
    }

    fn activations(values: Vec<i32>) -> QuantizedTensor {
        QuantizedTensor::from_vec(values, cfg5().activation_bounds()).unwrap()
    }

    #[test]
    fn encode_divides_by_scale_factor() {
        let params = CircuitParams::default();
        let v = encode_inputs(&activations(vec![2, 3, 1]), &params).unwrap();
        assert_eq!(v, vec![0.2, 0.3, 0.1]);
        let zeros = encode_inputs(&activations(vec![0, 0]), &params).unwrap();
        assert_eq!(zeros, vec![0.0, 0.0]);
    }

    #[test]
    fn encode_guards_switching_threshold() {
        let params = CircuitParams::default();
        // 4 / 10 = 0.4 V is below v_th = 0.5 V.
        assert!(encode_inputs(&activations(vec![4]), &params).is_ok());
        // 4 / 5 = 0.8 V would disturb the array.
        let tight = CircuitParams {
            s: 5.0,
            ..CircuitParams::default()
        };
        assert!(matches!(
            encode_inputs(&activations(vec![4]), &tight),
            Err(Error::ReadVoltageExceedsThreshold { .. })
        ));
    }

    #[test]
    fn params_validation_requires_headroom() {
        let cfg = cfg5();
        assert!(CircuitParams::default().validate(&cfg).is_ok());
        let tight = CircuitParams {
            s: 5.0,
            ..CircuitParams::default()
        };
        assert!(tight.validate(&cfg).is_err());
    }

    #[test]
    fn single_column_current_worked_example() {
        // Weights [2, -1, -1] at 0.2/0.3/0.1 V: 12 uA.
        let params = CircuitParams::default();
        let prog = program_crossbar(&qt(vec![2, -1, -1], 3, 1), &cfg5()).unwrap();
        let c = column_currents(&prog, &[0.2, 0.3, 0.1], &params, None).unwrap();
        assert!((c.i_tot[0] - 12e-6).abs() < 1e-18);
        assert!((c.i_ref - 12e-6).abs() < 1e-18);
    }

    #[test]
    fn second_column_current_worked_example() {
        // Weights [2, 1, -1] at 0.1/0.2/0.4 V: 14 uA.
        let params = CircuitParams::default();
        let prog = program_crossbar(&qt(vec![2, 1, -1], 3, 1), &cfg5()).unwrap();
        let c = column_currents(&prog, &[0.1, 0.2, 0.4], &params, None).unwrap();
        assert!((c.i_tot[0] - 14e-6).abs() < 1e-18);
    }

    #[test]
    fn zero_bias_draws_no_current() {
        let params = CircuitParams::default();
        let prog = program_crossbar(&qt(vec![2, -1, 0, 1], 2, 2), &cfg5()).unwrap();
        let c = column_currents(&prog, &[0.0, 0.0], &params, None).unwrap();
        assert_eq!(c.i_tot, vec![0.0, 0.0]);
        assert_eq!(c.i_ref, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let params = CircuitParams::default();
        let prog = program_crossbar(&qt(vec![1, -1], 2, 1), &cfg5()).unwrap();
        assert!(matches!(
            column_currents(&prog, &[0.1], &params, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn subtractor_removes_reference_offset() {
        let params = CircuitParams::default();
        let currents = ColumnCurrents {
            i_tot: vec![12e-6, 17e-6, 16e-6],
            i_ref: 12e-6,
        };
        let r = output_stage(currents, &params);
        let diffs: Vec<f64> = r.v_col.iter().map(|v| v / params.r_fb).collect();
        assert!((diffs[0] - 0.0).abs() < 1e-15);
        assert!((diffs[1] - 5e-6).abs() < 1e-15);
        assert!((diffs[2] - 4e-6).abs() < 1e-15);
        assert!((r.v_inv[0] + 12e-5).abs() < 1e-15);
        assert!((r.v_ref + 12e-5).abs() < 1e-15);
    }

    #[test]
    fn worked_pulse_decodes_to_four() {
        // Weights [1, 0, 2] with inputs [2, 3, 1] give y = 4 -> 40 uV.
        let params = CircuitParams::default();
        let prog = program_crossbar(&qt(vec![1, 0, 2], 3, 1), &cfg5()).unwrap();
        let r = simulate_mvm(&prog, &activations(vec![2, 3, 1]), &params, None).unwrap();
        assert!((r.v_col[0] - 40e-6).abs() / 40e-6 < 1e-9);
        assert_eq!(decode_output(&r, &params), vec![4]);
    }

    #[test]
    fn decode_zero_voltage_is_zero() {
        let params = CircuitParams::default();
        let r = AnalogReadout {
            i_tot: vec![0.0],
            i_ref: 0.0,
            v_inv: vec![0.0],
            v_ref: 0.0,
            v_col: vec![0.0],
        };
        assert_eq!(decode_output(&r, &params), vec![0]);
    }

    #[test]
    fn ideal_path_matches_integer_oracle() {
        // Independent check: direct integer dot products.
        let cfg = cfg5();
        let params = CircuitParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let n = rng.gen_range(1..=16);
            let m = rng.gen_range(1..=8);
            let w: Vec<i32> = (0..n * m).map(|_| rng.gen_range(-2..=2)).collect();
            let x: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
            let mut expected = vec![0i32; m];
            for j in 0..m {
                for i in 0..n {
                    expected[j] += w[i * m + j] * x[i];
                }
            }
            let prog = program_crossbar(&qt(w, n, m), &cfg).unwrap();
            let r = simulate_mvm(&prog, &activations(x), &params, None).unwrap();
            assert_eq!(decode_output(&r, &params), expected);
            // Scaling law on the raw voltages; the floor is one output
            // level's worth of voltage.
            let k = params.r_fb / (params.dev.r_m * params.s);
            for (v, y) in r.v_col.iter().zip(&expected) {
                let ideal = k * *y as f64;
                let err = (v - ideal).abs();
                assert!(err <= 1e-9 * ideal.abs().max(k));
            }
        }
    }

    #[test]
    fn superposition_holds_in_current_domain() {
        let params = CircuitParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 12;
        let w: Vec<i32> = (0..n * 3).map(|_| rng.gen_range(-2..=2)).collect();
        let prog = program_crossbar(&qt(w, n, 3), &cfg5()).unwrap();
        let x1: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let x2: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let sum: Vec<i32> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();

        let r1 = simulate_mvm(&prog, &activations(x1), &params, None).unwrap();
        let r2 = simulate_mvm(&prog, &activations(x2), &params, None).unwrap();
        let rs = simulate_mvm(&prog, &activations(sum), &params, None).unwrap();
        for j in 0..3 {
            let combined = r1.i_tot[j] + r2.i_tot[j];
            assert!((rs.i_tot[j] - combined).abs() <= 1e-12 * combined.abs().max(1e-30));
        }
    }

    #[test]
    fn all_zero_weights_null_every_column() {
        let params = CircuitParams::default();
        let w = qt(vec![0; 12], 4, 3);
        let prog = program_crossbar(&w, &cfg5()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let x: Vec<i32> = (0..4).map(|_| rng.gen_range(0..=4)).collect();
            let r = simulate_mvm(&prog, &activations(x), &params, None).unwrap();
            for &v in &r.v_col {
                assert!(v.abs() < 1e-18);
            }
        }
    }

    #[test]
    fn noisy_run_is_seed_deterministic() {
        let params = CircuitParams {
            dev: DeviceModel {
                sigma_g: 0.15,
                ..DeviceModel::default()
            },
            ..CircuitParams::default()
        };
        let prog = program_crossbar(&qt(vec![2, -1, 1, 0, -2, 2], 3, 2), &cfg5()).unwrap();
        let x = activations(vec![1, 4, 2]);
        let a = simulate_mvm(&prog, &x, &params, Some(42)).unwrap();
        let b = simulate_mvm(&prog, &x, &params, Some(42)).unwrap();
        assert_eq!(a, b);
        let c = simulate_mvm(&prog, &x, &params, Some(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sigma_zero_noisy_path_is_bit_identical_to_ideal() {
        let params = CircuitParams::default();
        let prog = program_crossbar(&qt(vec![2, -1, 1, 0, -2, 2], 3, 2), &cfg5()).unwrap();
        let x = activations(vec![1, 4, 2]);
        let seeded = simulate_mvm(&prog, &x, &params, Some(987)).unwrap();
        let ideal = simulate_mvm(&prog, &x, &params, None).unwrap();
        assert_eq!(seeded, ideal);
    }

    #[test]
    fn zero_noise_decode_never_errs() {
        let cfg = cfg5();
        let params = CircuitParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut mismatches = 0;
        for _ in 0..1000 {
            let n = rng.gen_range(1..=10);
            let w: Vec<i32> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let x: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
            let expected: i32 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
            let prog = program_crossbar(&qt(w, n, 1), &cfg).unwrap();
            let r = simulate_mvm(&prog, &activations(x), &params, Some(5)).unwrap();
            if decode_output(&r, &params)[0] != expected {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn decode_error_rate_grows_with_device_variation() {
        let cfg = cfg5();
        let error_rate = |sigma: f64| -> f64 {
            let params = CircuitParams {
                dev: DeviceModel {
                    sigma_g: sigma,
                    ..DeviceModel::default()
                },
                ..CircuitParams::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(555);
            let mut wrong = 0usize;
            let mut total = 0usize;
            for trial in 0..400u64 {
                let n = rng.gen_range(4..=24);
                let w: Vec<i32> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                let x: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
                let expected: i32 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
                let prog = program_crossbar(&qt(w, n, 1), &cfg).unwrap();
                let r = simulate_mvm(&prog, &activations(x), &params, Some(trial)).unwrap();
                if decode_output(&r, &params)[0] != expected {
                    wrong += 1;
                }
                total += 1;
            }
            wrong as f64 / total as f64
        };
        let rates: Vec<f64> = [0.0, 0.02, 0.1, 0.3].iter().map(|&s| error_rate(s)).collect();
        assert_eq!(rates[0], 0.0);
        for pair in rates.windows(2) {
            assert!(pair[0] <= pair[1], "rates {rates:?}");
        }
        assert!(rates[3] > rates[0]);
    }

    #[test]
    fn csv_layout_matches_contract() {
        let params = CircuitParams::default();
        let r = AnalogReadout {
            i_tot: vec![12e-6],
            i_ref: 12e-6,
            v_inv: vec![-12e-5],
            v_ref: -12e-5,
            v_col: vec![0.0],
        };
        let decoded = decode_output(&r, &params);
        let csv = readout_to_csv(&r, &decoded);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("col,i_tot_A,v_inv_V,v_col_V,y_hat"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,"));
        assert!(row.ends_with(",0"));
        let ref_row = lines.next().unwrap();
        assert!(ref_row.starts_with("ref,"));
        assert!(ref_row.ends_with(",,"));
    }
}

//! Sweep the device variation level and measure the decode error rate of
//! random matrix-vector products against exact integer arithmetic.
//!
//! Run with: cargo run --release -p radix-xbar --example noise_sweep

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use radix_xbar::{
    decode_output, program_crossbar, simulate_mvm, CircuitParams, DeviceModel, QuantizedTensor,
    RadixConfig,
};

fn main() {
    let cfg = RadixConfig::radix5();
    let trials = 500;
    println!("sigma_g  decode_error_rate");
    for sigma in [0.0, 0.02, 0.05, 0.1, 0.2, 0.4] {
        let params = CircuitParams {
            dev: DeviceModel {
                sigma_g: sigma,
                ..DeviceModel::default()
            },
            ..CircuitParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let mut wrong = 0usize;
        let mut total = 0usize;
        for trial in 0..trials {
            let n = rng.gen_range(4..=32);
            let m = rng.gen_range(1..=8);
            let w: Vec<i32> = (0..n * m).map(|_| rng.gen_range(-2..=2)).collect();
            let x: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
            let mut expected = vec![0i32; m];
            for j in 0..m {
                for i in 0..n {
                    expected[j] += w[i * m + j] * x[i];
                }
            }
            let wq = QuantizedTensor::new(w, vec![n, m], cfg.weight_bounds()).unwrap();
            let program = program_crossbar(&wq, &cfg).unwrap();
            let xq = QuantizedTensor::from_vec(x, cfg.activation_bounds()).unwrap();
            let readout = simulate_mvm(&program, &xq, &params, Some(trial as u64)).unwrap();
            let decoded = decode_output(&readout, &params);
            wrong += decoded
                .iter()
                .zip(&expected)
                .filter(|(a, b)| a != b)
                .count();
            total += m;
        }
        println!("{sigma:>7}  {:.4}", wrong as f64 / total as f64);
    }
}

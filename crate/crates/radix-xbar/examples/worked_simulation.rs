//! The worked single-neuron example: weights [1, 0, 2] programmed beside
//! the reference column, three input pulses read out through the analog
//! chain. With R_m = 100 kOhm, R_fb = 10 Ohm and S = 10 the three column
//! voltages are 40 uV, 20 uV and 70 uV, decoding to 4, 2 and 7.
//!
//! Run with: cargo run -p radix-xbar --example worked_simulation

use radix_xbar::{
    decode_output, program_crossbar, readout_to_csv, simulate_mvm, CircuitParams,
    QuantizedTensor, RadixConfig,
};

fn main() {
    let cfg = RadixConfig::radix5();
    let params = CircuitParams::default();

    let w_q = QuantizedTensor::new(vec![1, 0, 2], vec![3, 1], cfg.weight_bounds()).unwrap();
    println!("weights: {:?}", w_q.values());
    let program = program_crossbar(&w_q, &cfg).unwrap();
    println!("{}", program.to_text());

    let pulses = [[2, 3, 1], [2, 1, 0], [3, 2, 2]];
    for (i, pulse) in pulses.iter().enumerate() {
        let x = QuantizedTensor::from_vec(pulse.to_vec(), cfg.activation_bounds()).unwrap();
        let readout = simulate_mvm(&program, &x, &params, None).unwrap();
        let decoded = decode_output(&readout, &params);
        println!("pulse {i}: inputs {pulse:?}");
        print!("{}", readout_to_csv(&readout, &decoded));
        println!(
            "  v_col = {:.1} uV, decoded y = {}\n",
            readout.v_col[0] * 1e6,
            decoded[0]
        );
    }
}

//! Why the reference column exists: two small networks with identical
//! outputs {0, 5, 4} produce different raw column currents once their
//! signed weights are level-shifted onto positive conductances. Subtracting
//! the zero-weight reference current restores the 1:1 correspondence.
//!
//! Run with: cargo run -p radix-xbar --example reference_column

use radix_xbar::{
    decode_output, program_crossbar, simulate_mvm, CircuitParams, QuantizedTensor, RadixConfig,
};

fn run_network(name: &str, weights: Vec<i32>, inputs: Vec<i32>) {
    let cfg = RadixConfig::radix5();
    let params = CircuitParams::default();
    let w = QuantizedTensor::new(weights, vec![3, 3], cfg.weight_bounds()).unwrap();
    let program = program_crossbar(&w, &cfg).unwrap();
    let x = QuantizedTensor::from_vec(inputs.clone(), cfg.activation_bounds()).unwrap();
    let readout = simulate_mvm(&program, &x, &params, None).unwrap();
    let decoded = decode_output(&readout, &params);

    println!("{name}: inputs {inputs:?}");
    let ua: Vec<String> = readout
        .i_tot
        .iter()
        .map(|i| format!("{:.0}", i * 1e6))
        .collect();
    println!("  raw column currents: {{{}}} uA", ua.join(", "));
    println!("  reference current:   {:.0} uA", readout.i_ref * 1e6);
    let shifted: Vec<String> = readout
        .i_tot
        .iter()
        .map(|i| format!("{:.0}", (i - readout.i_ref) * 1e6))
        .collect();
    println!("  after subtraction:   {{{}}} uA", shifted.join(", "));
    println!("  decoded outputs:     {decoded:?}\n");
}

fn main() {
    // Weight matrices are row-major n x m: three inputs, three neurons.
    run_network(
        "network A",
        vec![
            2, 1, 0, //
            -1, 1, 1, //
            -1, 0, 1,
        ],
        vec![2, 3, 1],
    );
    run_network(
        "network B",
        vec![
            2, 1, 0, //
            1, 2, 0, //
            -1, 0, 1,
        ],
        vec![1, 2, 4],
    );
}

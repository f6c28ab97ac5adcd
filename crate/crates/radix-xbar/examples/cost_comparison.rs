//! Column and device accounting: the single-reference-column scheme
//! against differential-pair baselines, swept over array widths.
//!
//! Run with: cargo run -p radix-xbar --example cost_comparison

use radix_xbar::{cost, CostComparison, Precision, Scheme};

fn main() {
    println!("radix-5, one logical column, 3 rows:\n");
    let cmp = CostComparison::closest_binary(3, 1, 5).unwrap();
    print!("{}", cmp.to_table());

    println!("\ncolumn ratio against a single differential pair as width grows:");
    println!("{:>8} {:>8} {:>8} {:>8}", "m", "radix", "pair", "ratio");
    for m in [1u64, 2, 4, 16, 64, 256] {
        let radix = cost(Scheme::RadixReference, 16, m, Precision::Radix(5)).unwrap();
        let pair = cost(Scheme::DifferentialPair, 16, m, Precision::Bits(1)).unwrap();
        println!(
            "{:>8} {:>8} {:>8} {:>8.4}",
            m,
            radix.columns,
            pair.columns,
            radix.columns as f64 / pair.columns as f64
        );
    }
    println!("\nCSV form:\n{}", cmp.to_csv());
}

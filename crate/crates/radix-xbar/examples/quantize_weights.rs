//! Quantize a random weight tensor at several radices and show the level
//! histograms, including the difference between the equal-width bins and
//! the truncate-toward-zero variant.
//!
//! Run with: cargo run -p radix-xbar --example quantize_weights

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use radix_xbar::{
    level_histogram, quantize_weights_mode, RadixConfig, RealTensor, WeightQuantMode,
};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let values: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let tensor = RealTensor::from_vec(values).unwrap();

    for x in [3u32, 5, 7] {
        let cfg = RadixConfig::new(x).unwrap();
        println!("radix-{x} (weights {}..={})", cfg.w_min_q(), cfg.w_max_q());
        for mode in [WeightQuantMode::EqualWidth, WeightQuantMode::TruncateToZero] {
            let q = quantize_weights_mode(&tensor, &cfg, mode).unwrap();
            print!("  {:<5}", mode.token());
            for (level, count) in level_histogram(&q) {
                print!("  {level:>2}: {count:>5}");
            }
            println!();
        }
    }
}

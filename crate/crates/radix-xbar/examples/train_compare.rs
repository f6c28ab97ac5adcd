//! Train the small network in all three modes on the synthetic digit set
//! and print the per-epoch validation accuracies side by side.
//!
//! Run with: cargo run --release -p radix-xbar --example train_compare

use radix_xbar::dataset::synth_digits;
use radix_xbar::trainer::{train, Dataset, TinyNet, TrainOptions};
use radix_xbar::RadixConfig;

fn main() {
    let (images, labels) = synth_digits(1250, 8, 2024);
    let data = Dataset::from_images(&images, &labels).unwrap();
    let (train_set, val_set) = data.split_at(1000);
    let epochs = 20;
    let seed = 0;

    let nets = [
        TinyNet::real(8),
        TinyNet::bnn(8),
        TinyNet::radix(8, RadixConfig::radix5()),
    ];
    let mut traces = Vec::new();
    for net in &nets {
        let t0 = std::time::Instant::now();
        let run = train(net, &train_set, &val_set, epochs, seed, TrainOptions::default()).unwrap();
        println!(
            "{:>5}: final train_acc {:.3} val_acc {:.3} ({:.1?})",
            net.mode_token(),
            run.trace.last().unwrap().train_acc,
            run.trace.last().unwrap().val_acc,
            t0.elapsed()
        );
        traces.push(run.trace);
    }

    println!("\nepoch   real    bnn  radix");
    for ((real, bnn), radix) in traces[0].iter().zip(&traces[1]).zip(&traces[2]) {
        println!(
            "{:>5}  {:.3}  {:.3}  {:.3}",
            real.epoch, real.val_acc, bnn.val_acc, radix.val_acc
        );
    }

    let real = traces[0].last().unwrap().val_acc;
    let bnn = traces[1].last().unwrap().val_acc;
    let radix = traces[2].last().unwrap().val_acc;
    println!("\nreal - radix gap: {:.1} points", (real - radix) * 100.0);
    println!("radix - bnn gap:  {:.1} points", (radix - bnn) * 100.0);
}

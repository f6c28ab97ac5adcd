//! Generate the synthetic digit datasets as IDX file pairs, plus the
//! edge-detection kernel as an RXT file, ready for the `radix-xbar
//! convolve` and `radix-xbar train` commands.
//!
//! Run with: cargo run --release -p radix-xbar --example make_dataset [outdir]

use radix_xbar::dataset::{synth_digits, write_idx_pair};
use radix_xbar::io::rxt;
use radix_xbar::sobel_kernel;

fn main() {
    let outdir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/dataset".to_string());
    let outdir = std::path::Path::new(&outdir);
    std::fs::create_dir_all(outdir).unwrap();

    // 28x28 set for convolution experiments.
    let (images, labels) = synth_digits(200, 28, 77);
    write_idx_pair(
        outdir.join("digits28-images.idx"),
        outdir.join("digits28-labels.idx"),
        &images,
        &labels,
    )
    .unwrap();

    // 8x8 set for the training comparison.
    let (images, labels) = synth_digits(1250, 8, 2024);
    write_idx_pair(
        outdir.join("digits8-images.idx"),
        outdir.join("digits8-labels.idx"),
        &images,
        &labels,
    )
    .unwrap();

    let kernel = sobel_kernel();
    rxt::write_i32_file(outdir.join("sobel.rxt"), kernel.values(), kernel.shape()).unwrap();

    println!(
        "wrote digits28-*.idx (200 images), digits8-*.idx (1250 images) and sobel.rxt under {}",
        outdir.display()
    );
}

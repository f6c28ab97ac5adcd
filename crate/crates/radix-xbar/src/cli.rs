//! File-based command-line front end.
//!
//! Five subcommands tie the library into scriptable experiments:
//! `quantize`, `simulate`, `convolve`, `train` and `report`. Every command
//! is deterministic given its flags and seed. Exit codes: 0 on success,
//! 1 for I/O and file-parse failures, 2 for domain errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analog::{decode_output, readout_to_csv, simulate_mvm, CircuitParams};
use crate::conv::{convolve_crossbar, integer_convolve, pixels_to_activations, ArrayLimits};
use crate::cost::{cost, CostComparison, Precision, Scheme};
use crate::crossbar::{program_crossbar, DeviceModel};
use crate::error::{Error, Result};
use crate::io::{idx, pgm, rxt};
use crate::quantizer::{level_histogram, quantize_weights_mode, RadixConfig, WeightQuantMode};
use crate::tensor::QuantizedTensor;
use crate::trainer::{self, Dataset, TinyNet, TrainOptions};

#[derive(Parser)]
#[command(name = "radix-xbar", version, about = "Radix-X memristor crossbar simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize a real-valued RXT tensor onto the radix weight alphabet.
    Quantize {
        /// Input RXT file (f64).
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        radix: u32,
        /// Output RXT file (i32).
        #[arg(long)]
        out: PathBuf,
        /// Bin mode: eq7 (equal-width) or alg1 (truncate toward zero).
        #[arg(long, default_value = "eq7")]
        mode: String,
    },
    /// Read quantized weights and input pulses through the analog path.
    Simulate {
        /// Quantized weight matrix, RXT i32, n x m.
        #[arg(long)]
        weights: PathBuf,
        /// Input pulses, RXT i32: one vector of length n, or p x n.
        #[arg(long)]
        inputs: PathBuf,
        /// Memristor resistance in ohms.
        #[arg(long, default_value_t = 100e3)]
        rm: f64,
        /// Feedback resistance in ohms.
        #[arg(long, default_value_t = 10.0)]
        rfb: f64,
        /// Input voltage scaling factor.
        #[arg(long, default_value_t = 10.0)]
        s: f64,
        /// Relative device variation.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        radix: u32,
    },
    /// Convolve IDX images with a quantized kernel on the prototype array.
    Convolve {
        /// IDX image file.
        #[arg(long)]
        idx: PathBuf,
        /// Kernel, RXT i32.
        #[arg(long)]
        kernel: PathBuf,
        /// Number of images to process.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        radix: u32,
    },
    /// Train the small network in one of the three modes.
    Train {
        /// IDX image and label files.
        #[arg(long, num_args = 2, value_names = ["IMAGES", "LABELS"])]
        dataset: Vec<PathBuf>,
        /// real, bnn or radix.
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 5)]
        radix: u32,
        #[arg(long)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Checkpoint path; the accuracy trace goes to `<out>.trace.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Column/device cost comparison against the binary baseline.
    Report {
        #[arg(long)]
        rows: u64,
        #[arg(long)]
        cols: u64,
        #[arg(long, default_value_t = 5)]
        radix: u32,
        /// Bit width of the binary-encoded baseline; defaults to the
        /// closest power of two below the radix.
        #[arg(long)]
        bits: Option<u32>,
    },
}

/// Parse arguments from the process environment and run.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Entry point split out for tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Quantize {
            input,
            radix,
            out,
            mode,
        } => cmd_quantize(&input, radix, &out, &mode),
        Command::Simulate {
            weights,
            inputs,
            rm,
            rfb,
            s,
            sigma,
            seed,
            radix,
        } => cmd_simulate(&weights, &inputs, rm, rfb, s, sigma, seed, radix),
        Command::Convolve {
            idx,
            kernel,
            count,
            outdir,
            sigma,
            seed,
            radix,
        } => cmd_convolve(&idx, &kernel, count, &outdir, sigma, seed, radix),
        Command::Train {
            dataset,
            mode,
            radix,
            epochs,
            seed,
            out,
        } => cmd_train(&dataset, &mode, radix, epochs, seed, &out),
        Command::Report {
            rows,
            cols,
            radix,
            bits,
        } => cmd_report(rows, cols, radix, bits),
    }
}

fn load_quantized(path: &std::path::Path, bounds: (i32, i32)) -> Result<QuantizedTensor> {
    match rxt::read_file(path)? {
        rxt::RxtData::I32 { values, shape } => QuantizedTensor::new(values, shape, bounds),
        rxt::RxtData::F64(_) => Err(Error::Format(format!(
            "{} holds f64 data, expected i32",
            path.display()
        ))),
    }
}

fn cmd_quantize(input: &std::path::Path, radix: u32, out: &std::path::Path, mode: &str) -> Result<()> {
    let cfg = RadixConfig::new(radix)?;
    let mode = WeightQuantMode::from_token(mode)
        .ok_or_else(|| Error::Format(format!("unknown mode '{mode}', expected eq7 or alg1")))?;
    let tensor = match rxt::read_file(input)? {
        rxt::RxtData::F64(t) => t,
        rxt::RxtData::I32 { .. } => {
            return Err(Error::Format(format!(
                "{} holds i32 data, expected f64",
                input.display()
            )))
        }
    };
    let q = quantize_weights_mode(&tensor, &cfg, mode)?;
    rxt::write_i32_file(out, q.values(), q.shape())?;
    println!("quantized {} values to radix-{radix} ({})", q.len(), mode.token());
    for (level, count) in level_histogram(&q) {
        println!("level {level:>3}: {count}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    weights: &std::path::Path,
    inputs: &std::path::Path,
    rm: f64,
    rfb: f64,
    s: f64,
    sigma: f64,
    seed: u64,
    radix: u32,
) -> Result<()> {
    let cfg = RadixConfig::new(radix)?;
    let w = load_quantized(weights, cfg.weight_bounds())?;
    if w.shape().len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "weights must be 2-D, got {:?}",
            w.shape()
        )));
    }
    let n = w.shape()[0];
    let x = load_quantized(inputs, cfg.activation_bounds())?;
    let pulses: Vec<Vec<i32>> = match x.shape().len() {
        1 => vec![x.values().to_vec()],
        2 => x
            .values()
            .chunks(x.shape()[1])
            .map(|c| c.to_vec())
            .collect(),
        other => {
            return Err(Error::ShapeMismatch(format!(
                "inputs must be 1-D or 2-D, got rank {other}"
            )))
        }
    };

    let params = CircuitParams {
        dev: DeviceModel {
            r_m: rm,
            sigma_g: sigma,
            ..DeviceModel::default()
        },
        r_fb: rfb,
        s,
    };
    params.validate(&cfg)?;
    let program = program_crossbar(&w, &cfg)?;

    for (p, pulse) in pulses.iter().enumerate() {
        if pulse.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: pulse.len(),
            });
        }
        let xq = QuantizedTensor::from_vec(pulse.clone(), cfg.activation_bounds())?;
        let readout = simulate_mvm(&program, &xq, &params, Some(seed))?;
        let decoded = decode_output(&readout, &params);
        println!("# pulse {p}");
        print!("{}", readout_to_csv(&readout, &decoded));
    }
    Ok(())
}

fn cmd_convolve(
    idx_path: &std::path::Path,
    kernel: &std::path::Path,
    count: usize,
    outdir: &std::path::Path,
    sigma: f64,
    seed: u64,
    radix: u32,
) -> Result<()> {
    let cfg = RadixConfig::new(radix)?;
    let kq = load_quantized(kernel, cfg.weight_bounds())?;
    let images = idx::read_images_file(idx_path)?;
    let take = count.min(images.len());
    if take == 0 {
        return Err(Error::EmptyDataset);
    }
    std::fs::create_dir_all(outdir)?;

    let params = CircuitParams {
        dev: DeviceModel {
            sigma_g: sigma,
            ..DeviceModel::prototype()
        },
        ..CircuitParams::prototype()
    };
    let limits = ArrayLimits::prototype_4x4();

    let mut summary = String::from("image,max_itot_A,cycles,exact_match\n");
    let mut peak = 0.0f64;
    let mut exact = 0usize;
    for (i, img) in images.iter().take(take).enumerate() {
        let out = convolve_crossbar(img, &kq, &params, limits, Some(seed))?;
        let levels = pixels_to_activations(img, &cfg)?;
        let (oracle, _, _) = integer_convolve(&levels, &kq)?;
        let matches = out.values == oracle;
        if matches {
            exact += 1;
        }
        peak = peak.max(out.currents.peak_column_a);
        summary.push_str(&format!(
            "{i},{:e},{},{}\n",
            out.currents.peak_column_a, out.plan.cycles, matches
        ));
        let name = outdir.join(format!("img_{i:04}.pgm"));
        pgm::write_scaled_pgm(&name, &out.values, out.out_h, out.out_w)?;
    }
    std::fs::write(outdir.join("summary.csv"), &summary)?;
    println!("processed {take} images, {exact} exact matches");
    println!("peak |i_tot| = {peak:e} A (bench critical value 4e-6 A)");
    Ok(())
}

fn cmd_train(
    dataset: &[PathBuf],
    mode: &str,
    radix: u32,
    epochs: usize,
    seed: u64,
    out: &std::path::Path,
) -> Result<()> {
    if dataset.len() != 2 {
        return Err(Error::Format("--dataset wants IMAGES and LABELS paths".into()));
    }
    let images = idx::read_images_file(&dataset[0])?;
    let labels = idx::read_labels_file(&dataset[1])?;
    let data = Dataset::from_images(&images, &labels)?;
    let side = images[0].h();
    if images[0].w() != side {
        return Err(Error::ShapeMismatch("training images must be square".into()));
    }
    let net = match mode {
        "real" => TinyNet::real(side),
        "bnn" => TinyNet::bnn(side),
        "radix" => TinyNet::radix(side, RadixConfig::new(radix)?),
        other => {
            return Err(Error::Format(format!(
                "unknown mode '{other}', expected real, bnn or radix"
            )))
        }
    };
    // 80/20 train/validation split.
    let n_train = (data.n * 4) / 5;
    let (train_set, val_set) = data.split_at(n_train.max(1));
    let run = trainer::train(&net, &train_set, &val_set, epochs, seed, TrainOptions::default())?;
    trainer::save_checkpoint(out, &run.state)?;
    let trace_path = {
        let mut os = out.as_os_str().to_owned();
        os.push(".trace.csv");
        PathBuf::from(os)
    };
    std::fs::write(&trace_path, trainer::trace_to_csv(net.mode_token(), &run.trace))?;
    let last = run.trace.last().unwrap();
    println!(
        "mode {} epochs {} train_acc {} val_acc {}",
        net.mode_token(),
        epochs,
        last.train_acc,
        last.val_acc
    );
    Ok(())
}

fn cmd_report(rows: u64, cols: u64, radix: u32, bits: Option<u32>) -> Result<()> {
    let cmp = match bits {
        Some(b) => CostComparison {
            radix: cost(Scheme::RadixReference, rows, cols, Precision::Radix(radix))?,
            baseline: cost(Scheme::BinaryEncodedDifferential, rows, cols, Precision::Bits(b))?,
        },
        None => CostComparison::closest_binary(rows, cols, radix)?,
    };
    print!("{}", cmp.to_table());
    print!("{}", cmp.to_csv());
    Ok(())
}

//! 2-D convolution on the crossbar: im2col lowering, kernel-column
//! programming, read-cycle accounting and peak-current reporting.
//!
//! A kernel runs down one signal column (one row per tap) next to the
//! reference column. Arrays smaller than the kernel split it into segments
//! of whole kernel rows; each segment is a separate read cycle whose decoded
//! partial sums accumulate digitally. Patches are batched across the
//! available columns for cycle accounting, time-multiplexed over one
//! physical array: device perturbations are shared by all patches, while
//! each segment occupies its own physical column and draws an independent
//! perturbation stream.
//!
//! Convolution is cross-correlation (no kernel flip), stride 1, no padding.

use crate::analog::{decode_output, output_stage, CircuitParams};
use crate::crossbar::{program_crossbar, CrossbarProgram};
use crate::error::{Error, Result};
use crate::quantizer::RadixConfig;
use crate::tensor::QuantizedTensor;

/// Grayscale image with 8-bit pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageU8 {
    pixels: Vec<u8>,
    h: usize,
    w: usize,
}

impl ImageU8 {
    pub fn new(pixels: Vec<u8>, h: usize, w: usize) -> Result<Self> {
        if h == 0 || w == 0 {
            return Err(Error::ShapeMismatch(format!("degenerate image {h}x{w}")));
        }
        if pixels.len() != h * w {
            return Err(Error::ShapeMismatch(format!(
                "{} pixels for a {h}x{w} image",
                pixels.len()
            )));
        }
        Ok(Self { pixels, h, w })
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.w + col]
    }
}

/// Patch matrix produced by [`im2col`]: one row per output position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchMatrix {
    data: Vec<u8>,
    pub n_patches: usize,
    pub patch_len: usize,
    pub out_h: usize,
    pub out_w: usize,
}

impl PatchMatrix {
    pub fn patch(&self, p: usize) -> &[u8] {
        &self.data[p * self.patch_len..(p + 1) * self.patch_len]
    }
}

/// Lower an image into its patch matrix for a `kh x kw` kernel with
/// stride 1 and no padding. Row `p` holds the flattened patch for output
/// position `p`, row-major over output positions.
pub fn im2col(img: &ImageU8, kh: usize, kw: usize) -> Result<PatchMatrix> {
    if kh == 0 || kw == 0 || kh > img.h() || kw > img.w() {
        return Err(Error::KernelTooLarge {
            kh,
            kw,
            h: img.h(),
            w: img.w(),
        });
    }
    let out_h = img.h() - kh + 1;
    let out_w = img.w() - kw + 1;
    let patch_len = kh * kw;
    let mut data = Vec::with_capacity(out_h * out_w * patch_len);
    for oy in 0..out_h {
        for ox in 0..out_w {
            for ky in 0..kh {
                for kx in 0..kw {
                    data.push(img.at(oy + ky, ox + kx));
                }
            }
        }
    }
    Ok(PatchMatrix {
        data,
        n_patches: out_h * out_w,
        patch_len,
        out_h,
        out_w,
    })
}

fn pixel_level(p: u8, a_max: i32) -> i32 {
    ((p as f64) * a_max as f64 / 255.0).round() as i32
}

/// Linearly map pixels onto the activation alphabet:
/// `level = round(p * a_max / 255)`, so a white pixel reaches `a_max`.
pub fn pixels_to_activations(img: &ImageU8, cfg: &RadixConfig) -> Result<QuantizedTensor> {
    let a_max = cfg.a_max();
    let values: Vec<i32> = img.pixels().iter().map(|&p| pixel_level(p, a_max)).collect();
    QuantizedTensor::new(values, vec![img.h(), img.w()], cfg.activation_bounds())
}

/// Physical array size available for tiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayLimits {
    /// Row wires available per read.
    pub rows: usize,
    /// Signal columns available for pipelining output pixels.
    pub columns: usize,
}

impl ArrayLimits {
    /// Array large enough to take any kernel in one tile, one patch per
    /// cycle per column without limit.
    pub fn unbounded() -> Self {
        Self {
            rows: usize::MAX,
            columns: usize::MAX,
        }
    }

    /// The small fabricated test array: 4 rows by 4 columns.
    pub fn prototype_4x4() -> Self {
        Self { rows: 4, columns: 4 }
    }
}

/// How a kernel is mapped onto the array and how many reads it costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvPlan {
    pub kernel_q: QuantizedTensor,
    pub limits: ArrayLimits,
    /// Kernel rows grouped per segment; each group is one read cycle.
    pub kernel_rows_per_segment: usize,
    /// Read cycles per output pixel.
    pub segments: usize,
    /// Total read cycles for the image: `ceil(n_patches / columns)` patch
    /// batches times `segments`.
    pub cycles: u64,
    pub out_h: usize,
    pub out_w: usize,
}

/// Peak currents observed while running an image, for comparison against
/// bench measurements.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentReport {
    /// Largest |i_tot| over all signal-column reads, amperes.
    pub peak_column_a: f64,
    /// Largest reference-column current, amperes.
    pub peak_reference_a: f64,
    /// Largest per-junction current, amperes.
    pub peak_cell_a: f64,
}

/// Decoded convolution output plus its plan and current report.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvOutput {
    pub values: Vec<i32>,
    pub out_h: usize,
    pub out_w: usize,
    pub plan: ConvPlan,
    pub currents: CurrentReport,
}

/// Cycle count for `n_patches` output pixels under the given limits.
pub fn read_cycles(n_patches: usize, segments: usize, columns: usize) -> u64 {
    let batches = (n_patches as u64).div_ceil(columns.max(1) as u64);
    batches * segments as u64
}

/// Run an image through the crossbar path: program the kernel, read every
/// patch segment by segment, decode, and accumulate partial sums.
///
/// Output equals the exact integer cross-correlation under ideal devices.
pub fn convolve_crossbar(
    img: &ImageU8,
    kernel_q: &QuantizedTensor,
    params: &CircuitParams,
    limits: ArrayLimits,
    noise_seed: Option<u64>,
) -> Result<ConvOutput> {
    if kernel_q.shape().len() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "kernel must be 2-D, got {:?}",
            kernel_q.shape()
        )));
    }
    let (kh, kw) = (kernel_q.shape()[0], kernel_q.shape()[1]);
    let cfg = radix_from_weight_bounds(kernel_q)?;
    params.validate(&cfg)?;
    if limits.rows < kw {
        return Err(Error::Format(format!(
            "array has {} rows, narrower than one kernel row of {kw} taps",
            limits.rows
        )));
    }

    let patches = im2col(img, kh, kw)?;
    let rows_per_segment = (limits.rows / kw).min(kh).max(1);
    let segments: Vec<CrossbarProgram> = (0..kh)
        .step_by(rows_per_segment)
        .map(|k0| {
            let k1 = (k0 + rows_per_segment).min(kh);
            let taps: Vec<i32> = (k0..k1)
                .flat_map(|ky| (0..kw).map(move |kx| kernel_q.at2(ky, kx)))
                .collect();
            let len = taps.len();
            let w = QuantizedTensor::new(taps, vec![len, 1], cfg.weight_bounds())?;
            program_crossbar(&w, &cfg)
        })
        .collect::<Result<_>>()?;

    let plan = ConvPlan {
        kernel_q: kernel_q.clone(),
        limits,
        kernel_rows_per_segment: rows_per_segment,
        segments: segments.len(),
        cycles: read_cycles(patches.n_patches, segments.len(), limits.columns),
        out_h: patches.out_h,
        out_w: patches.out_w,
    };

    let a_max = cfg.a_max();
    let mut currents = CurrentReport::default();
    let mut values = Vec::with_capacity(patches.n_patches);
    for p in 0..patches.n_patches {
        let patch = patches.patch(p);
        let mut acc: i32 = 0;
        let mut tap0 = 0usize;
        for (si, prog) in segments.iter().enumerate() {
            let seg_seed = noise_seed.map(|s| s.wrapping_add(si as u64));
            let len = prog.n();
            let levels: Vec<i32> = patch[tap0..tap0 + len]
                .iter()
                .map(|&px| pixel_level(px, a_max))
                .collect();
            let x = QuantizedTensor::from_vec(levels, cfg.activation_bounds())?;
            let v = crate::analog::encode_inputs(&x, params)?;
            track_peak_cells(prog, &v, params, seg_seed, &mut currents);
            let cc = crate::analog::column_currents(prog, &v, params, seg_seed)?;
            currents.peak_column_a = currents.peak_column_a.max(cc.i_tot[0].abs());
            currents.peak_reference_a = currents.peak_reference_a.max(cc.i_ref.abs());
            let readout = output_stage(cc, params);
            acc += decode_output(&readout, params)[0];
            tap0 += len;
        }
        values.push(acc);
    }

    Ok(ConvOutput {
        values,
        out_h: patches.out_h,
        out_w: patches.out_w,
        plan,
        currents,
    })
}

fn track_peak_cells(
    prog: &CrossbarProgram,
    v: &[f64],
    params: &CircuitParams,
    noise_seed: Option<u64>,
    report: &mut CurrentReport,
) {
    use crate::crossbar::{cell_conductance, NoiseSite};
    let site = |column: u32, row: usize| {
        noise_seed.map(|seed| NoiseSite {
            seed,
            column,
            row: row as u32,
        })
    };
    for (i, &voltage) in v.iter().enumerate() {
        let g = cell_conductance(prog.cell(i, 0), prog.cfg(), &params.dev, site(0, i));
        report.peak_cell_a = report.peak_cell_a.max((g * voltage).abs());
        let g_ref = cell_conductance(
            prog.reference_cell(i),
            prog.cfg(),
            &params.dev,
            site(prog.reference_column_index(), i),
        );
        report.peak_cell_a = report.peak_cell_a.max((g_ref * voltage).abs());
    }
}

/// Exact integer cross-correlation of the quantized image levels with the
/// kernel; the reference the analog path is verified against.
pub fn integer_convolve(
    levels: &QuantizedTensor,
    kernel_q: &QuantizedTensor,
) -> Result<(Vec<i32>, usize, usize)> {
    if levels.shape().len() != 2 || kernel_q.shape().len() != 2 {
        return Err(Error::ShapeMismatch("integer_convolve wants 2-D inputs".into()));
    }
    let (h, w) = (levels.shape()[0], levels.shape()[1]);
    let (kh, kw) = (kernel_q.shape()[0], kernel_q.shape()[1]);
    if kh > h || kw > w {
        return Err(Error::KernelTooLarge { kh, kw, h, w });
    }
    let out_h = h - kh + 1;
    let out_w = w - kw + 1;
    let mut out = Vec::with_capacity(out_h * out_w);
    for oy in 0..out_h {
        for ox in 0..out_w {
            let mut acc = 0i32;
            for ky in 0..kh {
                for kx in 0..kw {
                    acc += kernel_q.at2(ky, kx) * levels.at2(oy + ky, ox + kx);
                }
            }
            out.push(acc);
        }
    }
    Ok((out, out_h, out_w))
}

/// The 3x3 vertical-edge kernel used by the bench experiment, already in
/// the radix-5 weight alphabet.
pub fn sobel_kernel() -> QuantizedTensor {
    QuantizedTensor::new(
        vec![1, 2, 1, 0, 0, 0, -1, -2, -1],
        vec![3, 3],
        RadixConfig::radix5().weight_bounds(),
    )
    .unwrap()
}

fn radix_from_weight_bounds(kernel_q: &QuantizedTensor) -> Result<RadixConfig> {
    let (lo, hi) = kernel_q.bounds();
    if lo != -hi || hi < 1 {
        return Err(Error::ShapeMismatch(format!(
            "kernel bounds ({lo}, {hi}) are not a symmetric weight alphabet"
        )));
    }
    RadixConfig::new((2 * hi + 1) as u32)
}

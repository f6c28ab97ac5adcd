//! Circuit-level simulator for radix-X parallel-connected memristor
//! crossbar CNN accelerators.
//!
//! The pipeline: pre-trained real-valued weights are quantized onto a
//! signed integer alphabet of odd radix `x` ([`quantizer`]), programmed
//! onto a crossbar as parallel-device counts with a single zero-weight
//! reference column for signed weights ([`crossbar`]), and read out
//! through inverting amplifiers and a reference subtractor whose column
//! voltages decode back to exact integer matrix-vector products
//! ([`analog`]). On top of that sit an im2col convolution path with
//! read-cycle and peak-current accounting ([`conv`]), a
//! quantization-aware training loop with straight-through gradients and
//! ADAM updates ([`trainer`]), and a column/device cost model comparing
//! the reference-column scheme against differential-pair arrays
//! ([`cost`]).
//!
//! Every analog result is checkable against exact integer arithmetic;
//! with zero device variation the two agree bit-for-bit after decode.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `radix-xbar` binary for the file-based command-line front end.

pub mod analog;
pub mod cli;
pub mod conv;
pub mod cost;
pub mod crossbar;
pub mod dataset;
pub mod error;
pub mod io;
pub mod quantizer;
pub mod tensor;
pub mod trainer;

pub use analog::{
    column_currents, decode_output, encode_inputs, output_stage, readout_to_csv, simulate_mvm,
    AnalogReadout, CircuitParams, ColumnCurrents,
};
pub use conv::{
    convolve_crossbar, im2col, integer_convolve, pixels_to_activations, sobel_kernel, ArrayLimits,
    ConvOutput, ConvPlan, CurrentReport, ImageU8,
};
pub use cost::{cost, cost_of_program, ArrayCostReport, CostComparison, Precision, Scheme};
pub use crossbar::{
    cell_conductance, count_to_weight, program_crossbar, weight_to_count, CrossbarProgram,
    CrosspointCell, DeviceModel, NoiseSite,
};
pub use error::{Error, Result};
pub use quantizer::{
    binarize, level_histogram, quantize_weights, quantize_weights_mode, radix_relu, RadixConfig,
    WeightQuantMode,
};
pub use tensor::{QuantizedTensor, RealTensor};

//! Radix-X weight and activation quantization.
//!
//! Pre-trained real-valued weights are mapped onto the signed integer
//! alphabet `{-(x-1)/2, ..., +(x-1)/2}` and activations onto `{0, ..., x-1}`,
//! where the radix `x` is an odd integer >= 3. A sign-based binarizer is
//! included as the low-precision comparison baseline.

use crate::error::{Error, Result};
use crate::tensor::{QuantizedTensor, RealTensor};

/// The radix and the integer alphabets it induces.
///
/// Weights live in the symmetric alphabet `[w_min_q, w_max_q]` with
/// `w_max_q - w_min_q + 1 = x`; activations live in `[0, a_max]` with
/// `a_max = x - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadixConfig {
    x: u32,
}

impl RadixConfig {
    /// Odd `x >= 3` only: the signed alphabet must be symmetric around
    /// zero and contain zero, which fails for even radices.
    pub fn new(x: u32) -> Result<Self> {
        if x < 3 || x.is_multiple_of(2) {
            return Err(Error::InvalidRadix(x));
        }
        Ok(Self { x })
    }

    /// Radix-5: the concrete instance used by the worked examples.
    pub fn radix5() -> Self {
        Self { x: 5 }
    }

    pub fn x(&self) -> u32 {
        self.x
    }

    /// Most negative weight level, `-(x-1)/2`.
    pub fn w_min_q(&self) -> i32 {
        -((self.x as i32 - 1) / 2)
    }

    /// Most positive weight level, `+(x-1)/2`.
    pub fn w_max_q(&self) -> i32 {
        (self.x as i32 - 1) / 2
    }

    /// Largest activation level, `x - 1`.
    pub fn a_max(&self) -> i32 {
        self.x as i32 - 1
    }

    pub fn weight_bounds(&self) -> (i32, i32) {
        (self.w_min_q(), self.w_max_q())
    }

    pub fn activation_bounds(&self) -> (i32, i32) {
        (0, self.a_max())
    }
}

/// Which mapping converts normalized weights to integer levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightQuantMode {
    /// `x` equal-width bins over `[w_min, w_max]`. This is the canonical
    /// mapping; it keeps every level the same width.
    #[default]
    EqualWidth,
    /// Normalize into `[-x/2, +x/2]` and truncate toward zero. Kept for
    /// comparison: its zero bin is twice as wide as the others.
    TruncateToZero,
}

impl WeightQuantMode {
    /// Parse the CLI token for this mode.
    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "eq7" => Some(WeightQuantMode::EqualWidth),
            "alg1" => Some(WeightQuantMode::TruncateToZero),
            _ => None,
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            WeightQuantMode::EqualWidth => "eq7",
            WeightQuantMode::TruncateToZero => "alg1",
        }
    }
}

/// Map real weights onto the signed radix alphabet with equal-width bins.
///
/// Each weight `w` goes to `k - (x-1)/2` where
/// `k = floor((w - w_min) * x / range)`, with `k` clamped to `x-1` so the
/// top edge `w = w_max` lands on the maximum level. The mapping depends
/// only on `(w - w_min) / range`, so it is invariant under positive affine
/// transforms of the input.
pub fn quantize_weights(weights: &RealTensor, cfg: &RadixConfig) -> Result<QuantizedTensor> {
    quantize_weights_mode(weights, cfg, WeightQuantMode::EqualWidth)
}

/// Same as [`quantize_weights`] but with an explicit bin mode.
pub fn quantize_weights_mode(
    weights: &RealTensor,
    cfg: &RadixConfig,
    mode: WeightQuantMode,
) -> Result<QuantizedTensor> {
    if weights.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (w_min, w_max) = weights.min_max()?;
    let range = w_max - w_min;
    if range == 0.0 {
        return Err(Error::ConstantTensor);
    }
    let x = cfg.x() as f64;
    let half = (cfg.x() as i32 - 1) / 2;
    let top = cfg.x() as i32 - 1;

    let values = weights
        .values()
        .iter()
        .map(|&w| match mode {
            WeightQuantMode::EqualWidth => {
                let k = ((w - w_min) * x / range).floor() as i32;
                k.min(top).max(0) - half
            }
            WeightQuantMode::TruncateToZero => {
                // Normalize into [-x/2, +x/2], then round toward zero.
                let normalized = (w - w_min) / range * x - x / 2.0;
                let q = normalized.trunc() as i32;
                q.clamp(-half, half)
            }
        })
        .collect();

    QuantizedTensor::new(values, weights.shape().to_vec(), cfg.weight_bounds())
}

/// Bounded integer ReLU over the activation alphabet.
///
/// Non-positive inputs map to 0; positive inputs are binned into `x - 1`
/// equal intervals over `(0, pre_act_max]`, producing levels `1..=a_max`
/// with the top edge clamped to `a_max`.
pub fn radix_relu(
    pre_activation: &RealTensor,
    pre_act_max: f64,
    cfg: &RadixConfig,
) -> Result<QuantizedTensor> {
    if !pre_act_max.is_finite() || pre_act_max <= 0.0 {
        return Err(Error::BadMax(pre_act_max));
    }
    let a_max = cfg.a_max();
    let values = pre_activation
        .values()
        .iter()
        .map(|&p| {
            if p <= 0.0 {
                0
            } else {
                let level = (p * a_max as f64 / pre_act_max).floor() as i32 + 1;
                level.min(a_max)
            }
        })
        .collect();
    QuantizedTensor::new(
        values,
        pre_activation.shape().to_vec(),
        cfg.activation_bounds(),
    )
}

/// Sign binarizer: `+1` for values `>= 0`, `-1` otherwise.
///
/// This is the single-bit baseline the radix alphabet is compared against.
pub fn binarize(t: &RealTensor) -> Result<QuantizedTensor> {
    let values = t
        .values()
        .iter()
        .map(|&v| if v >= 0.0 { 1 } else { -1 })
        .collect();
    QuantizedTensor::new(values, t.shape().to_vec(), (-1, 1))
}

/// Per-level histogram of a quantized tensor, indexed from `bounds.0`.
pub fn level_histogram(t: &QuantizedTensor) -> Vec<(i32, usize)> {
    let (lo, hi) = t.bounds();
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for &v in t.values() {
        counts[(v - lo) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as i32, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg5() -> RadixConfig {
        RadixConfig::radix5()
    }

    #[test]
    fn radix_must_be_odd_and_at_least_three() {
        assert!(RadixConfig::new(3).is_ok());
        assert!(RadixConfig::new(7).is_ok());
        assert!(matches!(RadixConfig::new(2), Err(Error::InvalidRadix(2))));
        assert!(matches!(RadixConfig::new(4), Err(Error::InvalidRadix(4))));
        assert!(matches!(RadixConfig::new(1), Err(Error::InvalidRadix(1))));
    }

    #[test]
    fn alphabet_bounds_follow_radix() {
        let cfg = RadixConfig::new(7).unwrap();
        assert_eq!(cfg.w_min_q(), -3);
        assert_eq!(cfg.w_max_q(), 3);
        assert_eq!(cfg.a_max(), 6);
        assert_eq!(cfg.w_max_q() - cfg.w_min_q() + 1, 7);
    }

    #[test]
    fn sobel_kernel_quantizes_to_itself() {
        // Kernel already spans [-2, 2] on integer values; every element
        // must land back on its own level.
        let sobel = vec![1.0, 2.0, 1.0, 0.0, 0.0, 0.0, -1.0, -2.0, -1.0];
        let t = RealTensor::new(sobel.clone(), vec![3, 3]).unwrap();
        let q = quantize_weights(&t, &cfg5()).unwrap();
        let expected: Vec<i32> = sobel.iter().map(|&v| v as i32).collect();
        assert_eq!(q.values(), expected.as_slice());
    }

    #[test]
    fn endpoints_map_to_alphabet_extremes() {
        let t = RealTensor::from_vec(vec![-1.0, 1.0]).unwrap();
        let q = quantize_weights(&t, &cfg5()).unwrap();
        assert_eq!(q.values(), &[-2, 2]);
    }

    #[test]
    fn uniform_inputs_fill_all_levels_evenly() {
        // Equal-width bins over a uniform distribution: each of the 5
        // levels should catch 20% +- 1% of 1e5 samples.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let t = RealTensor::from_vec(values).unwrap();
        let q = quantize_weights(&t, &cfg5()).unwrap();
        for (_, count) in level_histogram(&q) {
            let frac = count as f64 / n as f64;
            assert!((frac - 0.2).abs() < 0.01, "level fraction {frac}");
        }
    }

    #[test]
    fn constant_tensor_is_rejected() {
        let t = RealTensor::from_vec(vec![0.5; 10]).unwrap();
        assert!(matches!(
            quantize_weights(&t, &cfg5()),
            Err(Error::ConstantTensor)
        ));
    }

    #[test]
    fn truncate_mode_has_double_width_zero_bin() {
        // Uniform inputs: truncation toward zero gives the zero level
        // roughly 2/5 of the mass and the extreme levels roughly 1/10 each.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let t = RealTensor::from_vec(values).unwrap();
        let q = quantize_weights_mode(&t, &cfg5(), WeightQuantMode::TruncateToZero).unwrap();
        let hist = level_histogram(&q);
        let frac = |lvl: i32| {
            hist.iter()
                .find(|(l, _)| *l == lvl)
                .map(|(_, c)| *c as f64 / n as f64)
                .unwrap()
        };
        assert!((frac(0) - 0.4).abs() < 0.01, "zero bin {}", frac(0));
        assert!((frac(-2) - 0.1).abs() < 0.01);
        assert!((frac(2) - 0.1).abs() < 0.01);
    }

    #[test]
    fn mode_tokens_round_trip() {
        for mode in [WeightQuantMode::EqualWidth, WeightQuantMode::TruncateToZero] {
            assert_eq!(WeightQuantMode::from_token(mode.token()), Some(mode));
        }
        assert_eq!(WeightQuantMode::from_token("bogus"), None);
    }

    #[test]
    fn relu_zero_input_is_zero() {
        let t = RealTensor::from_vec(vec![0.0]).unwrap();
        let q = radix_relu(&t, 8.0, &cfg5()).unwrap();
        assert_eq!(q.values(), &[0]);
    }

    #[test]
    fn relu_top_bin_and_negative_input() {
        let t = RealTensor::from_vec(vec![7.9, -3.0, 8.0]).unwrap();
        let q = radix_relu(&t, 8.0, &cfg5()).unwrap();
        assert_eq!(q.values(), &[4, 0, 4]);
    }

    #[test]
    fn relu_rejects_bad_max() {
        let t = RealTensor::from_vec(vec![1.0]).unwrap();
        assert!(matches!(radix_relu(&t, 0.0, &cfg5()), Err(Error::BadMax(_))));
        assert!(matches!(
            radix_relu(&t, -1.0, &cfg5()),
            Err(Error::BadMax(_))
        ));
    }

    #[test]
    fn binarize_signs() {
        let t = RealTensor::from_vec(vec![0.3, -0.2, 0.0]).unwrap();
        let q = binarize(&t).unwrap();
        assert_eq!(q.values(), &[1, -1, 1]);
    }

    #[test]
    fn binarize_all_zeros_is_all_plus_one() {
        let t = RealTensor::from_vec(vec![0.0; 5]).unwrap();
        let q = binarize(&t).unwrap();
        assert!(q.values().iter().all(|&v| v == 1));
    }

    #[test]
    fn binarize_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..500).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = RealTensor::from_vec(values.clone()).unwrap();
        for c in [0.1, 2.0, 1e6] {
            let scaled =
                RealTensor::from_vec(values.iter().map(|v| v * c).collect()).unwrap();
            assert_eq!(binarize(&t).unwrap(), binarize(&scaled).unwrap());
        }
    }

    #[test]
    fn quantize_is_invariant_under_positive_affine_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..300).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = RealTensor::from_vec(values.clone()).unwrap();
        let base = quantize_weights(&t, &cfg5()).unwrap();
        for (a, b) in [(3.0, 0.0), (0.5, -7.0), (10.0, 100.0)] {
            let mapped =
                RealTensor::from_vec(values.iter().map(|v| a * v + b).collect()).unwrap();
            let q = quantize_weights(&mapped, &cfg5()).unwrap();
            assert_eq!(q.values(), base.values(), "affine ({a}, {b})");
        }
    }
}

use crate::ansatz::{random_parameters, Ansatz};
use crate::error::{Error, Result};
use crate::noise::KrausChannel;

use super::cost::CostSpec;
use super::gradient::partial_parameter_shift;

pub const DEFAULT_PROBE_SAMPLES: usize = 200;

/// Seed of the `index`-th probe sample (SplitMix64 finaliser over
/// `seed + index`).
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Unbiased sample variance (denominator `len - 1`).
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

/// Shift-rule derivatives of parameter `param_index` at `num_samples`
/// independent random parameter vectors.
pub fn probe_gradients(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    num_samples: usize,
    seed: u64,
    param_index: usize,
) -> Result<Vec<f64>> {
    if num_samples < 2 {
        return Err(Error::Invalid(format!(
            "variance needs at least 2 samples, got {num_samples}"
        )));
    }
    (0..num_samples as u64)
        .map(|i| {
            let params = random_parameters(
                ansatz.num_qubits(),
                ansatz.num_layers(),
                sample_seed(seed, i),
            );
            partial_parameter_shift(ansatz, &params, spec, channel, param_index)
        })
        .collect()
}

/// Sample variance of `∂C/∂θ₀` (the first `Rx` angle) over random
/// initialisations.
pub fn bp_variance_probe(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    num_samples: usize,
    seed: u64,
) -> Result<f64> {
    bp_variance_probe_at(ansatz, spec, channel, num_samples, seed, 0)
}

/// [`bp_variance_probe`] for an arbitrary parameter.
pub fn bp_variance_probe_at(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    num_samples: usize,
    seed: u64,
    param_index: usize,
) -> Result<f64> {
    let grads = probe_gradients(ansatz, spec, channel, num_samples, seed, param_index)?;
    Ok(sample_variance(&grads))
}

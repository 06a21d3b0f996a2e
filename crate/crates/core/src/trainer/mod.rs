//! Costs, gradients, the Adam loop and the gradient-variance probe.

mod adam;
mod cost;
mod gradient;
mod probe;
mod training;

pub use adam::{adam_step, AdamState, DEFAULT_LEARNING_RATE};
pub use cost::{cost, CostReduction, CostSpec};
pub use gradient::{
    cost_and_gradient, evaluate_cost, gradient_finite_difference, gradient_parameter_shift,
    gradient_parameter_shift_direct, partial_parameter_shift, CostAndGradient,
};
pub use probe::{
    bp_variance_probe, bp_variance_probe_at, probe_gradients, sample_seed, sample_variance,
    DEFAULT_PROBE_SAMPLES,
};
pub use training::{
    fingerprint, format_f64, read_records, train, train_from, write_records, IterationRecord,
    TrainOptions, TrainingTrace, CONVERGENCE_THRESHOLD, DEFAULT_ITERATIONS, NO_TRAINING_DECREASE,
};

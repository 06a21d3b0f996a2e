//! Gradients of the cost with respect to the rotation angles.
//!
//! Every rotation is `exp(-iθG/2)` with `G² = I`, and channels do not depend
//! on the angles, so the two-term shift rule
//! `∂C/∂θₖ = [C(θ + π/2·eₖ) - C(θ - π/2·eₖ)] / 2` is exact.
//!
//! [`gradient_parameter_shift`] evaluates both shifted costs of every angle
//! from one forward pass (snapshots of ρ before each rotation) and one
//! backward pass (the cost operator pulled back through the adjoint
//! channels). At each rotation the remaining circuit only enters through a
//! 4×4 environment tensor, so the shifted costs cost O(4ⁿ) each instead of a
//! full re-simulation. [`gradient_parameter_shift_direct`] re-simulates the
//! circuit twice per angle and is kept as a cross-check.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::ansatz::{Ansatz, ParameterVector, Program, Step};
use crate::error::{Error, Result};
use crate::kernel::{self, block_environment};
use crate::noise::KrausChannel;

use super::cost::{cost, CostSpec};

/// Cost at `params` together with its shift-rule gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct CostAndGradient {
    pub cost: f64,
    pub gradient: Vec<f64>,
}

fn check_spec(ansatz: &Ansatz, spec: &CostSpec) -> Result<()> {
    if spec.num_qubits() != ansatz.num_qubits() {
        return Err(Error::Observable(format!(
            "{}-qubit cost for a {}-qubit circuit",
            spec.num_qubits(),
            ansatz.num_qubits()
        )));
    }
    Ok(())
}

/// Cost of the circuit's output state.
pub fn evaluate_cost(
    ansatz: &Ansatz,
    params: &ParameterVector,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
) -> Result<f64> {
    check_spec(ansatz, spec)?;
    let rho = Program::compile(ansatz, channel)?.run(params)?;
    cost(&rho, spec)
}

/// Shift-rule gradient via shared forward/backward passes.
pub fn gradient_parameter_shift(
    ansatz: &Ansatz,
    params: &ParameterVector,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
) -> Result<Vec<f64>> {
    Ok(cost_and_gradient(ansatz, params, spec, channel)?.gradient)
}

/// [`gradient_parameter_shift`] plus the cost at `params`, which falls out
/// of the forward pass for free.
pub fn cost_and_gradient(
    ansatz: &Ansatz,
    params: &ParameterVector,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
) -> Result<CostAndGradient> {
    check_spec(ansatz, spec)?;
    let program = Program::compile(ansatz, channel)?;
    program.check_params(params)?;
    let n = program.num_qubits;
    let angles = params.as_slice();

    let mut rho = crate::state::DensityMatrix::ground_state(n)?;
    let mut snapshots: Vec<Vec<Complex64>> = Vec::with_capacity(program.num_params);
    for step in &program.steps {
        if matches!(step, Step::Rotation { .. }) {
            snapshots.push(rho.matrix().as_slice().to_vec());
        }
        program.apply_step(rho.data_mut(), step, angles);
    }
    let cost_operator = spec.operator()?;
    let cost_value = kernel::hs_inner(cost_operator.as_slice(), rho.matrix().as_slice());
    drop(rho);

    let mut gradient = vec![0.0; program.num_params];
    let mut pulled_back = cost_operator.into_vec();
    for step in program.steps.iter().rev() {
        if let Step::Rotation {
            qubit,
            axis,
            param,
            post,
        } = step
        {
            let before = snapshots.pop().expect("one snapshot per rotation");
            let env = block_environment(&pulled_back, &before, n, *qubit);
            let theta = angles[*param];
            let plus = Step::rotation_superop(*axis, theta + FRAC_PI_2, post.as_ref()).contract(&env);
            let minus = Step::rotation_superop(*axis, theta - FRAC_PI_2, post.as_ref()).contract(&env);
            gradient[*param] += (plus.re - minus.re) / 2.0;
        }
        program.apply_step_adjoint(&mut pulled_back, step, angles);
    }
    Ok(CostAndGradient {
        cost: cost_value,
        gradient,
    })
}

/// Shift-rule derivative for one angle, by two full simulations.
pub fn partial_parameter_shift(
    ansatz: &Ansatz,
    params: &ParameterVector,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    index: usize,
) -> Result<f64> {
    check_spec(ansatz, spec)?;
    let program = Program::compile(ansatz, channel)?;
    program.check_params(params)?;
    if index >= params.len() {
        return Err(Error::Invalid(format!(
            "parameter index {index} out of range for {} parameters",
            params.len()
        )));
    }
    let plus = cost(&program.run(&params.shifted(index, FRAC_PI_2))?, spec)?;
    let minus = cost(&program.run(&params.shifted(index, -FRAC_PI_2))?, spec)?;
    Ok((plus - minus) / 2.0)
}

/// Shift-rule gradient with two full simulations per angle.
pub fn gradient_parameter_shift_direct(
    ansatz: &Ansatz,
    params: &ParameterVector,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
) -> Result<Vec<f64>> {
    (0..params.len())
        .map(|k| partial_parameter_shift(ansatz, params, spec, channel, k))
        .collect()
}

/// Central differences `[C(p + h·eₖ) - C(p - h·eₖ)] / 2h`.
pub fn gradient_finite_difference(
    ansatz: &Ansatz,
    params: &ParameterVector,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    h: f64,
) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("step size {h} must be positive")));
    }
    check_spec(ansatz, spec)?;
    let program = Program::compile(ansatz, channel)?;
    program.check_params(params)?;
    (0..params.len())
        .map(|k| {
            let plus = cost(&program.run(&params.shifted(k, h))?, spec)?;
            let minus = cost(&program.run(&params.shifted(k, -h))?, spec)?;
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

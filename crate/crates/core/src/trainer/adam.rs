use crate::ansatz::ParameterVector;
use crate::error::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

/// Adam optimiser state with bias-corrected moment estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Zeroed moments with β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
    pub fn new(num_params: usize, learning_rate: f64) -> Self {
        Self {
            first_moment: vec![0.0; num_params],
            second_moment: vec![0.0; num_params],
            step_count: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One descent step on `params` along `grads`.
    pub fn step(&mut self, params: &mut ParameterVector, grads: &[f64]) -> Result<()> {
        let len = self.first_moment.len();
        if params.len() != len || grads.len() != len {
            return Err(Error::Shape(format!(
                "Adam state for {len} parameters got {} parameters and {} gradients",
                params.len(),
                grads.len()
            )));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let correction1 = 1.0 - self.beta1.powi(t);
        let correction2 = 1.0 - self.beta2.powi(t);
        for (((p, &g), m), v) in params
            .as_mut_slice()
            .iter_mut()
            .zip(grads)
            .zip(&mut self.first_moment)
            .zip(&mut self.second_moment)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / correction1;
            let v_hat = *v / correction2;
            *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

/// Functional form of [`AdamState::step`].
pub fn adam_step(
    state: &AdamState,
    params: &ParameterVector,
    grads: &[f64],
) -> Result<(AdamState, ParameterVector)> {
    let mut state = state.clone();
    let mut params = params.clone();
    state.step(&mut params, grads)?;
    Ok((state, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let state = AdamState::new(3, 0.1);
        let params = ParameterVector::new(vec![0.5, -1.0, 2.0]);
        let (next, moved) = adam_step(&state, &params, &[0.0; 3]).unwrap();
        assert_eq!(moved, params);
        assert_eq!(next.step_count, 1);
    }

    #[test]
    fn first_step_has_learning_rate_magnitude() {
        // At t = 1, m̂ = g and v̂ = g², so the update is -lr·g/(|g| + ε).
        let state = AdamState::new(4, 0.1);
        let grads = [0.3, -2.0, 1e-3, 50.0];
        let params = ParameterVector::zeros(4);
        let (_, moved) = adam_step(&state, &params, &grads).unwrap();
        for (p, g) in moved.as_slice().iter().zip(grads) {
            let expected = -0.1 * g / (g.abs() + 1e-8);
            assert!((p - expected).abs() < 1e-12, "{p} vs {expected}");
            assert!((p.abs() - 0.1).abs() < 1e-5);
        }
    }

    #[test]
    fn second_step_matches_hand_computation() {
        let mut state = AdamState::new(1, 0.1);
        let mut p = ParameterVector::zeros(1);
        state.step(&mut p, &[1.0]).unwrap();
        state.step(&mut p, &[0.5]).unwrap();
        let m: f64 = 0.9 * 0.1 + 0.1 * 0.5;
        let v: f64 = 0.999 * 0.001 + 0.001 * 0.25;
        let m_hat = m / (1.0 - 0.81);
        let v_hat = v / (1.0 - 0.999f64.powi(2));
        let expected = -0.1 * 1.0 / (1.0 + 1e-8) - 0.1 * m_hat / (v_hat.sqrt() + 1e-8);
        assert!((p.as_slice()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn identical_runs_are_bit_identical() {
        let run = || {
            let mut state = AdamState::new(2, 0.1);
            let mut p = ParameterVector::new(vec![1.0, -1.0]);
            for k in 0..20 {
                let g = [(k as f64).sin(), p.as_slice()[0] * 0.3];
                state.step(&mut p, &g).unwrap();
            }
            p
        };
        assert_eq!(run().as_slice(), run().as_slice());
    }

    #[test]
    fn length_mismatch() {
        let mut state = AdamState::new(2, 0.1);
        let mut p = ParameterVector::zeros(2);
        assert!(state.step(&mut p, &[1.0]).is_err());
        let mut p3 = ParameterVector::zeros(3);
        assert!(state.step(&mut p3, &[1.0, 1.0, 1.0]).is_err());
    }
}

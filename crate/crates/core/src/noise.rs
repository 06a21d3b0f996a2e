//! The three single-qubit noise channels: amplitude damping, phase damping
//! and phase flip.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Superop;
use crate::linalg::{adjoint, c, matmul, ComplexMatrix, ZERO};

/// Completeness tolerance used when a channel is applied.
pub const CPTP_TOL: f64 = 1e-12;

/// The probabilities swept by the experiments, including the ideal baseline.
pub const PROBABILITY_GRID: [f64; 6] = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    AmplitudeDamping,
    PhaseDamping,
    PhaseFlip,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::AmplitudeDamping,
        NoiseKind::PhaseDamping,
        NoiseKind::PhaseFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::PhaseDamping => "phase_damping",
            NoiseKind::PhaseFlip => "phase_flip",
        }
    }

    /// Builds this channel at probability `p`.
    pub fn channel(self, p: f64) -> Result<KrausChannel> {
        match self {
            NoiseKind::AmplitudeDamping => amplitude_damping(p),
            NoiseKind::PhaseDamping => phase_damping(p),
            NoiseKind::PhaseFlip => phase_flip(p),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown noise type {s:?}")))
    }
}

/// A named single-qubit channel given by its Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kind: Option<NoiseKind>,
    probability: f64,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// A channel from arbitrary 2×2 operators. Completeness is not checked
    /// here; see [`validate_cptp`].
    pub fn custom(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.iter().any(|k| (k.rows(), k.cols()) != (2, 2)) {
            return Err(Error::InvalidChannel("Kraus operators must be 2x2".into()));
        }
        Ok(Self {
            kind: None,
            probability: 0.0,
            operators,
        })
    }

    /// The single-operator identity channel.
    pub fn identity() -> Self {
        Self {
            kind: None,
            probability: 0.0,
            operators: vec![ComplexMatrix::identity(2)],
        }
    }

    pub fn kind(&self) -> Option<NoiseKind> {
        self.kind
    }

    /// The channel's name as used in config files.
    pub fn name(&self) -> &'static str {
        self.kind.map_or("custom", NoiseKind::name)
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Errors unless the channel is trace preserving to within [`CPTP_TOL`].
    pub fn validate(&self) -> Result<()> {
        if validate_cptp(self, CPTP_TOL)? {
            Ok(())
        } else {
            Err(Error::InvalidChannel(format!(
                "{} channel violates completeness",
                self.name()
            )))
        }
    }

    pub(crate) fn superop(&self) -> Superop {
        Superop::from_kraus(&self.operators)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

fn named(kind: NoiseKind, probability: f64, operators: Vec<ComplexMatrix>) -> KrausChannel {
    KrausChannel {
        kind: Some(kind),
        probability,
        operators,
    }
}

/// `K₀ = [[1, 0], [0, √(1-γ)]]`, `K₁ = [[0, √γ], [0, 0]]`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma)?;
    let k0 = ComplexMatrix::diag_real(&[1.0, (1.0 - gamma).sqrt()]);
    let k1 = ComplexMatrix::from_rows([[ZERO, c(gamma.sqrt())], [ZERO, ZERO]]);
    Ok(named(NoiseKind::AmplitudeDamping, gamma, vec![k0, k1]))
}

/// `K₀ = [[1, 0], [0, √(1-γ)]]`, `K₁ = [[0, 0], [0, √γ]]`.
pub fn phase_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma)?;
    let k0 = ComplexMatrix::diag_real(&[1.0, (1.0 - gamma).sqrt()]);
    let k1 = ComplexMatrix::diag_real(&[0.0, gamma.sqrt()]);
    Ok(named(NoiseKind::PhaseDamping, gamma, vec![k0, k1]))
}

/// `K₀ = √(1-p) I`, `K₁ = √p Z`.
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let a = (1.0 - p).sqrt();
    let b = p.sqrt();
    let k0 = ComplexMatrix::diag_real(&[a, a]);
    let k1 = ComplexMatrix::diag_real(&[b, -b]);
    Ok(named(NoiseKind::PhaseFlip, p, vec![k0, k1]))
}

/// Largest entry of `|Σ Kᵢ†Kᵢ - I|`.
pub fn completeness_defect(channel: &KrausChannel) -> Result<f64> {
    if channel.operators.is_empty() {
        return Err(Error::InvalidChannel("channel has no Kraus operators".into()));
    }
    let mut sum = ComplexMatrix::zeros(2, 2);
    for k in &channel.operators {
        sum = sum.add(&matmul(&adjoint(k), k)?);
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(2)))
}

/// True iff `max |Σ Kᵢ†Kᵢ - I| ≤ tol`.
pub fn validate_cptp(channel: &KrausChannel, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Invalid(format!("tolerance {tol} must be non-negative")));
    }
    Ok(completeness_defect(channel)? <= tol)
}

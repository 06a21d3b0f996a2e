use num_complex::Complex64;
use proptest::prelude::*;
use vqc_noise::linalg::{c, ComplexMatrix};
use vqc_noise::noise::{self, completeness_defect, validate_cptp, KrausChannel, NoiseKind, CPTP_TOL};
use vqc_noise::state::{DensityMatrix, QubitIndex};

/// `|+⟩⟨+|` on one qubit of a 1-qubit register.
fn plus_state() -> DensityMatrix {
    let h = c(0.5);
    DensityMatrix::from_matrix(ComplexMatrix::from_rows([[h, h], [h, h]])).unwrap()
}

fn excited() -> DensityMatrix {
    DensityMatrix::from_matrix(ComplexMatrix::diag_real(&[0.0, 1.0])).unwrap()
}

fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> DensityMatrix {
    let mut out = rho.clone();
    out.apply_kraus(ch, QubitIndex::new(0, 1).unwrap()).unwrap();
    out
}

proptest! {
    #[test]
    fn coherence_contraction_factors(p in 0.0f64..=1.0) {
        // Off-diagonal of |+⟩⟨+| is 1/2; each channel scales it by a known factor.
        let expected = [
            (noise::amplitude_damping(p).unwrap(), (1.0 - p).sqrt()),
            (noise::phase_damping(p).unwrap(), (1.0 - p).sqrt()),
            (noise::phase_flip(p).unwrap(), 1.0 - 2.0 * p),
        ];
        for (ch, factor) in expected {
            let out = apply(&ch, &plus_state());
            let off = out.matrix()[(0, 1)];
            prop_assert!((off - Complex64::new(0.5 * factor, 0.0)).norm() <= 1e-14);
        }
    }

    #[test]
    fn amplitude_damping_moves_population(g in 0.0f64..=1.0) {
        let out = apply(&noise::amplitude_damping(g).unwrap(), &excited());
        prop_assert!((out.populations()[0] - g).abs() <= 1e-14);
        prop_assert!((out.populations()[1] - (1.0 - g)).abs() <= 1e-14);
    }

    #[test]
    fn dephasing_channels_keep_populations(p in 0.0f64..=1.0) {
        for ch in [noise::phase_damping(p).unwrap(), noise::phase_flip(p).unwrap()] {
            let out = apply(&ch, &excited());
            let pops = out.populations();
            prop_assert!(pops[0].abs() <= 1e-15 && (pops[1] - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn every_channel_is_complete(p in 0.0f64..=1.0) {
        for kind in NoiseKind::ALL {
            let ch = kind.channel(p).unwrap();
            prop_assert!(completeness_defect(&ch).unwrap() <= CPTP_TOL);
            prop_assert!(validate_cptp(&ch, CPTP_TOL).unwrap());
        }
    }
}

#[test]
fn out_of_range_probabilities_rejected() {
    for kind in NoiseKind::ALL {
        for p in [-0.1, 1.1, f64::NAN, f64::INFINITY] {
            assert!(kind.channel(p).is_err(), "{kind} {p}");
        }
    }
}

#[test]
fn incomplete_custom_channel_fails_validation() {
    let ch = KrausChannel::custom(vec![ComplexMatrix::diag_real(&[1.0, 0.5])]).unwrap();
    assert!(!validate_cptp(&ch, CPTP_TOL).unwrap());
}

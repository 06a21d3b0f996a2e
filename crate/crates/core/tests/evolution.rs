mod common;

use proptest::prelude::*;
use vqc_noise::ansatz::{build_ansatz, evolve, random_parameters, NoisePolicy};
use vqc_noise::noise::{self, NoiseKind};
use vqc_noise::observables::ObservableKind;
use vqc_noise::trainer::{cost, CostSpec};

fn kind_strategy() -> impl Strategy<Value = NoiseKind> {
    prop::sample::select(NoiseKind::ALL.to_vec())
}

fn policy_strategy() -> impl Strategy<Value = NoisePolicy> {
    prop::sample::select(vec![NoisePolicy::PerGate, NoisePolicy::PerLayer])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noisy_evolution_matches_dense_kraus_sums(
        n in 2usize..=4,
        layers in 1usize..=2,
        kind in kind_strategy(),
        policy in policy_strategy(),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let a = build_ansatz(n, layers, policy).unwrap();
        let params = random_parameters(n, layers, seed);
        let ch = kind.channel(p).unwrap();
        let rho = evolve(&a, &params, Some(&ch)).unwrap();
        let reference = common::dense_evolve(&a, &params, Some(&ch));
        prop_assert!(rho.matrix().max_abs_diff(&reference) <= 1e-12);
    }

    #[test]
    fn evolution_preserves_trace_and_hermiticity(
        n in 2usize..=5,
        kind in kind_strategy(),
        policy in policy_strategy(),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let a = build_ansatz(n, 2, policy).unwrap();
        let ch = kind.channel(p).unwrap();
        let rho = evolve(&a, &random_parameters(n, 2, seed), Some(&ch)).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-9);
        prop_assert!(rho.trace().im.abs() <= 1e-9);
        prop_assert!(rho.hermiticity_defect() <= 1e-9);
        prop_assert!(rho.purity() <= 1.0 + 1e-9);
        for pop in rho.populations() {
            prop_assert!(pop >= -1e-12);
        }
    }

    #[test]
    fn noise_free_evolution_matches_statevector(n in 2usize..=6, seed in any::<u64>()) {
        let a = build_ansatz(n, 2, NoisePolicy::None).unwrap();
        let params = random_parameters(n, 2, seed);
        let rho = evolve(&a, &params, None).unwrap();
        let oracle = common::statevector_evolve(&a, &params);
        prop_assert!(rho.matrix().max_abs_diff(oracle.matrix()) <= 1e-10);
    }

    #[test]
    fn stronger_dephasing_never_raises_purity(
        n in 2usize..=4,
        p in 0.0f64..0.9,
        dp in 0.0f64..0.1,
        seed in any::<u64>(),
    ) {
        // Per-layer dephasing on a fixed circuit: more dephasing, less purity.
        let a = build_ansatz(n, 1, NoisePolicy::PerLayer).unwrap();
        let params = random_parameters(n, 1, seed);
        let weak = evolve(&a, &params, Some(&noise::phase_damping(p).unwrap())).unwrap();
        let strong = evolve(&a, &params, Some(&noise::phase_damping(p + dp).unwrap())).unwrap();
        prop_assert!(strong.purity() <= weak.purity() + 1e-12);
    }

    #[test]
    fn cost_stays_in_unit_interval(
        n in 2usize..=5,
        kind in kind_strategy(),
        obs in prop::sample::select(ObservableKind::ALL.to_vec()),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let a = build_ansatz(n, 2, NoisePolicy::PerGate).unwrap();
        let ch = kind.channel(p).unwrap();
        let rho = evolve(&a, &random_parameters(n, 2, seed), Some(&ch)).unwrap();
        let c = cost(&rho, &CostSpec::for_kind(obs, n).unwrap()).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&c), "{c}");
    }

    #[test]
    fn random_parameters_stay_in_open_interval(n in 2usize..=12, l in 1usize..=3, seed in any::<u64>()) {
        let p = random_parameters(n, l, seed);
        prop_assert_eq!(p.len(), 2 * n * l);
        for &x in p.as_slice() {
            prop_assert!(x > -std::f64::consts::PI && x < std::f64::consts::PI);
        }
    }
}

#[test]
fn zero_probability_channel_is_noise_free() {
    for kind in NoiseKind::ALL {
        let noisy = build_ansatz(3, 2, NoisePolicy::PerGate).unwrap();
        let clean = build_ansatz(3, 2, NoisePolicy::None).unwrap();
        let params = random_parameters(3, 2, 11);
        let a = evolve(&noisy, &params, Some(&kind.channel(0.0).unwrap())).unwrap();
        let b = evolve(&clean, &params, None).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
    }
}

#[test]
fn random_parameter_mean_is_near_zero() {
    let p = random_parameters(10, 5000, 1);
    assert_eq!(p.len(), 100_000);
    let mean = p.as_slice().iter().sum::<f64>() / p.len() as f64;
    assert!(mean.abs() < 0.02, "{mean}");
}

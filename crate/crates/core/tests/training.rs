use vqc_noise::ansatz::{build_ansatz, Ansatz, NoisePolicy};
use vqc_noise::landscape::{flatness, scan, DEFAULT_RANGE};
use vqc_noise::noise::{self, KrausChannel, NoiseKind};
use vqc_noise::observables::ObservableKind;
use vqc_noise::trainer::{
    bp_variance_probe, read_records, train, CostSpec, TrainOptions, TrainingTrace,
};

fn run(n: usize, obs: ObservableKind, ch: Option<&KrausChannel>, seed: u64) -> TrainingTrace {
    let policy = if ch.is_some() { NoisePolicy::PerGate } else { NoisePolicy::None };
    let a = build_ansatz(n, 2, policy).unwrap();
    let spec = CostSpec::for_kind(obs, n).unwrap();
    train(&a, &spec, ch, seed, &TrainOptions::default()).unwrap()
}

#[test]
fn traces_have_one_more_entry_than_iterations() {
    let t = run(3, ObservableKind::PauliZ, None, 0);
    assert_eq!(t.records.len(), 51);
    for (k, r) in t.records.iter().enumerate() {
        assert_eq!(r.iteration, k);
        assert!((-1e-9..=1.0 + 1e-9).contains(&r.cost));
    }
}

#[test]
fn noise_free_hermitian_training_converges() {
    for seed in 0..3 {
        let t = run(4, ObservableKind::CustomHermitian, None, seed);
        assert!(t.final_cost() <= 0.1, "seed {seed}: {}", t.final_cost());
    }
}

#[test]
fn dephased_pauli_x_trains_less_than_hermitian() {
    let ch = noise::phase_damping(0.9).unwrap();
    for seed in 0..10 {
        let x = run(4, ObservableKind::PauliX, Some(&ch), seed);
        let h = run(4, ObservableKind::CustomHermitian, Some(&ch), seed);
        assert!(x.total_decrease() < h.total_decrease(), "seed {seed}");
    }
}

#[test]
fn training_is_deterministic() {
    let ch = noise::amplitude_damping(0.3).unwrap();
    let a = run(3, ObservableKind::PauliY, Some(&ch), 8);
    let b = run(3, ObservableKind::PauliY, Some(&ch), 8);
    assert_eq!(a, b);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_csv(&mut x).unwrap();
    b.write_csv(&mut y).unwrap();
    assert_eq!(x, y);
    assert_eq!(read_records(x.as_slice()).unwrap(), a.records);
}

#[test]
fn zero_probability_training_matches_noise_free() {
    for kind in NoiseKind::ALL {
        let ch = kind.channel(0.0).unwrap();
        let noisy = run(3, ObservableKind::PauliZ, Some(&ch), 4);
        let clean = run(3, ObservableKind::PauliZ, None, 4);
        for (a, b) in noisy.records.iter().zip(&clean.records) {
            assert!((a.cost - b.cost).abs() <= 1e-10);
            assert!((a.gradient_l2 - b.gradient_l2).abs() <= 1e-10);
        }
    }
}

fn landscape_pair(obs: ObservableKind) -> (f64, f64) {
    let clean = build_ansatz(4, 2, NoisePolicy::None).unwrap();
    let noisy = build_ansatz(4, 2, NoisePolicy::PerGate).unwrap();
    let spec = CostSpec::for_kind(obs, 4).unwrap();
    let ch = noise::phase_damping(0.9).unwrap();
    let f0 = flatness(&scan(&clean, &spec, None, 0, 1, DEFAULT_RANGE, 12, 0).unwrap());
    let f9 = flatness(&scan(&noisy, &spec, Some(&ch), 0, 1, DEFAULT_RANGE, 12, 0).unwrap());
    (f0, f9)
}

#[test]
fn dephasing_flattens_pauli_x_landscape() {
    let (f0, f9) = landscape_pair(ObservableKind::PauliX);
    assert!(f0 > 0.0);
    assert!(f9 < f0);
}

#[test]
fn swapping_axes_transposes_the_grid() {
    let a = build_ansatz(3, 2, NoisePolicy::PerGate).unwrap();
    let spec = CostSpec::for_kind(ObservableKind::PauliY, 3).unwrap();
    let ch = noise::phase_flip(0.2).unwrap();
    let g = scan(&a, &spec, Some(&ch), 2, 7, (-1.0, 2.0), 7, 5).unwrap();
    let t = scan(&a, &spec, Some(&ch), 7, 2, (-1.0, 2.0), 7, 5).unwrap();
    assert_eq!(g.base_params, t.base_params);
    for i in 0..7 {
        for j in 0..7 {
            assert!((g.cost_at(i, j) - t.cost_at(j, i)).abs() <= 1e-12);
        }
    }
    let again = scan(&a, &spec, Some(&ch), 2, 7, (-1.0, 2.0), 7, 5).unwrap();
    assert_eq!(g, again);
}

fn probe(a: &Ansatz, obs: ObservableKind) -> f64 {
    let spec = CostSpec::for_kind(obs, a.num_qubits()).unwrap();
    bp_variance_probe(a, &spec, None, 100, 1).unwrap()
}

#[test]
fn gradient_variance_shrinks_with_width() {
    let small = probe(&build_ansatz(2, 2, NoisePolicy::None).unwrap(), ObservableKind::PauliZ);
    let large = probe(&build_ansatz(6, 2, NoisePolicy::None).unwrap(), ObservableKind::PauliZ);
    assert!(large < small, "{large} vs {small}");
}

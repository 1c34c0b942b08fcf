use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qprecomp::algebra::random::random_amplitudes;
use qprecomp::dme::{
    calibrate_budget_constant, dme_apply, error_sweep, exact_evolution, exact_exponential,
    hamiltonian_to_state, random_sweep_inputs, reflection_budget, reflection_via_dme, DmeConfig,
    BUDGET_CONSTANT, CALIBRATION_SEED, SWEEP_CSV_HEADER,
};
use qprecomp::rng::seeded;
use qprecomp::sim::{DensityMatrix, Statevector};
use qprecomp::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pure(amps: &[Complex64]) -> DensityMatrix {
    DensityMatrix::from_pure(amps).unwrap()
}

fn ket0() -> DensityMatrix {
    pure(&[c(1.0, 0.0), c(0.0, 0.0)])
}

fn plus() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    pure(&[c(h, 0.0), c(h, 0.0)])
}

fn minus() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    pure(&[c(h, 0.0), c(-h, 0.0)])
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[test]
fn dme_examples() {
    let mut rng = seeded(1);
    let target = pure(&random_amplitudes(1, &mut rng));
    let out = dme_apply(&target, &ket0(), 0.0, 10).unwrap();
    assert!(max_diff(out.matrix(), target.matrix()) < 1e-12);

    // Commuting inputs only mix: σ ↦ c^{2m}σ + (1 − c^{2m})ρ with c = cos(t/m).
    let mixed = DensityMatrix::maximally_mixed(1).unwrap();
    for t in [0.3, 1.0, PI] {
        let m = 7;
        let w = (t / m as f64).cos().powi(2 * m as i32);
        let want = target.matrix() * c(w, 0.0) + mixed.matrix() * c(1.0 - w, 0.0);
        let out = dme_apply(&target, &mixed, t, m).unwrap();
        assert!(max_diff(out.matrix(), &want) < 1e-12);
    }

    let out = dme_apply(&plus(), &ket0(), PI, 400).unwrap();
    assert!(out.trace_distance(&minus()).unwrap() < 0.05);
}

#[test]
fn dme_rejects_bad_arguments() {
    let two = DensityMatrix::maximally_mixed(2).unwrap();
    assert!(matches!(
        dme_apply(&ket0(), &two, 1.0, 10),
        Err(Error::SizeMismatch { .. })
    ));
    assert!(dme_apply(&ket0(), &ket0(), 1.0, 0).is_err());
}

#[test]
fn single_step_matches_closed_form() {
    // One step with angle δ maps σ to c²σ + s²ρ − i·c·s·[ρ, σ].
    let mut rng = seeded(4);
    for n in 1..=2 {
        let rho = pure(&random_amplitudes(n, &mut rng));
        let sigma = pure(&random_amplitudes(n, &mut rng));
        let delta: f64 = 0.37;
        let (s, co) = delta.sin_cos();
        let r = rho.matrix();
        let g = sigma.matrix();
        let comm = r * g - g * r;
        let want = g * c(co * co, 0.0) + r * c(s * s, 0.0) - comm * c(0.0, co * s);
        let got = dme_apply(&sigma, &rho, delta, 1).unwrap();
        assert!(max_diff(got.matrix(), &want) < 1e-12);
    }
}

#[test]
fn exponential_examples() {
    let e = exact_exponential(&ket0(), 0.0).unwrap();
    assert!(max_diff(&e, &DMatrix::identity(2, 2)) < 1e-12);
    let e = exact_exponential(&ket0(), PI).unwrap();
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(-1.0, 0.0),
        c(1.0, 0.0),
    ]));
    assert!(max_diff(&e, &want) < 1e-12);
    let mut rng = seeded(2);
    for n in 1..=3 {
        let rho = pure(&random_amplitudes(n, &mut rng));
        let u = exact_exponential(&rho, 1.7).unwrap();
        assert!(max_diff(&(&u * u.adjoint()), &DMatrix::identity(1 << n, 1 << n)) < 1e-10);
    }
    assert!(exact_exponential(&DensityMatrix::maximally_mixed(7).unwrap(), 1.0).is_err());
}

#[test]
fn reflection_examples() {
    let cfg = DmeConfig {
        t: PI,
        m: 1,
        budget_constant: BUDGET_CONSTANT,
    };
    let mut rng = seeded(6);
    let b = Statevector::from_amplitudes(random_amplitudes(1, &mut rng)).unwrap();
    let bb = pure(&b.amplitudes_with_phase());
    let out = reflection_via_dme(&bb, &b, 0.05, &cfg).unwrap();
    assert!(out.trace_distance(&bb).unwrap() < 1e-9);

    let bplus = Statevector::product("+").unwrap();
    let one = pure(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let mut last = f64::INFINITY;
    for eps in [0.2, 0.05, 0.01] {
        let out = reflection_via_dme(&ket0(), &bplus, eps, &cfg).unwrap();
        let d = out.trace_distance(&one).unwrap();
        assert!(d <= eps, "eps {eps} error {d}");
        assert!(d < last);
        last = d;
    }
}

#[test]
fn budget_constant_is_calibrated() {
    assert_eq!(
        calibrate_budget_constant(CALIBRATION_SEED).unwrap(),
        BUDGET_CONSTANT
    );
}

#[test]
fn hamiltonian_examples() {
    let z = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    let (rho, scale) = hamiltonian_to_state(&z, 1.0).unwrap();
    assert!(max_diff(rho.matrix(), ket0().matrix()) < 1e-12);
    assert!((scale - 2.0).abs() < 1e-12);

    let (rho, scale) = hamiltonian_to_state(&DMatrix::zeros(2, 2), 1.0).unwrap();
    assert!(
        max_diff(
            rho.matrix(),
            DensityMatrix::maximally_mixed(1).unwrap().matrix()
        ) < 1e-12
    );
    assert!((scale - 2.0).abs() < 1e-12);

    let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let (rho, scale) = hamiltonian_to_state(&x, 1.0).unwrap();
    assert!(max_diff(rho.matrix(), plus().matrix()) < 1e-12);
    assert!((scale - 2.0).abs() < 1e-12);

    match hamiltonian_to_state(&z, 0.5) {
        Err(Error::NotPositive { min_shift }) => assert!((min_shift - 1.0).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_round_trip(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = seeded(seed);
        let dim = 1 << n;
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            let v = random_amplitudes(0, &mut rng)[0];
            v * c(rand::Rng::random_range(&mut rng, -2.0..2.0), 0.0)
        });
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        let min = h.clone().symmetric_eigenvalues().min();
        let shift = -min + 0.1;
        let (rho, scale) = hamiltonian_to_state(&h, shift).unwrap();
        rho.check_invariants().unwrap();
        let back = rho.matrix() * c(scale, 0.0) - DMatrix::<Complex64>::identity(dim, dim) * c(shift, 0.0);
        prop_assert!(max_diff(&back, &h) < 1e-10);
    }

    #[test]
    fn dme_output_is_a_state(seed in any::<u64>(), n in 1usize..3, m in 1usize..30, t in -4.0f64..4.0) {
        let mut rng = seeded(seed);
        let rho = pure(&random_amplitudes(n, &mut rng));
        let target = pure(&random_amplitudes(n, &mut rng));
        let out = dme_apply(&target, &rho, t, m).unwrap();
        out.check_invariants().unwrap();
        prop_assert!(out.min_eigenvalue() > -1e-9);
    }
}

#[test]
fn commuting_inputs_mix_in_closed_form() {
    let rho =
        DensityMatrix::from_matrix(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.7, 0.0),
            c(0.1, 0.0),
            c(0.15, 0.0),
            c(0.05, 0.0),
        ])))
        .unwrap();
    let target = pure(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let (t, m) = (1.3, 100);
    let w = (t / m as f64).cos().powi(2 * m as i32);
    let want = target.matrix() * c(w, 0.0) + rho.matrix() * c(1.0 - w, 0.0);
    let out = dme_apply(&target, &rho, t, m).unwrap();
    assert!(max_diff(out.matrix(), &want) < 1e-12);
    // The exact evolution leaves a commuting target alone; DME drifts by O(t²/m).
    assert!(
        exact_evolution(&target, &rho, t)
            .unwrap()
            .trace_distance(&target)
            .unwrap()
            < 1e-12
    );
    assert!(out.trace_distance(&target).unwrap() < 2.0 * t * t / m as f64);
}

#[test]
fn budget_examples() {
    let one = reflection_budget(1, 0.1, 1.0).unwrap();
    assert_eq!(one, (PI * PI / 0.1).ceil() as u64);
    let q2 = reflection_budget(20, 0.1, 1.0).unwrap() as f64;
    let q4 = reflection_budget(40, 0.1, 1.0).unwrap() as f64;
    assert!((q4 / q2 - 4.0).abs() < 0.01);
    assert_eq!(reflection_budget(3, 0.3, 1.0).unwrap(), 297);
    assert!(reflection_budget(0, 0.3, 1.0).is_err());
    assert!(reflection_budget(1, 0.0, 1.0).is_err());
    assert_eq!(DmeConfig::for_accuracy(PI, 0.1, 1.0).unwrap().m, 99);
}

#[test]
fn sweep_examples() {
    let (rho, probes) = random_sweep_inputs(1, 5, 3).unwrap();
    let tab = error_sweep(&rho, PI, &[50, 800], &probes, 3).unwrap();
    assert!(tab.rows[1].mean_error < tab.rows[0].mean_error);
    let zero = error_sweep(&rho, 0.0, &[10, 20], &probes, 3).unwrap();
    assert!(zero.rows.iter().all(|r| r.mean_error < 1e-10));
    assert!(error_sweep(&rho, PI, &[], &probes, 3).is_err());

    let csv = tab.to_csv().unwrap();
    assert_eq!(csv.lines().next().unwrap(), SWEEP_CSV_HEADER.join(","));
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(tab.rows[0].n_probes, 5);

    let rho_exact = exact_evolution(&probes[0], &rho, PI).unwrap();
    rho_exact.check_invariants().unwrap();
}

#[test]
fn error_is_nonincreasing_in_m_on_average() {
    let mut means = [0.0; 4];
    for seed in 0..4 {
        let (rho, probes) = random_sweep_inputs(1, 3, seed).unwrap();
        let tab = error_sweep(&rho, PI, &[25, 50, 100, 200], &probes, seed).unwrap();
        for (m, r) in means.iter_mut().zip(&tab.rows) {
            *m += r.mean_error;
        }
    }
    assert!(means.windows(2).all(|w| w[1] <= w[0]));
}

use num_complex::Complex64;
use proptest::prelude::*;
use qprecomp::algebra::random::{random_amplitudes, random_product_state};
use qprecomp::algebra::{Monomial, PauliString, ZkElement};
use qprecomp::protocol::{
    apply_residual_direct, classical_outcome_processing, color_monomials, default_stop_level,
    fanout, layer_schedule, precompute_resource, unfanout, Cascade,
};
use qprecomp::rng::{seeded, trial_rng};
use qprecomp::sim::{pure_trace_distance, Backend, DryRun, Stage, Statevector};
use qprecomp::teleport::Transcript;
use qprecomp::Error;

fn direct(u: &ZkElement, amps: &[Complex64]) -> Vec<Complex64> {
    let diag = u.to_diagonal().unwrap();
    amps.iter().zip(diag).map(|(a, d)| a * d).collect()
}

/// Runs the protocol and returns the distance to direct application.
fn run(u: &ZkElement, a: usize, amps: &[Complex64], seed: u64) -> (f64, usize) {
    let mut resource = precompute_resource(Statevector::new(), u, a).unwrap();
    let input = Statevector::from_amplitudes(amps.to_vec()).unwrap();
    let result = resource.consume(input, &mut seeded(seed)).unwrap();
    assert_eq!(result.state.live_qubits(), &result.qubits[..]);
    let out = result.state.amplitudes_in_order(&result.qubits).unwrap();
    (
        pure_trace_distance(&out, &direct(u, amps)).unwrap(),
        result.residual.level(),
    )
}

#[test]
fn stop_level_defaults() {
    assert_eq!(default_stop_level(1), 1);
    assert_eq!(default_stop_level(2), 1);
    assert_eq!(default_stop_level(3), 1);
    assert_eq!(default_stop_level(4), 2);
    assert_eq!(default_stop_level(7), 3);
}

#[test]
fn precompute_examples() {
    let cz = ZkElement::mcz(2, &[0, 1]).unwrap();
    let r = precompute_resource(DryRun::new(), &cz, 1).unwrap();
    assert!(r.layers().is_empty());
    assert_eq!(r.total_width(), 4);

    let ccz = ZkElement::mcz(3, &[0, 1, 2]).unwrap();
    let r = precompute_resource(DryRun::new(), &ccz, 2).unwrap();
    assert_eq!(r.layers().len(), 1);
    let got: Vec<ZkElement> = r.layers()[0].iter().map(|g| g.correction.clone()).collect();
    let want = vec![
        ZkElement::mcz(3, &[1, 2]).unwrap(),
        ZkElement::mcz(3, &[0, 2]).unwrap(),
        ZkElement::mcz(3, &[0, 1]).unwrap(),
    ];
    for (g, w) in got.iter().zip(&want) {
        assert_eq!(g.to_diagonal().unwrap(), w.to_diagonal().unwrap());
        assert!(g.level() <= 2);
    }
    for (i, g) in r.layers()[0].iter().enumerate() {
        // Candidate corrections are X_i U X_i U† for single qubits.
        assert_eq!(g.correction, ccz.conjugate_by_single_x(i));
    }

    for a in [0, 3] {
        assert!(matches!(
            precompute_resource(DryRun::new(), &ccz, a),
            Err(Error::InvalidArgument(_))
        ));
    }
}

#[test]
fn prep_ledger_is_base_only_without_layers() {
    let mut rng = seeded(3);
    let u = ZkElement::random(3, 2, &mut rng);
    let r = precompute_resource(Statevector::new(), &u, 1).unwrap();
    let dry = precompute_resource(DryRun::new(), &u, 1).unwrap();
    assert_eq!(r.prep_ledger(), dry.prep_ledger());
    assert_eq!(r.prep_ledger().peak_width, 6);
}

#[test]
fn protocol_examples() {
    let z = ZkElement::mcz(1, &[0]).unwrap();
    let mut rng = seeded(4);
    let amps = random_amplitudes(1, &mut rng);
    for seed in 0..10 {
        assert!(run(&z, 1, &amps, seed).0 < 1e-12);
    }
    let cz = ZkElement::mcz(2, &[0, 1]).unwrap();
    let h = 0.5;
    let plus: Vec<Complex64> = vec![Complex64::new(h, 0.0); 4];
    for seed in 0..10 {
        assert!(run(&cz, 1, &plus, seed).0 < 1e-10);
    }
    let ccz = ZkElement::mcz(3, &[0, 1, 2]).unwrap();
    for seed in 0..10 {
        let input = random_product_state(3, &mut rng).unwrap();
        let (d, level) = run(&ccz, 2, input.amplitudes(), seed);
        assert!(d < 1e-9);
        assert!(level <= 1);
    }
}

#[test]
fn protocol_matches_direct_application_small() {
    let mut rng = seeded(8);
    for (n, k, a) in [
        (2, 2, 1),
        (3, 2, 1),
        (2, 3, 1),
        (3, 3, 2),
        (3, 3, 1),
        (3, 1, 1),
        (4, 4, 2),
        (4, 4, 3),
    ] {
        for trial in 0..6u64 {
            let u = ZkElement::random(n, k, &mut rng);
            let amps = random_amplitudes(n, &mut rng);
            for seed in 0..3 {
                let (d, level) = run(&u, a, &amps, trial * 10 + seed);
                assert!(d < 1e-9, "(n,k,a)=({n},{k},{a}) u={u} d={d}");
                assert!(level <= k - a);
            }
        }
    }
}

#[test]
fn resource_is_single_use() {
    let u = ZkElement::mcz(2, &[0, 1]).unwrap();
    let mut r = precompute_resource(Statevector::new(), &u, 1).unwrap();
    r.consume(Statevector::product("++").unwrap(), &mut seeded(1))
        .unwrap();
    assert!(r.is_consumed());
    let again = r.consume(Statevector::product("++").unwrap(), &mut seeded(1));
    assert!(matches!(again, Err(Error::AlreadyConsumed)));
}

#[test]
fn replay_is_deterministic_and_matches_online() {
    let mut rng = seeded(12);
    let u = ZkElement::random(3, 3, &mut rng);
    let mut r = precompute_resource(Statevector::new(), &u, 2).unwrap();
    let result = r
        .consume(random_product_state(3, &mut rng).unwrap(), &mut seeded(5))
        .unwrap();
    let first = classical_outcome_processing(&u, &result.transcript, 2).unwrap();
    let second = classical_outcome_processing(&u, &result.transcript, 2).unwrap();
    assert_eq!(first, second);
    assert_eq!(first.residual, result.residual);
    assert_eq!(first.final_pauli, result.final_pauli);
    assert_eq!(first.op_count, result.classical_op_count);

    let text = result.transcript.to_text();
    let parsed = Transcript::parse(&text).unwrap();
    assert_eq!(classical_outcome_processing(&u, &parsed, 2).unwrap(), first);

    let mut short = result.transcript.clone();
    short.byproducts.pop();
    assert!(matches!(
        classical_outcome_processing(&u, &short, 2),
        Err(Error::IncompleteTranscript(_))
    ));
    assert!(matches!(
        classical_outcome_processing(&u, &Transcript::default(), 2),
        Err(Error::IncompleteTranscript(_))
    ));
    let mut flipped = result.transcript.clone();
    flipped.choices[0] ^= 1;
    assert!(classical_outcome_processing(&u, &flipped, 2).is_err());
}

#[test]
fn replay_examples() {
    let cz = ZkElement::mcz(2, &[0, 1]).unwrap();
    let t = Transcript {
        byproducts: vec![PauliString::identity(2)],
        ..Transcript::default()
    };
    let out = classical_outcome_processing(&cz, &t, 1).unwrap();
    assert!(out.residual.is_identity());
    assert_eq!(out.final_pauli, PauliString::identity(2));

    let t = Transcript {
        byproducts: vec![PauliString::x_on(2, &[0])],
        ..Transcript::default()
    };
    let out = classical_outcome_processing(&cz, &t, 1).unwrap();
    assert!(out.residual.contains(Monomial::single(1)));
    // Dense check: X_0 CZ X_0 = Z_1 · CZ.
    let diag = out.residual.to_diagonal().unwrap();
    assert_eq!(
        diag,
        ZkElement::mcz(2, &[1]).unwrap().to_diagonal().unwrap()
    );
}

#[test]
fn residual_level_holds_on_synthetic_transcripts() {
    let mut rng = seeded(21);
    for _ in 0..200 {
        let n = 3 + rand::Rng::random_range(&mut rng, 0..3usize);
        let k = 2 + rand::Rng::random_range(&mut rng, 0..3usize);
        let a = 1 + rand::Rng::random_range(&mut rng, 0..k - 1);
        let u = ZkElement::random(n, k, &mut rng);
        let random_pauli = |rng: &mut qprecomp::rng::SimRng| {
            let x = (0..n).map(|_| rand::Rng::random_bool(rng, 0.5)).collect();
            let z = (0..n).map(|_| rand::Rng::random_bool(rng, 0.5)).collect();
            PauliString::from_bits(x, z, 0).unwrap()
        };
        let mut cascade = Cascade::new(&u, a, random_pauli(&mut rng)).unwrap();
        let mut steps = 0;
        while let Some(step) = cascade.next_step() {
            assert_eq!(step.index, steps);
            steps += 1;
            let (p2, p1) = (random_pauli(&mut rng), random_pauli(&mut rng));
            cascade.absorb(&p2, &p1).unwrap();
        }
        assert_eq!(steps, layer_schedule(n, a).len());
        assert!(cascade.active().all(|t| t.len() >= a));
        let out = cascade.finish().unwrap();
        assert!(out.residual.level() <= k - a);
    }
}

#[test]
fn peak_width_per_gadget_step() {
    let mut rng = seeded(31);
    let n = 3;
    let u = ZkElement::random(n, 3, &mut rng);
    let mut r = precompute_resource(Statevector::new(), &u, 2).unwrap();
    let result = r
        .consume(random_product_state(n, &mut rng).unwrap(), &mut rng)
        .unwrap();
    let peak = result.state.log().peak_live();
    assert!(peak <= n + 5 * n + 2, "peak {peak}");
    assert!(result.consume_ledger.peak_width as usize <= n + 5 * n + 2);
}

#[test]
fn every_gate_lands_in_one_ledger() {
    let mut rng = seeded(41);
    let u = ZkElement::random(3, 3, &mut rng);
    let mut r = precompute_resource(Statevector::new(), &u, 2).unwrap();
    let result = r
        .consume(random_product_state(3, &mut rng).unwrap(), &mut rng)
        .unwrap();
    let log = result.state.log();
    let gates = |stage| {
        log.events()
            .iter()
            .filter(|e| e.stage() == stage && matches!(e, qprecomp::sim::Event::Gate { .. }))
            .count() as u64
    };
    assert_eq!(
        gates(Stage::Prep) + gates(Stage::Consume),
        log.gate_events()
    );
}

#[test]
fn outcome_independence() {
    let mut rng = seeded(51);
    let u = ZkElement::random(3, 3, &mut rng);
    let amps = random_amplitudes(3, &mut rng);
    let outputs: Vec<Vec<Complex64>> = (0..20u64)
        .map(|trial| {
            let mut r = precompute_resource(Statevector::new(), &u, 2).unwrap();
            let input = Statevector::from_amplitudes(amps.clone()).unwrap();
            let res = r.consume(input, &mut trial_rng(7, trial)).unwrap();
            res.state.amplitudes_in_order(&res.qubits).unwrap()
        })
        .collect();
    for o in &outputs[1..] {
        assert!(pure_trace_distance(o, &outputs[0]).unwrap() < 1e-9);
    }
}

#[test]
fn ledger_only_runs_match_exact_runs() {
    let mut rng = seeded(61);
    let u = ZkElement::random(3, 2, &mut rng);
    let mut exact = precompute_resource(Statevector::new(), &u, 1).unwrap();
    let mut dry = precompute_resource(DryRun::new(), &u, 1).unwrap();
    let e = exact
        .consume(random_product_state(3, &mut rng).unwrap(), &mut seeded(1))
        .unwrap();
    let d = dry.consume(DryRun::with_qubits(3), &mut seeded(1)).unwrap();
    assert_eq!(e.prep_ledger, d.prep_ledger);
    assert_eq!(e.consume_ledger.measurements, d.consume_ledger.measurements);
}

#[test]
fn fanout_examples() {
    let mut s = Statevector::product("0").unwrap();
    let q = s.live_qubits().to_vec();
    let fan = fanout(&mut s, &q, 3).unwrap();
    assert_eq!(fan.copies.len(), 3);
    assert_eq!(fan.tree_depth, 2);
    assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);

    let mut s =
        Statevector::from_amplitudes(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
            .unwrap();
    let q = s.live_qubits().to_vec();
    let fan = fanout(&mut s, &q, 2).unwrap();
    let amps = s.amplitudes();
    assert!((amps[0] - Complex64::new(0.6, 0.0)).norm() < 1e-15);
    assert!((amps[3] - Complex64::new(0.0, 0.8)).norm() < 1e-15);
    assert!(amps[1].norm() + amps[2].norm() < 1e-15);
    unfanout(&mut s, fan).unwrap();
    assert_eq!(s.live_qubits(), &q[..]);

    assert!(fanout(&mut s, &q, 1).is_err());
}

#[test]
fn fanout_round_trip() {
    let mut rng = seeded(71);
    for m in 2..6 {
        let amps = random_amplitudes(2, &mut rng);
        let mut s = Statevector::from_amplitudes(amps.clone()).unwrap();
        let q = s.live_qubits().to_vec();
        let fan = fanout(&mut s, &q, m).unwrap();
        assert_eq!(s.num_live(), 2 * m);
        unfanout(&mut s, fan).unwrap();
        assert!(pure_trace_distance(&s.amplitudes_in_order(&q).unwrap(), &amps).unwrap() < 1e-12);
    }
}

#[test]
fn coloring_examples() {
    let r = ZkElement::parse("+;0,1;2", 3, 2).unwrap();
    assert_eq!(color_monomials(r.monomials()).len(), 1);
    let r = ZkElement::parse("+;0,1;1,2;0,2", 3, 2).unwrap();
    let groups = color_monomials(r.monomials());
    assert_eq!(groups.len(), 3);
    for g in &groups {
        let masks: Vec<u64> = g.iter().map(|m| m.mask()).collect();
        for (i, a) in masks.iter().enumerate() {
            assert!(masks[i + 1..].iter().all(|b| a & b == 0));
        }
    }
}

fn residual_modes_agree(r: &ZkElement, amps: &[Complex64]) {
    let mut serial = Statevector::from_amplitudes(amps.to_vec()).unwrap();
    let q = serial.live_qubits().to_vec();
    apply_residual_direct(&mut serial, &q, r, false).unwrap();
    let mut par = Statevector::from_amplitudes(amps.to_vec()).unwrap();
    let report = apply_residual_direct(&mut par, &q, r, true).unwrap();
    assert_eq!(par.live_qubits(), &q[..]);
    let a = serial.amplitudes_with_phase();
    let b = par.amplitudes_with_phase();
    let diff = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-10, "diff {diff}");
    let oracle = direct(r, amps);
    assert!(a.iter().zip(&oracle).all(|(x, y)| (x - y).norm() < 1e-10));
    if !r.is_scalar() {
        assert!(report.copies >= 2);
    }
}

#[test]
fn residual_examples() {
    let mut rng = seeded(81);
    let amps = random_amplitudes(3, &mut rng);
    let mut s = Statevector::from_amplitudes(amps.clone()).unwrap();
    let q = s.live_qubits().to_vec();
    apply_residual_direct(&mut s, &q, &ZkElement::identity(3, 2), true).unwrap();
    assert!(pure_trace_distance(s.amplitudes(), &amps).unwrap() < 1e-15);
    residual_modes_agree(&ZkElement::parse("+;0;1", 3, 1).unwrap(), &amps);
    residual_modes_agree(&ZkElement::parse("-;0,1;2", 3, 2).unwrap(), &amps);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_paths_agree(seed in any::<u64>(), n in 2usize..5, k in 1usize..4) {
        let mut rng = seeded(seed);
        let r = ZkElement::random(n, k, &mut rng);
        // The parallel path holds one register copy per color group.
        prop_assume!(n * color_monomials(r.monomials()).len().max(2) <= 20);
        let amps = random_amplitudes(n, &mut rng);
        residual_modes_agree(&r, &amps);
    }

    #[test]
    fn replay_matches_online(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let u = ZkElement::random(3, 3, &mut rng);
        let mut r = precompute_resource(DryRun::new(), &u, 2).unwrap();
        let res = r.consume(DryRun::with_qubits(3), &mut rng).unwrap();
        let replay = classical_outcome_processing(&u, &res.transcript, 2).unwrap();
        prop_assert_eq!(replay.residual, res.residual);
        prop_assert_eq!(replay.final_pauli, res.final_pauli);
    }
}

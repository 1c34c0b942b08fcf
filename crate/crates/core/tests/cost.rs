use num_complex::Complex64;
use proptest::prelude::*;
use qprecomp::algebra::random::{random_amplitudes, random_clifford_circuit};
use qprecomp::algebra::CliffordTableau;
use qprecomp::algebra::ZkElement;
use qprecomp::cost::{
    count_circuit, decompose_mcz, fit_scaling, standard_cost_zk, table1_report, GateCountLedger,
    MeanLedger, Phase, Table1Config, TaskInstance, CSV_HEADER,
};
use qprecomp::rng::{seeded, ForcedOutcomes};
use qprecomp::sim::{Backend, Circuit, DryRun, Gate, Stage, Statevector};
use qprecomp::teleport::{gate_teleport, prepare_gate_resource};

#[test]
fn count_circuit_examples() {
    assert_eq!(count_circuit(&Circuit::new(3)), GateCountLedger::zero());

    let mut c = Circuit::new(2);
    c.push(Gate::H, [0]).push(Gate::Cnot, [0, 1]);
    let l = count_circuit(&c);
    assert_eq!(
        (l.clifford_1q, l.clifford_2q, l.depth, l.identity_ticks),
        (1, 1, 2, 1)
    );
    assert_eq!(l.peak_width, 2);

    let mut c = Circuit::new(4);
    c.push(Gate::Cnot, [0, 1]).push(Gate::Cnot, [2, 3]);
    let l = count_circuit(&c);
    assert_eq!((l.clifford_2q, l.depth, l.identity_ticks), (2, 1, 0));

    let mut c = Circuit::new(1);
    c.push(Gate::T, [0]).push(Gate::Tdg, [0]).push(Gate::S, [0]);
    let l = count_circuit(&c);
    assert_eq!((l.t_count, l.clifford_1q, l.depth), (2, 1, 3));
}

#[test]
fn mcz_gates_expand_in_ledgers() {
    let mut c = Circuit::new(3);
    c.push(Gate::Mcz, [0, 1, 2]);
    let l = count_circuit(&c);
    assert_eq!(l.t_count, 7);
    assert_eq!(l.clifford_2q, 6);

    let mut c = Circuit::new(4);
    c.push(Gate::Mcz, [0, 1, 2, 3]);
    let l = count_circuit(&c);
    assert_eq!(l.t_count, 14);
    assert_eq!(l.measurements, 2);
    assert_eq!(l.peak_width, 6);
}

#[test]
fn ledger_from_log_splits_by_stage() {
    let mut s = DryRun::new();
    s.set_stage(Stage::Prep);
    let q = s.allocate("00").unwrap();
    s.apply(Gate::H, &[q[0]]).unwrap();
    s.set_stage(Stage::Consume);
    s.apply(Gate::Cnot, &[q[0], q[1]]).unwrap();
    s.measure(q[1], qprecomp::sim::Basis::Z, &mut seeded(1))
        .unwrap();
    let (consume, prep) = GateCountLedger::split(s.log());
    assert_eq!((prep.clifford_1q, prep.clifford_2q, prep.depth), (1, 0, 1));
    assert_eq!(
        (consume.clifford_2q, consume.measurements, consume.depth),
        (1, 1, 2)
    );
    // q0 is idle in the measurement layer of the consume schedule.
    assert_eq!(consume.identity_ticks, 1);
    // q1 waits one prep layer.
    assert_eq!(prep.identity_ticks, 1);
}

#[test]
fn identity_ticks_start_at_allocation() {
    let mut s = DryRun::new();
    let a = s.allocate("0").unwrap()[0];
    s.apply(Gate::H, &[a]).unwrap();
    s.apply(Gate::H, &[a]).unwrap();
    let b = s.allocate("0").unwrap()[0];
    s.apply(Gate::H, &[b]).unwrap();
    let l = GateCountLedger::from_log(s.log(), Stage::Consume);
    // b is born at clock 2 and busy in layer 3; a idles in layer 3.
    assert_eq!(l.depth, 3);
    assert_eq!(l.identity_ticks, 1);
}

fn ledger_strategy() -> impl Strategy<Value = GateCountLedger> {
    prop::array::uniform7(0u64..1000).prop_map(|v| GateCountLedger {
        clifford_1q: v[0],
        clifford_2q: v[1],
        t_count: v[2],
        measurements: v[3],
        identity_ticks: v[4],
        depth: v[5],
        peak_width: v[6],
    })
}

proptest! {
    #[test]
    fn merge_is_a_commutative_monoid(a in ledger_strategy(), b in ledger_strategy(), c in ledger_strategy()) {
        prop_assert_eq!(a.merge(&b), b.merge(&a));
        prop_assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        prop_assert_eq!(a.merge(&GateCountLedger::zero()), a);
    }

    #[test]
    fn fit_recovers_planted_exponents(e in -3.0f64..4.0, c in 0.1f64..100.0) {
        let pts: Vec<(f64, f64)> = [2.0, 3.0, 5.0, 8.0, 13.0].iter().map(|&n: &f64| (n, c * n.powf(e))).collect();
        let fit = fit_scaling(&pts).unwrap();
        prop_assert!((fit.exponent - e).abs() < 1e-6);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-6);
        prop_assert!(fit.r_squared > 1.0 - 1e-9);
    }
}

#[test]
fn fit_examples() {
    let f = fit_scaling(&[(2.0, 4.0), (4.0, 16.0), (8.0, 64.0)]).unwrap();
    assert!((f.exponent - 2.0).abs() < 1e-9 && (f.r_squared - 1.0).abs() < 1e-12);
    let f = fit_scaling(&[(2.0, 2.0), (4.0, 4.0), (8.0, 8.0)]).unwrap();
    assert!((f.exponent - 1.0).abs() < 1e-9);
    let f = fit_scaling(&[(2.0, 5.0), (4.0, 5.0), (8.0, 5.0)]).unwrap();
    assert!(f.exponent.abs() < 1e-9);
    assert!((0.0..=1.0).contains(&f.r_squared));
    assert!(fit_scaling(&[(2.0, 4.0), (4.0, 0.0), (8.0, 1.0)]).is_err());
    assert!(fit_scaling(&[(2.0, 4.0), (4.0, 16.0)]).is_err());
}

/// Runs the decomposition on `amps` (gate qubits only) along the given
/// measurement branch and returns the output with global phase.
fn run_decomposition(j: usize, amps: &[Complex64], branch: u64) -> Option<Vec<Complex64>> {
    let dec = decompose_mcz(j);
    let mut s = Statevector::from_amplitudes(amps.to_vec()).unwrap();
    let q = s.live_qubits().to_vec();
    let mut forced = ForcedOutcomes::branch(branch, dec.ancillas);
    match dec.apply(&mut s, &q, &mut forced) {
        Ok(()) => {}
        Err(qprecomp::Error::ImpossibleBranch { .. }) => return None,
        Err(e) => panic!("{e}"),
    }
    assert_eq!(s.live_qubits(), &q[..], "ancillas must be gone");
    Some(s.amplitudes_with_phase())
}

#[test]
fn decompose_mcz_matches_dense_mcz() {
    let mut rng = seeded(3);
    for j in 1..=5usize {
        let diag = ZkElement::mcz(j, &(0..j).collect::<Vec<_>>())
            .unwrap()
            .to_diagonal()
            .unwrap();
        let dec = decompose_mcz(j);
        let mut inputs: Vec<Vec<Complex64>> = (0..1usize << j)
            .map(|b| {
                (0..1usize << j)
                    .map(|i| Complex64::new(f64::from(u8::from(i == b)), 0.0))
                    .collect()
            })
            .collect();
        inputs.extend((0..4).map(|_| random_amplitudes(j, &mut rng)));
        for amps in &inputs {
            let want: Vec<Complex64> = amps.iter().zip(&diag).map(|(a, d)| a * d).collect();
            for branch in 0..1u64 << dec.ancillas {
                if let Some(got) = run_decomposition(j, amps, branch) {
                    let err = got
                        .iter()
                        .zip(&want)
                        .map(|(x, y)| (x - y).norm())
                        .fold(0.0, f64::max);
                    assert!(err < 1e-10, "j={j} err={err}");
                }
            }
        }
    }
}

#[test]
fn decompose_mcz_t_counts() {
    let counts: Vec<usize> = (1..=5).map(|j| decompose_mcz(j).t_count()).collect();
    assert_eq!(&counts[..3], &[0, 0, 7]);
    assert!(counts[3] <= 16);
    assert!(counts[4] <= 24);
    for j in 3..12 {
        let d = decompose_mcz(j);
        assert!(d.t_count() <= 8 * (j - 2));
        assert_eq!(d.ancillas, if j == 3 { 0 } else { j - 2 });
    }
}

#[test]
fn standard_cost_examples() {
    assert_eq!(standard_cost_zk(&ZkElement::identity(3, 2)).active_ops(), 0);
    let l = standard_cost_zk(&ZkElement::mcz(2, &[0, 1]).unwrap());
    assert_eq!((l.clifford_2q, l.t_count), (1, 0));
    let mut rng = seeded(2);
    let pts: Vec<(f64, f64)> = (3..=8)
        .map(|n| {
            let ls: Vec<GateCountLedger> = (0..20)
                .map(|_| standard_cost_zk(&ZkElement::random(n, 2, &mut rng)))
                .collect();
            (n as f64, MeanLedger::of(&ls).active_ops())
        })
        .collect();
    let e = fit_scaling(&pts).unwrap().exponent;
    assert!((1.7..=2.3).contains(&e), "exponent {e}");
}

#[test]
fn clifford_prep_dominates_consume() {
    let mut rng = seeded(9);
    for n in 4..=6 {
        let c = random_clifford_circuit(n, 5 * n * n, &mut rng);
        let t = CliffordTableau::from_circuit(&c).unwrap();
        let r = prepare_gate_resource(DryRun::new(), &c, n, "U").unwrap();
        let out = gate_teleport(DryRun::with_qubits(n), r, Some(&t), &mut rng).unwrap();
        let (consume, prep) = GateCountLedger::split(out.state.log());
        assert!(prep.gate_complexity() >= consume.gate_complexity());
        let total = consume.clifford_1q + consume.clifford_2q + prep.clifford_1q + prep.clifford_2q;
        assert_eq!(total, out.state.log().gate_events());
    }
}

#[test]
fn table_windows_at_desk_scale() {
    let cfg = |k, a, n_values| Table1Config {
        n_values,
        k,
        a,
        trials: 20,
        seed: 5,
        max_exact_width: 0,
    };
    let clifford = table1_report(&cfg(0, 0, (2..=10).collect())).unwrap();
    let e = clifford.fit("consume.gate_complexity").unwrap().exponent;
    assert!((0.8..=1.2).contains(&e), "{e}");
    let e = clifford.fit("standard.active_ops").unwrap().exponent;
    assert!((1.7..=2.3).contains(&e), "{e}");
    assert!(clifford.rows.iter().all(|r| r.a == 0 && r.ledger_only));

    let zk = table1_report(&cfg(2, 1, (2..=8).collect())).unwrap();
    let e = zk.fit("consume.gate_complexity").unwrap().exponent;
    assert!((0.8..=1.2).contains(&e), "{e}");
    for r in &zk.rows {
        assert_eq!(r.resource_width, 2 * r.n);
    }
}

#[test]
fn exact_rows_are_verified() {
    let report = table1_report(&Table1Config {
        n_values: vec![2, 3, 4],
        k: 3,
        a: 1,
        trials: 3,
        seed: 1,
        max_exact_width: 12,
    })
    .unwrap();
    for r in report.rows_for(Phase::Consume) {
        assert!(!r.ledger_only);
        assert!(r.max_trace_distance.unwrap() < 1e-9);
    }
}

#[test]
fn csv_mirrors_rows() {
    let report = table1_report(&Table1Config {
        n_values: vec![2, 3, 4],
        k: 0,
        a: 0,
        trials: 2,
        seed: 1,
        max_exact_width: 9,
    })
    .unwrap();
    let csv = report.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), report.rows.len());
    for (line, row) in body.iter().zip(&report.rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), row.n);
        assert_eq!(fields[3], row.phase.name());
    }
    assert_eq!(report.to_csv().unwrap(), csv);
}

#[test]
fn table_rejects_bad_configs() {
    let mut cfg = Table1Config {
        n_values: vec![],
        k: 2,
        a: 1,
        trials: 1,
        seed: 0,
        max_exact_width: 0,
    };
    assert!(table1_report(&cfg).is_err());
    cfg.n_values = vec![3];
    cfg.a = 2;
    assert!(table1_report(&cfg).is_err());
}

#[test]
fn task_instance_inputs_are_disjoint() {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    assert!(TaskInstance::new(s(&["u"]), s(&["psi"]), s(&[]), s(&["U psi"])).is_ok());
    assert!(TaskInstance::new(s(&["u"]), s(&["u"]), s(&[]), s(&[])).is_err());
    let t = TaskInstance::zk(&ZkElement::mcz(2, &[0, 1]).unwrap(), 1);
    assert!(t.early.iter().all(|e| !t.late.contains(e)));
}

use qprecomp::algebra::dense;
use qprecomp::algebra::random::{
    default_clifford_length, random_amplitudes, random_clifford_circuit, random_product_state,
};
use qprecomp::algebra::{CliffordTableau, ZkElement, MAX_ZK_QUBITS};
use qprecomp::cost::{
    exact_width, table1_report, GateCountLedger, MeanLedger, Table1Config, Table1Report,
};
use qprecomp::dme::{error_sweep, random_sweep_inputs, DmeConfig, SweepRow, BUDGET_CONSTANT};
use qprecomp::protocol::{default_stop_level, precompute_resource, validate_stop_level, RunRecord};
use qprecomp::rng::trial_rng;
use qprecomp::selftest::{run_selftest, Check, Fault};
use qprecomp::sim::{pure_trace_distance, Backend, Circuit, DryRun, Statevector};
use qprecomp::teleport::{gate_teleport, prepare_gate_resource};
use serde::Serialize;

use crate::args::{CostTableArgs, DmeSweepArgs, Format, SelftestArgs, TeleportArgs, ZkRunArgs};
use crate::envelope::Envelope;
use crate::output::{check_target, csv, emit, json};
use crate::Exit;

/// Teleported output must match direct application this closely.
pub const TELEPORT_TOLERANCE: f64 = 1e-10;
/// Protocol output must match direct application this closely.
pub const ZK_TOLERANCE: f64 = 1e-9;
/// Exact cost-table rows must match direct application this closely.
pub const TABLE_TOLERANCE: f64 = 1e-9;
/// Sweep errors at or below this are floating-point noise and are not fitted.
const ROUNDOFF: f64 = 1e-12;

fn usage(msg: impl Into<String>) -> Exit {
    Exit::Usage(msg.into())
}

/// Decides between exact and ledger-only runs.
fn exact_or_warn(fits: bool, require_verify: bool, what: &str) -> Result<bool, Exit> {
    match (fits, require_verify) {
        (true, _) => Ok(true),
        (false, true) => Err(usage(format!(
            "{what} exceeds the verification envelope and --require-verify is set"
        ))),
        (false, false) => {
            eprintln!("warning: {what} exceeds the verification envelope; running ledger-only");
            Ok(false)
        }
    }
}

#[derive(Debug, Serialize)]
struct TeleportRun {
    trial: usize,
    byproduct: String,
    trace_distance: Option<f64>,
    consume: GateCountLedger,
    prep: GateCountLedger,
}

#[derive(Debug, Serialize)]
struct TeleportReport {
    n: usize,
    trials: usize,
    seed: u64,
    identity: bool,
    ledger_only: bool,
    verified: Option<bool>,
    max_trace_distance: Option<f64>,
    consume: MeanLedger,
    prep: MeanLedger,
    runs: Vec<TeleportRun>,
}

fn teleport_trial<B: Backend>(
    state: B,
    input: B,
    circuit: &Circuit,
    tableau: &CliffordTableau,
    rng: &mut qprecomp::rng::SimRng,
) -> Result<(B, Vec<qprecomp::sim::Qubit>, String), Exit> {
    let resource = prepare_gate_resource(state, circuit, circuit.width, "U")?;
    let out = gate_teleport(input, resource, Some(tableau), rng)?;
    Ok((out.state, out.qubits, out.byproduct.to_string()))
}

pub fn teleport(args: &TeleportArgs, envelope: &Envelope) -> Result<(), Exit> {
    if args.n == 0 || args.n > MAX_ZK_QUBITS {
        return Err(usage(format!(
            "--n must be in 1..={MAX_ZK_QUBITS}, got {}",
            args.n
        )));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    check_target(args.output.out.as_deref(), args.output.force)?;
    let exact = exact_or_warn(
        args.n <= envelope.teleport.max_n,
        args.require_verify,
        &format!("n = {}", args.n),
    )?;

    let n = args.n;
    let mut runs = Vec::with_capacity(args.trials);
    for trial in 0..args.trials {
        let mut rng = trial_rng(args.seed, trial as u64);
        let circuit = if args.identity {
            Circuit::new(n)
        } else {
            random_clifford_circuit(n, default_clifford_length(n), &mut rng)
        };
        let tableau = CliffordTableau::from_circuit(&circuit)?;
        let input = random_product_state(n, &mut rng)?;
        let (log, byproduct, trace_distance) = if exact {
            let want = dense::apply_to(&dense::circuit_unitary(&circuit)?, input.amplitudes());
            let (state, qubits, byproduct) =
                teleport_trial(Statevector::new(), input, &circuit, &tableau, &mut rng)?;
            let got = state.amplitudes_in_order(&qubits)?;
            (
                state.log().clone(),
                byproduct,
                Some(pure_trace_distance(&got, &want)?),
            )
        } else {
            let (state, _, byproduct) = teleport_trial(
                DryRun::new(),
                DryRun::with_qubits(n),
                &circuit,
                &tableau,
                &mut rng,
            )?;
            (state.log().clone(), byproduct, None)
        };
        let (consume, prep) = GateCountLedger::split(&log);
        runs.push(TeleportRun {
            trial,
            byproduct,
            trace_distance,
            consume,
            prep,
        });
    }

    let max_trace_distance = exact.then(|| {
        runs.iter()
            .filter_map(|r| r.trace_distance)
            .fold(0.0, f64::max)
    });
    let verified = max_trace_distance.map(|d| d <= TELEPORT_TOLERANCE);
    let consume: Vec<GateCountLedger> = runs.iter().map(|r| r.consume).collect();
    let prep: Vec<GateCountLedger> = runs.iter().map(|r| r.prep).collect();
    let report = TeleportReport {
        n,
        trials: args.trials,
        seed: args.seed,
        identity: args.identity,
        ledger_only: !exact,
        verified,
        max_trace_distance,
        consume: MeanLedger::of(&consume),
        prep: MeanLedger::of(&prep),
        runs,
    };
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .runs
                .iter()
                .map(|r| {
                    vec![
                        r.trial.to_string(),
                        r.byproduct.clone(),
                        opt(r.trace_distance),
                        r.consume.gate_complexity().to_string(),
                        r.consume.depth.to_string(),
                        r.prep.gate_complexity().to_string(),
                        r.prep.depth.to_string(),
                    ]
                })
                .collect();
            csv(
                &[
                    "trial",
                    "byproduct",
                    "trace_distance",
                    "consume_gates",
                    "consume_depth",
                    "prep_gates",
                    "prep_depth",
                ],
                &rows,
            )?
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    match (verified, max_trace_distance) {
        (Some(false), Some(d)) => Err(Exit::Failed(format!(
            "max trace distance {d:e} exceeds {TELEPORT_TOLERANCE:e}"
        ))),
        _ => Ok(()),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|d| d.to_string()).unwrap_or_default()
}

#[derive(Debug, Serialize)]
struct ZkRunReport {
    n: usize,
    k: usize,
    a: usize,
    seed: u64,
    trials: usize,
    ledger_only: bool,
    verified: Option<bool>,
    max_trace_distance: Option<f64>,
    runs: Vec<RunRecord>,
}

pub fn zk_run(args: &ZkRunArgs, envelope: &Envelope) -> Result<(), Exit> {
    let (n, k) = (args.n, args.k);
    let a = args.a.unwrap_or_else(|| default_stop_level(k));
    if !(1 <= a && a < k && k <= n) {
        return Err(usage(format!(
            "zk-run needs 1 ≤ a < k ≤ n, got n={n}, k={k}, a={a}"
        )));
    }
    if n > MAX_ZK_QUBITS {
        return Err(usage(format!(
            "--n must be at most {MAX_ZK_QUBITS}, got {n}"
        )));
    }
    validate_stop_level(k, a).map_err(|e| usage(e.to_string()))?;
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    check_target(args.output.out.as_deref(), args.output.force)?;
    let width = exact_width(n, k, a);
    let exact = exact_or_warn(
        width <= envelope.zk_run.max_width,
        args.require_verify,
        &format!("width {width} for (n, k, a) = ({n}, {k}, {a})"),
    )?;

    let mut runs = Vec::with_capacity(args.trials);
    for trial in 0..args.trials {
        let mut rng = trial_rng(args.seed, trial as u64);
        let u = ZkElement::random(n, k, &mut rng);
        let record = if exact {
            let amps = random_amplitudes(n, &mut rng);
            let want = dense::apply_to(&dense::diagonal(&u.to_diagonal()?), &amps);
            let mut resource = precompute_resource(Statevector::new(), &u, a)?;
            let result = resource.consume(Statevector::from_amplitudes(amps)?, &mut rng)?;
            let got = result.state.amplitudes_in_order(&result.qubits)?;
            let d = pure_trace_distance(&got, &want)?;
            RunRecord::new(&u, a, args.seed, &result, Some(d))
        } else {
            let mut resource = precompute_resource(DryRun::new(), &u, a)?;
            let result = resource.consume(DryRun::with_qubits(n), &mut rng)?;
            RunRecord::new(&u, a, args.seed, &result, None)
        };
        runs.push(record);
    }

    let max_trace_distance = exact.then(|| {
        runs.iter()
            .filter_map(|r| r.trace_distance_to_direct)
            .fold(0.0, f64::max)
    });
    let level_ok = runs.iter().all(|r| r.residual_level <= k - a);
    let verified = max_trace_distance.map(|d| d <= ZK_TOLERANCE && level_ok);
    let report = ZkRunReport {
        n,
        k,
        a,
        seed: args.seed,
        trials: args.trials,
        ledger_only: !exact,
        verified,
        max_trace_distance,
        runs,
    };
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .runs
                .iter()
                .enumerate()
                .map(|(trial, r)| {
                    vec![
                        trial.to_string(),
                        r.u.clone(),
                        r.residual.clone(),
                        r.residual_level.to_string(),
                        r.final_pauli.clone(),
                        r.classical_op_count.to_string(),
                        opt(r.trace_distance_to_direct),
                        r.consume_ledger.gate_complexity().to_string(),
                        r.consume_ledger.depth.to_string(),
                        r.prep_ledger.gate_complexity().to_string(),
                    ]
                })
                .collect();
            csv(
                &[
                    "trial",
                    "u",
                    "residual",
                    "residual_level",
                    "final_pauli",
                    "classical_ops",
                    "trace_distance",
                    "consume_gates",
                    "consume_depth",
                    "prep_gates",
                ],
                &rows,
            )?
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    if !level_ok {
        return Err(Exit::Failed(format!(
            "a residual exceeded level k − a = {}",
            k - a
        )));
    }
    match max_trace_distance {
        Some(d) if d > ZK_TOLERANCE => Err(Exit::Failed(format!(
            "max trace distance {d:e} exceeds {ZK_TOLERANCE:e}"
        ))),
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct SweepFit {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    n: usize,
    t: f64,
    seed: u64,
    probes: usize,
    budget_constant: f64,
    eps: Option<f64>,
    /// `⌈C·t²/ε⌉` for the requested accuracy.
    m_for_eps: Option<usize>,
    rows: Vec<SweepRow>,
    /// Power law of mean error in `m`; absent when some error is round-off.
    fit: Option<SweepFit>,
}

pub fn dme_sweep(args: &DmeSweepArgs, envelope: &Envelope) -> Result<(), Exit> {
    if args.n == 0 || args.n > envelope.dme_sweep.max_n {
        return Err(usage(format!(
            "--n must be in 1..={}, got {}",
            envelope.dme_sweep.max_n, args.n
        )));
    }
    if !args.t.is_finite() {
        return Err(usage(format!("--t must be finite, got {}", args.t)));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if args.m.is_empty() || args.m.contains(&0) {
        return Err(usage("--m needs positive copy counts"));
    }
    let m_for_eps = match args.eps {
        Some(eps) => Some(
            DmeConfig::for_accuracy(args.t, eps, BUDGET_CONSTANT)
                .map_err(|e| usage(e.to_string()))?
                .m,
        ),
        None => None,
    };
    check_target(args.output.out.as_deref(), args.output.force)?;

    let (rho, probes) = random_sweep_inputs(args.n, args.trials, args.seed)?;
    let table = error_sweep(&rho, args.t, &args.m, &probes, args.seed)?;
    let text = match args.output.format {
        Format::Csv => table.to_csv()?,
        Format::Json => {
            let fit = if args.m.len() >= 3 && table.rows.iter().all(|r| r.mean_error > ROUNDOFF) {
                table.fit().ok().map(|f| SweepFit {
                    slope: f.exponent,
                    intercept: f.intercept,
                    r_squared: f.r_squared,
                })
            } else {
                None
            };
            json(&SweepSummary {
                n: args.n,
                t: args.t,
                seed: args.seed,
                probes: args.trials,
                budget_constant: BUDGET_CONSTANT,
                eps: args.eps,
                m_for_eps,
                rows: table.rows,
                fit,
            })?
        }
    };
    emit(args.output.out.as_deref(), &text)
}

pub fn cost_table(args: &CostTableArgs, envelope: &Envelope) -> Result<(), Exit> {
    let k = args.k;
    let a = args
        .a
        .unwrap_or(if k == 0 { 0 } else { default_stop_level(k) });
    if k == 0 && a != 0 {
        return Err(usage("Clifford rows (k = 0) take a = 0"));
    }
    if k > 0 {
        validate_stop_level(k, a).map_err(|e| usage(e.to_string()))?;
    }
    if args.n.lo == 0 || args.n.hi > MAX_ZK_QUBITS {
        return Err(usage(format!(
            "sizes must lie in 1..={MAX_ZK_QUBITS}, got {}",
            args.n
        )));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    check_target(args.output.out.as_deref(), args.output.force)?;
    let max_width = envelope.cost_table.max_width;
    if let Some(first) = args
        .n
        .values()
        .into_iter()
        .find(|&n| exact_width(n, k, a) > max_width)
    {
        exact_or_warn(
            false,
            args.require_verify,
            &format!("n ≥ {first} (width {})", exact_width(first, k, a)),
        )?;
    }

    let report: Table1Report = table1_report(&Table1Config {
        n_values: args.n.values(),
        k,
        a,
        trials: args.trials,
        seed: args.seed,
        max_exact_width: max_width,
    })?;
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => report.to_csv()?,
    };
    emit(args.output.out.as_deref(), &text)?;
    let worst = report
        .rows
        .iter()
        .filter_map(|r| r.max_trace_distance)
        .fold(0.0, f64::max);
    if worst > TABLE_TOLERANCE {
        return Err(Exit::Failed(format!(
            "exact row trace distance {worst:e} exceeds {TABLE_TOLERANCE:e}"
        )));
    }
    Ok(())
}

pub fn selftest(args: &SelftestArgs) -> Result<(), Exit> {
    check_target(args.out.as_deref(), args.force)?;
    let fault = if args.inject_fault {
        Fault::CorruptDestinationTable
    } else {
        Fault::None
    };
    let checks: Vec<Check> = run_selftest(fault);
    for c in &checks {
        if c.passed {
            println!("PASS {}: {}", c.name, c.detail);
        } else {
            eprintln!("FAIL {}: {}", c.name, c.detail);
        }
    }
    if let Some(path) = args.out.as_deref() {
        emit(Some(path), &json(&checks)?)?;
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Exit::Failed(format!(
            "selftest failed: {}",
            failed.join(", ")
        )))
    }
}

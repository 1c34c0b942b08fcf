use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    count_circuit, fit_scaling, standard_cost_zk, GateCountLedger, MeanLedger, ScalingFit,
};
use crate::algebra::dense;
use crate::algebra::random::{
    default_clifford_length, random_clifford_circuit, random_product_state,
};
use crate::algebra::{CliffordTableau, ZkElement};
use crate::error::{Error, Result};
use crate::protocol::precompute_resource;
use crate::rng::trial_rng;
use crate::sim::{pure_trace_distance, Backend, DryRun, Statevector};
use crate::teleport::{gate_teleport, prepare_gate_resource};

pub const CSV_HEADER: [&str; 12] = [
    "n",
    "k",
    "a",
    "phase",
    "clifford1q",
    "clifford2q",
    "t",
    "meas",
    "idticks",
    "depth",
    "peak_width",
    "classical_ops",
];

/// Which cost a row reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Applying the unitary directly as a circuit.
    Standard,
    /// Consuming the resource once the input arrives.
    Consume,
    /// Building the resource.
    Prep,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Standard, Phase::Consume, Phase::Prep];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Standard => "standard",
            Phase::Consume => "consume",
            Phase::Prep => "prep",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a cost table measures.
///
/// `k = 0` selects Clifford gate teleportation (reported with `a = 0`);
/// `k ≥ 1` selects the `Z^(k)` protocol stopping at level `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Config {
    pub n_values: Vec<usize>,
    pub k: usize,
    pub a: usize,
    pub trials: usize,
    pub seed: u64,
    /// Rows needing more simulated qubits than this run ledger-only.
    pub max_exact_width: usize,
}

/// Mean costs of one phase at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub k: usize,
    pub a: usize,
    pub phase: Phase,
    pub ledger: MeanLedger,
    pub gate_complexity: f64,
    pub classical_ops: f64,
    pub resource_width: usize,
    pub ledger_only: bool,
    /// Largest trace distance to direct application over exact trials.
    pub max_trace_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub config: Table1Config,
    pub rows: Vec<Table1Row>,
    /// Power-law fits over `n`, keyed `phase.column`.
    pub fits: BTreeMap<String, ScalingFit>,
}

impl Table1Report {
    pub fn rows_for(&self, phase: Phase) -> impl Iterator<Item = &Table1Row> {
        self.rows.iter().filter(move |r| r.phase == phase)
    }

    pub fn fit(&self, key: &str) -> Option<&ScalingFit> {
        self.fits.get(key)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            let l = &r.ledger;
            w.write_record([
                r.n.to_string(),
                r.k.to_string(),
                r.a.to_string(),
                r.phase.to_string(),
                l.clifford_1q.to_string(),
                l.clifford_2q.to_string(),
                l.t_count.to_string(),
                l.measurements.to_string(),
                l.identity_ticks.to_string(),
                l.depth.to_string(),
                l.peak_width.to_string(),
                r.classical_ops.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }
}

struct Trial {
    standard: GateCountLedger,
    consume: GateCountLedger,
    prep: GateCountLedger,
    classical_ops: u64,
    resource_width: usize,
    distance: Option<f64>,
}

/// Clifford gate teleportation through a random length-`5n²` circuit.
fn clifford_trial(n: usize, exact: bool, rng: &mut crate::rng::SimRng) -> Result<Trial> {
    let circuit = random_clifford_circuit(n, default_clifford_length(n), rng);
    let tableau = CliffordTableau::from_circuit(&circuit)?;
    let (consume, prep, byproduct, distance) = if exact {
        let input = random_product_state(n, rng)?;
        let amps = input.amplitudes().to_vec();
        let resource = prepare_gate_resource(Statevector::new(), &circuit, n, "U")?;
        let out = gate_teleport(input, resource, Some(&tableau), rng)?;
        let got = out.state.amplitudes_in_order(&out.qubits)?;
        let want = dense::apply_to(&dense::circuit_unitary(&circuit)?, &amps);
        let (c, p) = GateCountLedger::split(out.state.log());
        (c, p, out.byproduct, Some(pure_trace_distance(&got, &want)?))
    } else {
        let resource = prepare_gate_resource(DryRun::new(), &circuit, n, "U")?;
        let out = gate_teleport(DryRun::with_qubits(n), resource, Some(&tableau), rng)?;
        let (c, p) = GateCountLedger::split(out.state.log());
        (c, p, out.byproduct, None)
    };
    // Each set byproduct bit XORs one 2n-bit tableau row into the correction.
    let rows = byproduct
        .x_bits()
        .iter()
        .chain(byproduct.z_bits())
        .filter(|&&b| b)
        .count();
    Ok(Trial {
        standard: count_circuit(&circuit),
        consume,
        prep,
        classical_ops: (rows * 2 * n) as u64,
        resource_width: 2 * n,
        distance,
    })
}

fn zk_trial(
    n: usize,
    k: usize,
    a: usize,
    exact: bool,
    rng: &mut crate::rng::SimRng,
) -> Result<Trial> {
    let u = ZkElement::random(n, k, rng);
    let standard = standard_cost_zk(&u);
    if exact {
        let input = random_product_state(n, rng)?;
        let amps = input.amplitudes().to_vec();
        let mut resource = precompute_resource(Statevector::new(), &u, a)?;
        let width = resource.total_width();
        let res = resource.consume(input, rng)?;
        let got = res.state.amplitudes_in_order(&res.qubits)?;
        let diag = u.to_diagonal()?;
        let want: Vec<_> = amps.iter().zip(diag).map(|(x, d)| x * d).collect();
        Ok(Trial {
            standard,
            consume: res.consume_ledger,
            prep: res.prep_ledger,
            classical_ops: res.classical_op_count,
            resource_width: width,
            distance: Some(pure_trace_distance(&got, &want)?),
        })
    } else {
        let mut resource = precompute_resource(DryRun::new(), &u, a)?;
        let width = resource.total_width();
        let res = resource.consume(DryRun::with_qubits(n), rng)?;
        Ok(Trial {
            standard,
            consume: res.consume_ledger,
            prep: res.prep_ledger,
            classical_ops: res.classical_op_count,
            resource_width: width,
            distance: None,
        })
    }
}

/// Simulated qubits an exact row needs at its widest point.
pub fn exact_width(n: usize, k: usize, a: usize) -> usize {
    if k == 0 || a <= 1 {
        3 * n
    } else {
        6 * n
    }
}

/// Mean standard, consume and prep ledgers per `n`, with power-law fits.
///
/// Trial `t` at size `n` draws from `trial_rng(seed, n · 2^32 + t)`.
/// A fitted column: its key and how to read it off a row.
type Column = (&'static str, fn(&Table1Row) -> f64);

pub fn table1_report(config: &Table1Config) -> Result<Table1Report> {
    if config.n_values.is_empty() {
        return Err(Error::InvalidArgument("no sizes requested".into()));
    }
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (k, a) = (config.k, if config.k == 0 { 0 } else { config.a });
    if k > 0 {
        crate::protocol::validate_stop_level(k, a)?;
    }
    let mut rows = Vec::new();
    for &n in &config.n_values {
        if n == 0 {
            return Err(Error::InvalidArgument("sizes must be positive".into()));
        }
        let exact = exact_width(n, k, a) <= config.max_exact_width;
        let mut trials = Vec::with_capacity(config.trials);
        for t in 0..config.trials as u64 {
            let mut rng = trial_rng(config.seed, ((n as u64) << 32) | t);
            trials.push(if k == 0 {
                clifford_trial(n, exact, &mut rng)?
            } else {
                zk_trial(n, k, a, exact, &mut rng)?
            });
        }
        let count = trials.len() as f64;
        let classical_ops = trials.iter().map(|t| t.classical_ops as f64).sum::<f64>() / count;
        let resource_width = trials.iter().map(|t| t.resource_width).max().unwrap_or(0);
        let max_distance = trials.iter().filter_map(|t| t.distance).reduce(f64::max);
        for phase in Phase::ALL {
            let ledgers: Vec<GateCountLedger> = trials
                .iter()
                .map(|t| match phase {
                    Phase::Standard => t.standard,
                    Phase::Consume => t.consume,
                    Phase::Prep => t.prep,
                })
                .collect();
            let gate_complexity = ledgers
                .iter()
                .map(|l| l.gate_complexity() as f64)
                .sum::<f64>()
                / count;
            rows.push(Table1Row {
                n,
                k,
                a,
                phase,
                ledger: MeanLedger::of(&ledgers),
                gate_complexity,
                classical_ops: if phase == Phase::Consume {
                    classical_ops
                } else {
                    0.0
                },
                resource_width,
                ledger_only: !exact,
                max_trace_distance: if phase == Phase::Consume {
                    max_distance
                } else {
                    None
                },
            });
        }
    }
    let mut fits = BTreeMap::new();
    for phase in Phase::ALL {
        let rs: Vec<&Table1Row> = rows.iter().filter(|r| r.phase == phase).collect();
        let columns: [Column; 3] = [
            ("gate_complexity", |r| r.gate_complexity),
            ("active_ops", |r| r.ledger.active_ops()),
            ("depth", |r| r.ledger.depth),
        ];
        for (name, f) in columns {
            let pts: Vec<(f64, f64)> = rs.iter().map(|r| (r.n as f64, f(r))).collect();
            if let Ok(fit) = fit_scaling(&pts) {
                fits.insert(format!("{phase}.{name}"), fit);
            }
        }
    }
    let consume: Vec<&Table1Row> = rows.iter().filter(|r| r.phase == Phase::Consume).collect();
    let extra: [Column; 2] = [
        ("classical_ops", |r| r.classical_ops),
        ("resource_width", |r| r.resource_width as f64),
    ];
    for (name, f) in extra {
        let pts: Vec<(f64, f64)> = consume.iter().map(|r| (r.n as f64, f(r))).collect();
        if let Ok(fit) = fit_scaling(&pts) {
            fits.insert(name.to_string(), fit);
        }
    }
    Ok(Table1Report {
        config: config.clone(),
        rows,
        fits,
    })
}

/// Split of a task's data by when it becomes available.
///
/// `early` is known while the resource is prepared, `late` arrives with the
/// input. Outputs are split into classical results and quantum states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub early: Vec<String>,
    pub late: Vec<String>,
    pub classical_outputs: Vec<String>,
    pub quantum_outputs: Vec<String>,
}

impl TaskInstance {
    pub fn new(
        early: Vec<String>,
        late: Vec<String>,
        classical_outputs: Vec<String>,
        quantum_outputs: Vec<String>,
    ) -> Result<Self> {
        if let Some(shared) = early.iter().find(|e| late.contains(e)) {
            return Err(Error::InvalidArgument(format!(
                "{shared:?} is both early and late input"
            )));
        }
        Ok(Self {
            early,
            late,
            classical_outputs,
            quantum_outputs,
        })
    }

    /// Applying `u` to a state that arrives later.
    pub fn zk(u: &ZkElement, a: usize) -> Self {
        Self {
            early: vec![format!("u={u}"), format!("a={a}")],
            late: vec![format!("psi[{}]", u.num_qubits())],
            classical_outputs: vec!["transcript".into()],
            quantum_outputs: vec![format!("U psi[{}]", u.num_qubits())],
        }
    }
}

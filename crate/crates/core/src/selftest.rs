//! Built-in consistency checks shared by the CLI `selftest` command and the
//! acceptance suite.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{dense, ZkElement};
use crate::dme::{calibrate_budget_constant, BUDGET_CONSTANT, CALIBRATION_SEED};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::teleport::tables::{verify_tables, ByproductTable, DESTINATION_TABLE, SOURCE_TABLE};

/// Widest element checked densely by [`commutation_suite`].
pub const DENSE_SUITE_QUBITS: usize = 4;

/// Results of [`commutation_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub trials: usize,
    /// Trials whose `G'` had level above `k − 1` or above `level(G) − 1`.
    pub level_violations: usize,
    pub dense_trials: usize,
    /// Largest entry error over `X_s G X_s G† = G'` and `G X_s = X_s G' G`.
    pub max_dense_error: f64,
}

impl CommutationReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.level_violations == 0 && self.max_dense_error <= tol
    }
}

/// Random `(G, s)` with `n ≤ max_n`, `k ≤ max_k`: checks the level drop of
/// `G' = X_s G X_s G†` and, for `n ≤ 4`, both identities as dense matrices.
pub fn commutation_suite(
    trials: usize,
    max_n: usize,
    max_k: usize,
    seed: u64,
) -> Result<CommutationReport> {
    if max_n == 0 || max_k == 0 {
        return Err(Error::InvalidArgument(
            "suite needs max_n ≥ 1 and max_k ≥ 1".into(),
        ));
    }
    let mut rng = seeded(seed);
    let mut report = CommutationReport {
        trials,
        level_violations: 0,
        dense_trials: 0,
        max_dense_error: 0.0,
    };
    for _ in 0..trials {
        let n = rng.random_range(1..=max_n);
        let k = rng.random_range(1..=max_k);
        let g = ZkElement::random(n, k, &mut rng);
        let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        let (xs, gp, _) = g.commute_x_left(&s)?;
        if gp.level() > k - 1 || gp.level() > g.level().saturating_sub(1) {
            report.level_violations += 1;
        }
        if n <= DENSE_SUITE_QUBITS {
            let mx = dense::pauli_matrix(&xs)?;
            let mg = dense::diagonal(&g.to_diagonal()?);
            let mgp = dense::diagonal(&gp.to_diagonal()?);
            let conj = dense::max_abs_diff(&(&mx * &mg * &mx * mg.adjoint()), &mgp);
            let split = dense::max_abs_diff(&(&mg * &mx), &(&mx * &mgp * &mg));
            report.dense_trials += 1;
            report.max_dense_error = report.max_dense_error.max(conj).max(split);
        }
    }
    Ok(report)
}

/// One named selftest outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Corruption applied before checking, to prove the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flips one Z bit of the frozen destination table.
    CorruptDestinationTable,
}

fn corrupted(table: &ByproductTable) -> ByproductTable {
    let mut t = *table;
    t[0][1].1 ^= 1;
    t
}

/// Runs every check; none short-circuits.
pub fn run_selftest(fault: Fault) -> Vec<Check> {
    let mut checks = Vec::new();
    let destination = match fault {
        Fault::None => DESTINATION_TABLE,
        Fault::CorruptDestinationTable => corrupted(&DESTINATION_TABLE),
    };
    checks.push(match verify_tables(&destination, &SOURCE_TABLE) {
        Ok(()) => check(
            "byproduct tables",
            true,
            "frozen tables match simulation".into(),
        ),
        Err(e) => check("byproduct tables", false, e.to_string()),
    });
    checks.push(match commutation_suite(1000, 5, 4, 1) {
        Ok(r) => check(
            "commutation suite",
            r.passed(1e-12),
            format!(
                "{} trials, {} level violations, max dense error {:.2e} over {} dense trials",
                r.trials, r.level_violations, r.max_dense_error, r.dense_trials
            ),
        ),
        Err(e) => check("commutation suite", false, e.to_string()),
    });
    checks.push(match calibrate_budget_constant(CALIBRATION_SEED) {
        Ok(c) => check(
            "dme calibration",
            c == BUDGET_CONSTANT,
            format!("calibrated C = {c}, frozen C = {BUDGET_CONSTANT}"),
        ),
        Err(e) => check("dme calibration", false, e.to_string()),
    });
    checks
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

//! Gate-count ledgers, the frozen multi-controlled Z decomposition, scaling
//! fits and the standard-versus-precomputation cost table.

mod fit;
mod ledger;
mod mcz;
mod table1;

use crate::algebra::ZkElement;

pub use fit::{fit_scaling, ScalingFit};
pub use ledger::{count_circuit, GateCountLedger, MeanLedger};
pub use mcz::{decompose_mcz, DecompStep, MczDecomposition};
pub use table1::{
    exact_width, table1_report, Phase, Table1Config, Table1Report, Table1Row, TaskInstance,
    CSV_HEADER,
};

/// Cost of applying `u` directly as a circuit, with storage ticks.
pub fn standard_cost_zk(u: &ZkElement) -> GateCountLedger {
    count_circuit(&u.to_circuit().0)
}

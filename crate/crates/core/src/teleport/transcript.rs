use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Choice;
use crate::algebra::PauliString;
use crate::error::{Error, Result};
use crate::sim::{Basis, MeasurementOutcome, Qubit};

/// Classical record of a run: measurement outcomes, inferred byproducts and
/// selection bits, each in execution order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub outcomes: Vec<MeasurementOutcome>,
    pub byproducts: Vec<PauliString>,
    pub choices: Vec<u8>,
}

impl Transcript {
    pub(crate) fn record(
        &mut self,
        outcomes: &[MeasurementOutcome],
        choice: Option<Choice>,
        byproducts: &[PauliString],
    ) {
        self.outcomes.extend_from_slice(outcomes);
        self.choices.extend(choice.map(Choice::bit));
        self.byproducts.extend_from_slice(byproducts);
    }

    /// Line-oriented text form: `qubit,basis,bit` per outcome, one Pauli text
    /// form per byproduct, and `c,bit` per choice.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.outcomes {
            let _ = writeln!(out, "{},{},{}", m.qubit, m.basis, m.bit);
        }
        for p in &self.byproducts {
            let _ = writeln!(out, "{p}");
        }
        for c in &self.choices {
            let _ = writeln!(out, "c,{c}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Transcript::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(bit) = line.strip_prefix("c,") {
                t.choices.push(parse_bit(bit)?);
            } else if line.starts_with('q') {
                let parts: Vec<&str> = line.split(',').collect();
                let [qubit, basis, bit] = parts[..] else {
                    return Err(Error::Parse(format!("bad outcome line {line:?}")));
                };
                t.outcomes.push(MeasurementOutcome {
                    qubit: qubit.parse::<Qubit>()?,
                    basis: basis.parse::<Basis>()?,
                    bit: parse_bit(bit)?,
                });
            } else {
                t.byproducts.push(PauliString::parse(line)?);
            }
        }
        Ok(t)
    }
}

fn parse_bit(s: &str) -> Result<u8> {
    match s {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => Err(Error::Parse(format!("bad bit {s:?}"))),
    }
}

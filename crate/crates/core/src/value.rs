use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::stats::McEstimate;

/// How a correlator value was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    MonteCarlo { stderr: f64, samples: u64, seed: u64 },
    ExactIntegral { formula: String, method: String },
    Oracle,
    ClosedForm { formula: String },
}

/// A correlator value on the monic normalization, with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorValue {
    #[serde(with = "crate::complex_serde")]
    pub value: Complex64,
    pub provenance: Provenance,
}

impl CorrelatorValue {
    pub fn oracle(value: Complex64) -> Self {
        Self {
            value,
            provenance: Provenance::Oracle,
        }
    }

    pub fn exact(value: Complex64, formula: &str, method: &str) -> Self {
        Self {
            value,
            provenance: Provenance::ExactIntegral {
                formula: formula.to_string(),
                method: method.to_string(),
            },
        }
    }

    /// Standard error for Monte Carlo values, zero otherwise.
    pub fn stderr(&self) -> f64 {
        match self.provenance {
            Provenance::MonteCarlo { stderr, .. } => stderr,
            _ => 0.0,
        }
    }
}

impl From<McEstimate> for CorrelatorValue {
    fn from(e: McEstimate) -> Self {
        Self {
            value: e.mean,
            provenance: Provenance::MonteCarlo {
                stderr: e.stderr,
                samples: e.samples,
                seed: e.seed,
            },
        }
    }
}

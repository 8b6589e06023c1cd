//! GOE/GUE ensembles: sampling, Monte Carlo correlators and exact Wick oracles.

mod sampling;
mod wick;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sampling::{mc_correlator, sample_matrix};
pub use wick::{wick_oracle, wick_oracle_poly, wick_oracle_shifted, WICK_MAX_DIM, WICK_MAX_K};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Goe,
    Gue,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Goe => "goe",
            EnsembleKind::Gue => "gue",
        }
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "goe" => Ok(EnsembleKind::Goe),
            "gue" => Ok(EnsembleKind::Gue),
            other => Err(Error::invalid(format!("unknown ensemble `{other}`"))),
        }
    }
}

/// Ensemble kind, matrix dimension N, and an optional diagonal source `a_1..a_N`.
///
/// The law is `e^{−(N/2) tr X² + N tr AX}`, i.e. `X = A + X₀` with `X₀` centered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    kind: EnsembleKind,
    dim: usize,
    source: Option<Vec<f64>>,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize) -> Result<Self> {
        Self::with_source(kind, dim, None)
    }

    pub fn with_source(kind: EnsembleKind, dim: usize, source: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension N must be at least 1"));
        }
        if let Some(a) = &source {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("source eigenvalues must be finite"));
            }
        }
        Ok(Self { kind, dim, source })
    }

    pub fn goe(dim: usize) -> Result<Self> {
        Self::new(EnsembleKind::Goe, dim)
    }

    pub fn gue(dim: usize) -> Result<Self> {
        Self::new(EnsembleKind::Gue, dim)
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> Option<&[f64]> {
        self.source.as_deref()
    }

    /// The source eigenvalues, zeros when absent.
    pub fn source_or_zero(&self) -> Vec<f64> {
        self.source.clone().unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn without_source(&self) -> Self {
        Self {
            kind: self.kind,
            dim: self.dim,
            source: None,
        }
    }
}

/// The arguments `λ_1..λ_k`; repeated values are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoints {
    values: Vec<f64>,
}

impl LambdaPoints {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("at least one λ is required"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("λ values must be finite"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn all_equal(&self) -> bool {
        self.values.iter().all(|&x| x == self.values[0])
    }

    pub fn all_distinct(&self) -> bool {
        let v = &self.values;
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(EnsembleSpec::goe(0).is_err());
        assert!(EnsembleSpec::with_source(EnsembleKind::Gue, 2, Some(vec![1.0])).is_err());
        assert!(EnsembleSpec::with_source(EnsembleKind::Gue, 2, Some(vec![1.0, 2.0])).is_ok());
        assert_eq!("GOE".parse::<EnsembleKind>().unwrap(), EnsembleKind::Goe);
        assert!("gse".parse::<EnsembleKind>().is_err());
    }

    #[test]
    fn lambda_validation() {
        assert!(LambdaPoints::new(vec![]).is_err());
        assert!(LambdaPoints::new(vec![f64::INFINITY]).is_err());
        let l = LambdaPoints::new(vec![0.5, 0.5]).unwrap();
        assert!(l.all_equal() && !l.all_distinct());
    }
}

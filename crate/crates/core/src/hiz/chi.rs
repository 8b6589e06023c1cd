//! Correction factors χ of the symplectic HIZ integral for k = 2, 3, 4.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise variables `τ_ij = N(λ_i − λ_j)(t_i − t_j)`, stored for `i < j`
/// in lexicographic order. The table is symmetric: `τ_ji = τ_ij`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauTable {
    k: usize,
    #[serde(with = "crate::complex_serde::vec")]
    tau: Vec<Complex64>,
}

fn pair_index(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

impl TauTable {
    pub fn new(k: usize, tau: Vec<Complex64>) -> Result<Self> {
        if !(2..=4).contains(&k) {
            return Err(Error::invalid("τ tables exist for k ∈ {2, 3, 4}"));
        }
        if tau.len() != k * (k - 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: k * (k - 1) / 2,
                got: tau.len(),
            });
        }
        Ok(Self { k, tau })
    }

    /// `τ_ij = scale·(λ_i − λ_j)(t_i − t_j)`; the usual table has `scale = N`.
    pub fn from_points(scale: f64, ts: &[Complex64], lambdas: &[Complex64]) -> Result<Self> {
        if ts.len() != lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: lambdas.len(),
                got: ts.len(),
            });
        }
        let k = ts.len();
        let mut tau = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                tau.push(scale * (lambdas[i] - lambdas[j]) * (ts[i] - ts[j]));
            }
        }
        Self::new(k, tau)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.tau[pair_index(self.k, i, j)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.tau
    }

    /// The same table with every τ multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            k: self.k,
            tau: self.tau.iter().map(|t| t * s).collect(),
        }
    }
}

/// The appendix polynomial f for k = 4: coefficient groups over orbits of
/// τ-monomials. Each member lists 1-based index pairs; `""` is the constant.
pub const K4_F_GROUPS: &[((f64, f64), &[&str])] = &[
    ((1.0, 0.0), &[""]),
    ((0.0, -1.0 / 4.0), &["12", "13", "14", "23", "24", "34"]),
    (
        (-1.0 / 12.0, 0.0),
        &[
            "12 13", "12 14", "13 14", "12 23", "23 24", "12 24", "14 34", "14 24", "24 34", "23 34", "13 34", "13 23",
        ],
    ),
    ((-1.0 / 18.0, 0.0), &["12 34", "13 24", "14 23"]),
    ((0.0, 1.0 / 24.0), &["12 13 14", "12 23 24", "13 23 34", "14 24 34"]),
    (
        (0.0, 1.0 / 36.0),
        &[
            "12 13 23", "12 14 24", "13 14 34", "23 24 34", "14 34 23", "14 24 23", "12 24 34", "12 23 34", "12 14 23",
            "13 14 23", "12 13 34", "12 14 34", "13 34 24", "13 24 23", "14 24 13", "13 12 24",
        ],
    ),
    (
        (1.0 / 72.0, 0.0),
        &[
            "12 23 34 14", "12 13 24 34", "13 14 24 23", "12 14 24 34", "12 14 24 23", "12 14 24 13", "12 13 23 34",
            "12 13 23 14", "12 13 23 24", "12 24 23 34", "14 24 23 34", "13 24 23 34", "12 14 13 34", "14 13 23 34",
            "14 13 34 24",
        ],
    ),
    (
        (0.0, -1.0 / 144.0),
        &[
            "12 13 24 23 34", "12 14 24 13 23", "12 14 24 13 34", "14 13 24 23 34", "12 14 13 34 23", "12 14 24 23 34",
        ],
    ),
    ((-1.0 / 288.0, 0.0), &["12 13 14 23 24 34"]),
];

/// The k = 3 solution, term by term: coefficient and the pairs whose τ's divide.
pub const K3_TERMS: &[((f64, f64), &str)] = &[
    ((1.0, 0.0), ""),
    ((0.0, 2.0), "12"),
    ((0.0, 2.0), "23"),
    ((0.0, 2.0), "31"),
    ((-4.0, 0.0), "12 23"),
    ((-4.0, 0.0), "23 31"),
    ((-4.0, 0.0), "31 12"),
    ((0.0, -12.0), "12 23 31"),
];

fn parse_member(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split_whitespace()
        .map(|p| {
            let b = p.as_bytes();
            if b.len() != 2 || !(b'1'..=b'9').contains(&b[0]) || !(b'1'..=b'9').contains(&b[1]) || b[0] == b[1] {
                return Err(Error::invalid(format!("bad τ index pair `{p}`")));
            }
            Ok(((b[0] - b'1') as usize, (b[1] - b'1') as usize))
        })
        .collect()
}

/// How the listed τ-products enter χ.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Form {
    /// `χ = Σ c / ∏ τ`.
    Inverse,
    /// `χ = (Σ c ∏ τ) / (c_top ∏_{all pairs} τ)`.
    Numerator,
}

/// One coefficient shared by an orbit of τ-monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitGroup {
    pub coefficient: Complex64,
    pub members: Vec<Vec<(usize, usize)>>,
}

/// χ for a fixed k as a table of orbit groups. Coefficients can be perturbed
/// to build sensitivity controls.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiTable {
    k: usize,
    form: Form,
    groups: Vec<OrbitGroup>,
    divisor: Complex64,
}

impl ChiTable {
    pub fn standard(k: usize) -> Result<Self> {
        let cplx = |(re, im): (f64, f64)| Complex64::new(re, im);
        match k {
            2 => Ok(Self {
                k,
                form: Form::Inverse,
                groups: vec![
                    OrbitGroup {
                        coefficient: Complex64::new(1.0, 0.0),
                        members: vec![vec![]],
                    },
                    OrbitGroup {
                        coefficient: Complex64::new(0.0, 2.0),
                        members: vec![vec![(0, 1)]],
                    },
                ],
                divisor: Complex64::new(1.0, 0.0),
            }),
            3 => {
                let groups = K3_TERMS
                    .iter()
                    .map(|&(c, m)| {
                        Ok(OrbitGroup {
                            coefficient: cplx(c),
                            members: vec![parse_member(m)?],
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Self {
                    k,
                    form: Form::Inverse,
                    groups,
                    divisor: Complex64::new(1.0, 0.0),
                })
            }
            4 => {
                let groups: Vec<OrbitGroup> = K4_F_GROUPS
                    .iter()
                    .map(|&(c, ms)| {
                        Ok(OrbitGroup {
                            coefficient: cplx(c),
                            members: ms.iter().map(|m| parse_member(m)).collect::<Result<_>>()?,
                        })
                    })
                    .collect::<Result<_>>()?;
                let divisor = groups.last().map(|g| g.coefficient).unwrap_or_default();
                Ok(Self {
                    k,
                    form: Form::Numerator,
                    groups,
                    divisor,
                })
            }
            _ => Err(Error::invalid("χ is tabulated for k ∈ {2, 3, 4}")),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn groups(&self) -> &[OrbitGroup] {
        &self.groups
    }

    /// Multiplies the coefficient of one entry by `factor` (the k=4 divisor stays fixed).
    pub fn perturbed(&self, group: usize, factor: f64) -> Result<Self> {
        if group >= self.groups.len() {
            return Err(Error::invalid("no such coefficient group"));
        }
        let mut out = self.clone();
        out.groups[group].coefficient *= factor;
        Ok(out)
    }

    /// `f(τ)` for the numerator form, `Σ c/∏τ` for the inverse form.
    fn raw(&self, tau: &TauTable) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for g in &self.groups {
            let mut inner = Complex64::new(0.0, 0.0);
            for m in &g.members {
                let p = m.iter().fold(Complex64::new(1.0, 0.0), |acc, &(i, j)| acc * tau.get(i, j));
                inner += match self.form {
                    Form::Inverse => p.inv(),
                    Form::Numerator => p,
                };
            }
            sum += g.coefficient * inner;
        }
        sum
    }

    /// The numerator polynomial `f(τ)`; for k = 2, 3 this is `χ ∏ τ`.
    pub fn numerator(&self, tau: &TauTable) -> Result<Complex64> {
        self.check(tau)?;
        let all: Complex64 = tau.values().iter().product();
        Ok(match self.form {
            Form::Numerator => self.raw(tau),
            Form::Inverse => self.raw(tau) * all,
        })
    }

    /// `χ ∏τ` split by total τ-degree: entry `j` is the degree-`j` part.
    pub fn numerator_by_degree(&self, tau: &TauTable) -> Result<Vec<Complex64>> {
        if tau.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: tau.k(),
            });
        }
        let pairs = self.k * (self.k - 1) / 2;
        let mut out = vec![Complex64::new(0.0, 0.0); pairs + 1];
        for g in &self.groups {
            for m in &g.members {
                let mut p = g.coefficient;
                let degree = match self.form {
                    Form::Inverse => {
                        // the product of the τ's not listed
                        for i in 0..self.k {
                            for j in i + 1..self.k {
                                if !m.iter().any(|&(a, b)| (a.min(b), a.max(b)) == (i, j)) {
                                    p *= tau.get(i, j);
                                }
                            }
                        }
                        pairs - m.len()
                    }
                    Form::Numerator => {
                        for &(i, j) in m {
                            p *= tau.get(i, j);
                        }
                        p /= self.divisor;
                        m.len()
                    }
                };
                out[degree] += p;
            }
        }
        Ok(out)
    }

    fn check(&self, tau: &TauTable) -> Result<()> {
        if tau.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: tau.k(),
            });
        }
        if tau.values().iter().any(|t| *t == Complex64::new(0.0, 0.0)) {
            return Err(Error::degenerate("χ needs all τ_ij ≠ 0"));
        }
        Ok(())
    }

    pub fn eval(&self, tau: &TauTable) -> Result<Complex64> {
        self.check(tau)?;
        Ok(match self.form {
            Form::Inverse => self.raw(tau),
            Form::Numerator => {
                let all: Complex64 = tau.values().iter().product();
                self.raw(tau) / (self.divisor * all)
            }
        })
    }
}

/// χ_k(τ) for k ∈ {2, 3, 4}.
pub fn chi_eval(k: usize, tau: &TauTable) -> Result<Complex64> {
    ChiTable::standard(k)?.eval(tau)
}

//! Exact finite-N dual integral representations of the correlators.
//!
//! Every integrand is a polynomial times a Gaussian with a linear term, so the
//! primary path integrates monomial by monomial with closed-form moments. A
//! tensor Gauss–Hermite rule evaluates the same integrands as a cross-check.
//! All results are on the monic normalization `F_k = ∏ λ_i^N + …`.

mod builders;
mod formula;
mod moments;
mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleKind, EnsembleSpec, LambdaPoints};
use crate::error::{Error, Result};
use crate::linalg::SparsePolynomial;
use crate::value::CorrelatorValue;

use builders::{formula, FormulaKey};
use formula::SingleFactor;

pub use moments::{gaussian_moment_1d, integrate_poly_gaussian, normalized_moment, GaussianLinearForm, MAX_MOMENT};
pub use quadrature::{gauss_hermite, MAX_NODES};

/// Below this separation the two-point GOE formula switches to the exact
/// expansion in `λ₁ − λ₂`; above it the direct quotient is better conditioned.
pub const CONFLUENT_THRESHOLD: f64 = 1e-2;

const SOURCE_MAX_DIM: usize = 16;
const GUE_SOURCE_MAX_K: usize = 4;
const GOE_SOURCE_MAX_FACTORS: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualMethod {
    #[default]
    MonomialExact,
    Quadrature,
}

impl DualMethod {
    pub fn name(self) -> &'static str {
        match self {
            DualMethod::MonomialExact => "monomial-exact",
            DualMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualIntegralRequest {
    pub spec: EnsembleSpec,
    pub lambdas: LambdaPoints,
    pub method: DualMethod,
    /// Per-axis node count for the quadrature method; defaults to the exact count.
    pub nodes: Option<usize>,
}

impl DualIntegralRequest {
    pub fn new(spec: EnsembleSpec, lambdas: LambdaPoints) -> Self {
        Self {
            spec,
            lambdas,
            method: DualMethod::MonomialExact,
            nodes: None,
        }
    }

    pub fn with_method(mut self, method: DualMethod) -> Self {
        self.method = method;
        self
    }
}

fn factor(spec: &EnsembleSpec) -> SingleFactor {
    match spec.source() {
        Some(a) => SingleFactor::from_source(a),
        None => SingleFactor::power(spec.dim()),
    }
}

/// Which formula serves a request, and the arguments it takes.
struct Route {
    key: FormulaKey,
    lambdas: Vec<f64>,
}

fn route(spec: &EnsembleSpec, lambdas: &LambdaPoints) -> Result<Route> {
    let v = lambdas.values();
    let k = v.len();
    let n = spec.dim();
    let equal = Route {
        key: FormulaKey::GoeMoment(k),
        lambdas: vec![v[0]],
    };
    let distinct = |key| Route { key, lambdas: v.to_vec() };
    let partial = || Error::degenerate("partially coincident λ values have no dual formula; use all-equal or all-distinct arguments");
    match (spec.kind(), spec.source().is_some()) {
        (EnsembleKind::Gue, false) => {
            if k == 1 || lambdas.all_distinct() {
                Ok(distinct(FormulaKey::GueDistinct(k)))
            } else if lambdas.all_equal() {
                Ok(Route {
                    key: FormulaKey::GueMoment(k),
                    lambdas: vec![v[0]],
                })
            } else {
                Err(partial())
            }
        }
        (EnsembleKind::Gue, true) => {
            Error::check_budget("GUE source N", n, SOURCE_MAX_DIM)?;
            Error::check_budget("GUE source k", k, GUE_SOURCE_MAX_K)?;
            if k == 1 || lambdas.all_distinct() {
                Ok(distinct(FormulaKey::GueDistinct(k)))
            } else {
                Err(Error::degenerate("the GUE source formula needs distinct λ values"))
            }
        }
        (EnsembleKind::Goe, false) => {
            if k == 1 || lambdas.all_equal() {
                Ok(equal)
            } else if k == 2 {
                Ok(distinct(FormulaKey::GoeK2))
            } else if !lambdas.all_distinct() {
                Err(partial())
            } else if k == 3 {
                Ok(distinct(FormulaKey::GoeK3))
            } else if k == 4 {
                Ok(distinct(FormulaKey::GoeK4))
            } else {
                Err(Error::budget("GOE distinct-λ k", k, 4))
            }
        }
        (EnsembleKind::Goe, true) => {
            Error::check_budget("GOE source N", n, SOURCE_MAX_DIM)?;
            Error::check_budget("GOE source factors", k, GOE_SOURCE_MAX_FACTORS)?;
            if lambdas.all_equal() {
                Ok(equal)
            } else {
                Err(Error::degenerate("the GOE source formula needs coincident λ values"))
            }
        }
    }
}

fn evaluate(spec: &EnsembleSpec, lambdas: &LambdaPoints, method: DualMethod, nodes: Option<usize>) -> Result<(Complex64, &'static str)> {
    let r = route(spec, lambdas)?;
    let f = formula(r.key, spec.dim())?;
    let g = factor(spec);
    let value = match (method, r.key) {
        (DualMethod::MonomialExact, FormulaKey::GoeK2) if (r.lambdas[0] - r.lambdas[1]).abs() < CONFLUENT_THRESHOLD => {
            f.evaluate_confluent(&g, r.lambdas[1], r.lambdas[0] - r.lambdas[1])?.0
        }
        (DualMethod::MonomialExact, _) => f.evaluate(&g, &r.lambdas)?,
        (DualMethod::Quadrature, _) => f.quadrature(&g, &r.lambdas, nodes)?,
    };
    Ok((value, r.key.name()))
}

/// Dispatches by ensemble, argument pattern and source to the applicable dual formula.
pub fn dual_correlator(req: &DualIntegralRequest) -> Result<CorrelatorValue> {
    let (value, name) = evaluate(&req.spec, &req.lambdas, req.method, req.nodes)?;
    Ok(CorrelatorValue::exact(value, name, req.method.name()))
}

/// The same integrand evaluated by tensor Gauss–Hermite quadrature.
pub fn quadrature_cross_check(req: &DualIntegralRequest) -> Result<Complex64> {
    Ok(evaluate(&req.spec, &req.lambdas, DualMethod::Quadrature, req.nodes)?.0)
}

fn lambda_points(v: &[f64]) -> Result<LambdaPoints> {
    LambdaPoints::new(v.to_vec())
}

fn require(spec: &EnsembleSpec, kind: EnsembleKind, source: bool) -> Result<()> {
    if spec.kind() != kind {
        return Err(Error::invalid(format!("expected a {} ensemble", kind.name())));
    }
    if spec.source().is_some() != source {
        return Err(Error::invalid(if source {
            "this formula needs an external source"
        } else {
            "this formula takes no external source"
        }));
    }
    Ok(())
}

/// GUE correlator at distinct arguments (any k ≤ 6; k = 1 is the Hermite case).
pub fn gue_correlator_dual(req: &DualIntegralRequest) -> Result<Complex64> {
    require(&req.spec, EnsembleKind::Gue, false)?;
    if req.lambdas.k() > 1 && !req.lambdas.all_distinct() {
        return Err(Error::degenerate("coincident λ values; use gue_moment_dual"));
    }
    Ok(evaluate(&req.spec, &req.lambdas, req.method, req.nodes)?.0)
}

/// The GUE correlator as a polynomial in `λ_0..λ_{k−1}`.
pub fn gue_correlator_poly(n: usize, k: usize) -> Result<SparsePolynomial> {
    formula(FormulaKey::GueDistinct(k), n)?.lambda_polynomial(&SingleFactor::power(n))
}

/// The GOE correlator at distinct arguments as a polynomial in `λ_0..λ_{k−1}`, k ∈ {2, 3, 4}.
pub fn goe_correlator_poly(n: usize, k: usize) -> Result<SparsePolynomial> {
    let key = match k {
        2 => FormulaKey::GoeK2,
        3 => FormulaKey::GoeK3,
        4 => FormulaKey::GoeK4,
        _ => return Err(Error::invalid("GOE distinct-λ formulas exist for k ∈ {2, 3, 4}")),
    };
    formula(key, n)?.lambda_polynomial(&SingleFactor::power(n))
}

/// `E[det(λ − X)^k]` for GUE, k ≤ 3.
pub fn gue_moment_dual(n: usize, k: usize, lambda: f64) -> Result<Complex64> {
    formula(FormulaKey::GueMoment(k), n)?.evaluate(&SingleFactor::power(n), &[lambda])
}

/// `E[det(λ − X)^{2k}]` for GOE, 2k ≤ 6.
pub fn goe_moment_dual(n: usize, k: usize, lambda: f64) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    goe_moment_factors(n, 2 * k, lambda)
}

/// `E[det(λ − X)^m]` for GOE with any factor count m ≤ 6, odd m included.
pub fn goe_moment_factors(n: usize, m: usize, lambda: f64) -> Result<Complex64> {
    formula(FormulaKey::GoeMoment(m), n)?.evaluate(&SingleFactor::power(n), &[lambda])
}

/// Two-point GOE correlator; coincident or nearby arguments use the exact
/// expansion in `λ₁ − λ₂`.
pub fn goe_correlator_k2(n: usize, l1: f64, l2: f64) -> Result<Complex64> {
    lambda_points(&[l1, l2])?;
    let f = formula(FormulaKey::GoeK2, n)?;
    let g = SingleFactor::power(n);
    if (l1 - l2).abs() < CONFLUENT_THRESHOLD {
        Ok(f.evaluate_confluent(&g, l2, l1 - l2)?.0)
    } else {
        f.evaluate(&g, &[l1, l2])
    }
}

/// `F₂(λ + δ, λ)` through the expansion in δ, valid for every δ including 0.
pub fn goe_correlator_k2_confluent(n: usize, lambda: f64, delta: f64) -> Result<Complex64> {
    Ok(formula(FormulaKey::GoeK2, n)?.evaluate_confluent(&SingleFactor::power(n), lambda, delta)?.0)
}

/// Largest dropped low-order coefficient of the δ-expansion relative to the
/// kept ones; it vanishes in exact arithmetic.
pub fn goe_k2_confluent_remainder(n: usize, lambda: f64) -> Result<f64> {
    Ok(formula(FormulaKey::GoeK2, n)?.evaluate_confluent(&SingleFactor::power(n), lambda, 0.0)?.1)
}

fn distinct_goe(key: FormulaKey, n: usize, lambdas: &[f64]) -> Result<Complex64> {
    let lp = lambda_points(lambdas)?;
    if !lp.all_distinct() {
        return Err(Error::degenerate("coincident λ values; use goe_moment_factors"));
    }
    formula(key, n)?.evaluate(&SingleFactor::power(n), lambdas)
}

/// Three-point GOE correlator at distinct arguments, N ≤ 16.
pub fn goe_correlator_k3(n: usize, lambdas: [f64; 3]) -> Result<Complex64> {
    distinct_goe(FormulaKey::GoeK3, n, &lambdas)
}

/// Four-point GOE correlator at distinct arguments, N ≤ 8.
pub fn goe_correlator_k4(n: usize, lambdas: [f64; 4]) -> Result<Complex64> {
    distinct_goe(FormulaKey::GoeK4, n, &lambdas)
}

/// GUE correlator with an external source at distinct arguments (k ≤ 4, N ≤ 16).
pub fn gue_source_dual(spec: &EnsembleSpec, lambdas: &LambdaPoints) -> Result<Complex64> {
    require(spec, EnsembleKind::Gue, true)?;
    Ok(evaluate(spec, lambdas, DualMethod::MonomialExact, None)?.0)
}

/// `E[det(λ − X)^m]` for GOE with an external source; m counts the factors (m ≤ 4, N ≤ 16).
pub fn goe_source_moment_dual(spec: &EnsembleSpec, m: usize, lambda: f64) -> Result<Complex64> {
    require(spec, EnsembleKind::Goe, true)?;
    if m == 0 {
        return Err(Error::invalid("at least one factor is required"));
    }
    Ok(evaluate(spec, &lambda_points(&vec![lambda; m])?, DualMethod::MonomialExact, None)?.0)
}

/// The t² coefficient of `−N t² + (N/2) log(t² + c²)` at t = 0, i.e. `−N + N/(2c²)`.
pub fn multicritical_coefficient(c: f64, n: usize) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("c must be positive"));
    }
    multicritical_coefficient_sq(c * c, n)
}

/// The same coefficient from `c²`; exact zero at `c² = 1/2`.
pub fn multicritical_coefficient_sq(c_sq: f64, n: usize) -> Result<f64> {
    if !(c_sq > 0.0) || !c_sq.is_finite() {
        return Err(Error::invalid("c² must be positive"));
    }
    let nf = n as f64;
    Ok(nf * (1.0 - 2.0 * c_sq) / (2.0 * c_sq))
}

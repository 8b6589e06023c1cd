//! Generic evaluator for dual integrals of the form
//!
//! `I(λ) = Σ_terms ∫ Num(t, λ) ∏_l g(t_l) e^{−a t_l² + 2ia λ_{π(l)} t_l} dt`,
//! `F(λ) = I(λ) / (Δ(λ)^p κ)`,
//!
//! where `g` carries `t^N` (or `∏_j (t − i a_j)` with a source) and `κ` makes
//! `F` monic. After the shift `t = s + iλ` every integral is a polynomial
//! expectation over `s ~ N(0, 1/(2a))`.

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use twofloat::TwoFloat;

use super::moments::{centered_moments, moment_table};
use super::quadrature::gauss_hermite;
use crate::error::{Error, Result};
use crate::linalg::{binomial, vandermonde_real, Monomial, SparsePolynomial};

const CHUNK: usize = 4096;
/// Relative size below which a division remainder or quotient coefficient is rounding.
const DIVISION_TOLERANCE: f64 = 1e-8;
const QUADRATURE_WORK_LIMIT: usize = 500_000_000;

/// The per-variable factor `g(t) = Σ_j g_j t^j`, monic of degree N.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SingleFactor(Vec<Complex64>);

impl SingleFactor {
    pub fn power(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self(c)
    }

    /// `∏_j (t − i a_j)`.
    pub fn from_source(a: &[f64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &aj in a {
            let root = Complex64::new(0.0, aj);
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (d, &cd) in c.iter().enumerate() {
                next[d + 1] += cd;
                next[d] -= root * cd;
            }
            c = next;
        }
        Self(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Normalization {
    /// Read κ from the leading λ-homogeneous part of `I`: substitute
    /// `t_l → iλ_{π(l)}` and take the coefficient of the lex-leading
    /// monomial of `Δ(λ)^p`.
    LeadingLambda,
    /// All λ coincide so the rule above degenerates; κ is `i^{mN} E[Num(s)]`.
    CenteredMoment,
}

pub(crate) struct IntegrandTerm {
    terms: Vec<(Monomial, Complex64)>,
    poly: SparsePolynomial,
    pairing: Vec<usize>,
}

/// A fully expanded dual integral with its monic normalization.
pub(crate) struct DualFormula {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub a: f64,
    pub den_power: u32,
    terms: Vec<IntegrandTerm>,
    max_t_degree: usize,
    max_lambda_degree: usize,
    kappa: Complex64,
}

fn deterministic_sum<F>(items: &[(Monomial, Complex64)], f: F) -> Complex64
where
    F: Fn(Monomial, Complex64) -> Complex64 + Sync,
{
    if items.len() <= 2 * CHUNK {
        return items.iter().map(|&(m, c)| f(m, c)).sum();
    }
    let parts: Vec<Complex64> = items
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(|&(m, c)| f(m, c)).sum())
        .collect();
    parts.into_iter().sum()
}

type Wide = Complex<TwoFloat>;

fn wide(z: Complex64) -> Wide {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

/// [`moment_table`] in double-double at the center `iλ`.
fn wide_moment_table(max: usize, a: f64, lambda: f64) -> Vec<Wide> {
    let c = Complex::new(TwoFloat::from(0.0), TwoFloat::from(lambda));
    let inv = TwoFloat::from(1.0) / TwoFloat::from(2.0 * a);
    let mut mu = vec![wide(Complex64::new(1.0, 0.0))];
    if max >= 1 {
        mu.push(c);
    }
    for n in 1..max {
        let next = c * mu[n] + mu[n - 1] * (inv * TwoFloat::from(n as f64));
        mu.push(next);
    }
    mu
}

fn i_pow(e: usize) -> Complex64 {
    match e % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Coefficients in δ of `(x + δ)^r`.
fn shifted_power(x: f64, r: usize) -> Vec<Complex64> {
    (0..=r)
        .map(|j| Complex64::new(binomial(r, j) * x.powi((r - j) as i32), 0.0))
        .collect()
}

fn poly_mul_1d(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl DualFormula {
    pub fn new(
        n: usize,
        m: usize,
        k: usize,
        a: f64,
        den_power: u32,
        terms: Vec<(SparsePolynomial, Vec<usize>)>,
        normalization: Normalization,
    ) -> Result<Self> {
        let mut built = Vec::with_capacity(terms.len());
        let (mut max_t, mut max_l) = (0usize, 0usize);
        for (poly, pairing) in terms {
            if poly.nvars() != m + k || pairing.len() != m || pairing.iter().any(|&p| p >= k) {
                return Err(Error::invalid("integrand term does not match the formula layout"));
            }
            for v in 0..m {
                max_t = max_t.max(poly.degree_in(v) as usize);
            }
            for v in 0..k {
                max_l = max_l.max(poly.degree_in(m + v) as usize);
            }
            built.push(IntegrandTerm {
                terms: poly.sorted_terms(),
                poly,
                pairing,
            });
        }
        let mut f = Self {
            n,
            m,
            k,
            a,
            den_power,
            terms: built,
            max_t_degree: max_t,
            max_lambda_degree: max_l,
            kappa: Complex64::new(1.0, 0.0),
        };
        f.kappa = match normalization {
            Normalization::LeadingLambda => f.leading_kappa()?,
            Normalization::CenteredMoment => f.centered_kappa()?,
        };
        Ok(f)
    }

    #[cfg(test)]
    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    fn leading_kappa(&self) -> Result<Complex64> {
        let (m, k) = (self.m, self.k);
        let mut top: FxHashMap<Monomial, Complex64> = FxHashMap::default();
        for term in &self.terms {
            for &(mono, c) in &term.terms {
                let mut exps: Vec<u32> = (0..k).map(|v| mono.exponent(m + v)).collect();
                let mut tdeg = 0;
                for l in 0..m {
                    let e = mono.exponent(l);
                    exps[term.pairing[l]] += e;
                    tdeg += e as usize;
                }
                *top.entry(Monomial::from_exponents(&exps)?).or_default() += c * i_pow(tdeg);
            }
        }
        let scale = top.values().map(|c| c.norm()).fold(0.0, f64::max);
        let degree = top
            .iter()
            .filter(|(_, c)| c.norm() > 1e-9 * scale)
            .map(|(mono, _)| mono.degree())
            .max()
            .unwrap_or(0);
        let p = self.den_power;
        let target: Vec<u32> = (0..k).map(|i| p * (k - 1 - i) as u32).collect();
        let want = p * (k * (k - 1) / 2) as u32;
        if degree != want {
            return Err(Error::Numerical(format!(
                "leading λ-degree {degree} does not match the denominator degree {want}"
            )));
        }
        let lead = top.get(&Monomial::from_exponents(&target)?).copied().unwrap_or_default();
        if lead.norm() <= 1e-9 * scale {
            return Err(Error::Numerical("vanishing leading coefficient".into()));
        }
        Ok(lead * i_pow(m * self.n))
    }

    fn centered_kappa(&self) -> Result<Complex64> {
        let cm = centered_moments(self.max_t_degree, self.a);
        let mut sum = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            for &(mono, c) in &term.terms {
                if (0..self.k).any(|v| mono.exponent(self.m + v) != 0) {
                    return Err(Error::invalid("centered normalization needs a λ-free numerator"));
                }
                sum += (0..self.m).fold(c, |acc, l| acc * cm[mono.exponent(l) as usize]);
            }
        }
        if sum.norm() == 0.0 {
            return Err(Error::Numerical("vanishing normalization integral".into()));
        }
        Ok(sum * i_pow(self.m * self.n))
    }

    fn check_lambdas(&self, lambdas: &[f64]) -> Result<()> {
        if lambdas.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: lambdas.len(),
            });
        }
        Ok(())
    }

    fn check_factor(&self, g: &SingleFactor) -> Result<()> {
        if g.degree() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: g.degree(),
            });
        }
        Ok(())
    }

    /// `Q[e] = E[(s + iλ)^e g(s + iλ)]` for `e = 0..=max_t_degree`.
    fn factor_moments(&self, g: &SingleFactor, lambda: f64) -> Vec<Complex64> {
        let d = g.degree();
        let mu = moment_table(self.max_t_degree + d, self.a, Complex64::new(0.0, lambda));
        (0..=self.max_t_degree)
            .map(|e| g.coeffs().iter().enumerate().map(|(j, gj)| gj * mu[e + j]).sum())
            .collect()
    }

    /// The un-normalized integral `I(λ)` in the normalized-moment convention.
    ///
    /// Distinct-argument formulas vanish like `Δ(λ)^p`, so every rounding in
    /// the term sum is amplified by `1/Δ(λ)^p`; those are summed in
    /// double-double. With integer numerator coefficients this keeps the
    /// quotient accurate to near double precision even for close arguments.
    pub fn integral(&self, g: &SingleFactor, lambdas: &[f64]) -> Result<Complex64> {
        self.check_lambdas(lambdas)?;
        self.check_factor(g)?;
        if self.den_power > 0 {
            return Ok(self.integral_wide(g, lambdas));
        }
        let q: Vec<Vec<Complex64>> = lambdas.iter().map(|&l| self.factor_moments(g, l)).collect();
        let pows: Vec<Vec<f64>> = lambdas
            .iter()
            .map(|&l| (0..=self.max_lambda_degree).map(|r| l.powi(r as i32)).collect())
            .collect();
        let (m, k) = (self.m, self.k);
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let tables: Vec<&Vec<Complex64>> = term.pairing.iter().map(|&p| &q[p]).collect();
            total += deterministic_sum(&term.terms, |mono, c| {
                let mut acc = c;
                for v in 0..k {
                    let r = mono.exponent(m + v) as usize;
                    if r > 0 {
                        acc *= pows[v][r];
                    }
                }
                for (l, t) in tables.iter().enumerate() {
                    acc *= t[mono.exponent(l) as usize];
                }
                acc
            });
        }
        Ok(total)
    }

    fn integral_wide(&self, g: &SingleFactor, lambdas: &[f64]) -> Complex64 {
        let d = g.degree();
        let q: Vec<Vec<Wide>> = lambdas
            .iter()
            .map(|&l| {
                let mu = wide_moment_table(self.max_t_degree + d, self.a, l);
                (0..=self.max_t_degree)
                    .map(|e| g.coeffs().iter().enumerate().map(|(j, &gj)| wide(gj) * mu[e + j]).sum())
                    .collect()
            })
            .collect();
        let pows: Vec<Vec<TwoFloat>> = lambdas
            .iter()
            .map(|&l| {
                let x = TwoFloat::from(l);
                let mut p = vec![TwoFloat::from(1.0)];
                for r in 1..=self.max_lambda_degree {
                    p.push(p[r - 1] * x);
                }
                p
            })
            .collect();
        let (m, k) = (self.m, self.k);
        let mut total = wide(Complex64::new(0.0, 0.0));
        for term in &self.terms {
            let tables: Vec<&Vec<Wide>> = term.pairing.iter().map(|&p| &q[p]).collect();
            let eval = |&(mono, c): &(Monomial, Complex64)| -> Wide {
                let mut acc = wide(c);
                for v in 0..k {
                    let r = mono.exponent(m + v) as usize;
                    if r > 0 {
                        acc = acc * pows[v][r];
                    }
                }
                for (l, t) in tables.iter().enumerate() {
                    acc = acc * t[mono.exponent(l) as usize];
                }
                acc
            };
            let parts: Vec<Wide> = term.terms.par_chunks(CHUNK).map(|chunk| chunk.iter().map(eval).sum()).collect();
            total = parts.into_iter().fold(total, |acc, p| acc + p);
        }
        Complex64::new(total.re.into(), total.im.into())
    }

    fn denominator(&self, lambdas: &[f64]) -> Result<f64> {
        if self.den_power == 0 {
            return Ok(1.0);
        }
        let d = vandermonde_real(lambdas);
        if d == 0.0 {
            return Err(Error::degenerate("coincident λ values in a distinct-argument formula"));
        }
        Ok(d.powi(self.den_power as i32))
    }

    /// Monic correlator `F(λ)`.
    pub fn evaluate(&self, g: &SingleFactor, lambdas: &[f64]) -> Result<Complex64> {
        let den = self.denominator(lambdas)?;
        Ok(self.integral(g, lambdas)? / (self.kappa * den))
    }

    /// Coefficients in δ of `I(λ + δ, λ)` for a two-argument formula.
    pub fn confluent_series(&self, g: &SingleFactor, lambda: f64) -> Result<Vec<Complex64>> {
        if self.k != 2 {
            return Err(Error::invalid("confluent expansion is implemented for two arguments"));
        }
        self.check_factor(g)?;
        let d = g.degree();
        let top = self.max_t_degree + d;
        let mu = moment_table(top, self.a, Complex64::new(0.0, lambda));
        // μ_n(λ + δ) = Σ_j C(n, j) (iδ)^j μ_{n−j}(λ)
        let mu_shift: Vec<Vec<Complex64>> = (0..=top)
            .map(|n| (0..=n).map(|j| i_pow(j) * binomial(n, j) * mu[n - j]).collect())
            .collect();
        let q_shift: Vec<Vec<Complex64>> = (0..=self.max_t_degree)
            .map(|e| {
                let mut acc = vec![Complex64::new(0.0, 0.0); e + d + 1];
                for (j, gj) in g.coeffs().iter().enumerate() {
                    for (i, c) in mu_shift[e + j].iter().enumerate() {
                        acc[i] += gj * c;
                    }
                }
                acc
            })
            .collect();
        let q_base = self.factor_moments(g, lambda);
        let lam_shift: Vec<Vec<Complex64>> = (0..=self.max_lambda_degree).map(|r| shifted_power(lambda, r)).collect();
        let m = self.m;
        let mut total: Vec<Complex64> = Vec::new();
        for term in &self.terms {
            for &(mono, c) in &term.terms {
                let mut series = lam_shift[mono.exponent(m) as usize].iter().map(|x| x * c).collect::<Vec<_>>();
                let mut scalar = Complex64::new(lambda.powi(mono.exponent(m + 1) as i32), 0.0);
                for l in 0..m {
                    let e = mono.exponent(l) as usize;
                    if term.pairing[l] == 0 {
                        series = poly_mul_1d(&series, &q_shift[e]);
                    } else {
                        scalar *= q_base[e];
                    }
                }
                if total.len() < series.len() {
                    total.resize(series.len(), Complex64::new(0.0, 0.0));
                }
                for (t, s) in total.iter_mut().zip(&series) {
                    *t += s * scalar;
                }
            }
        }
        Ok(total)
    }

    /// `F(λ + δ, λ)` through the δ-expansion, with exact division by `δ^p`.
    /// Also returns the largest dropped low-order coefficient relative to the largest kept one.
    pub fn evaluate_confluent(&self, g: &SingleFactor, lambda: f64, delta: f64) -> Result<(Complex64, f64)> {
        let series = self.confluent_series(g, lambda)?;
        let p = self.den_power as usize;
        if series.len() <= p {
            return Err(Error::Numerical("confluent series shorter than the denominator order".into()));
        }
        let kept = &series[p..];
        let scale = kept.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let dropped = series[..p].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let value = kept.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * delta + c);
        Ok((value / self.kappa, if scale > 0.0 { dropped / scale } else { 0.0 }))
    }

    /// `F` as a polynomial in `λ_0..λ_{k−1}` after exact division by `Δ(λ)^p`.
    pub fn lambda_polynomial(&self, g: &SingleFactor) -> Result<SparsePolynomial> {
        self.check_factor(g)?;
        let (m, k) = (self.m, self.k);
        let d = g.degree();
        let top = self.max_t_degree + d;
        let inv = 1.0 / (2.0 * self.a);
        // μ_n(x) = Σ_j C(n,2j) (ix)^{n−2j} (2j−1)!! (2a)^{−j}, as coefficient vectors in x
        let mu: Vec<Vec<Complex64>> = (0..=top)
            .map(|n| {
                let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
                let mut f = 1.0;
                for j in 0..=n / 2 {
                    c[n - 2 * j] = i_pow(n - 2 * j) * f;
                    let r = (n - 2 * j) as f64 * (n - 2 * j).saturating_sub(1) as f64;
                    f *= r * inv / (2 * j + 2) as f64;
                }
                c
            })
            .collect();
        let q: Vec<Vec<Complex64>> = (0..=self.max_t_degree)
            .map(|e| {
                let mut acc = vec![Complex64::new(0.0, 0.0); e + d + 1];
                for (j, gj) in g.coeffs().iter().enumerate() {
                    for (i, c) in mu[e + j].iter().enumerate() {
                        acc[i] += gj * c;
                    }
                }
                acc
            })
            .collect();
        let univariate = |var: usize, coeffs: &[Complex64]| -> Result<SparsePolynomial> {
            SparsePolynomial::from_terms(
                k,
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(e, &c)| Ok((Monomial::var(var, e as u32)?, c)))
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let mut total = SparsePolynomial::new(k)?;
        for term in &self.terms {
            for &(mono, c) in &term.terms {
                let exps: Vec<u32> = (0..k).map(|v| mono.exponent(m + v)).collect();
                let mut p = SparsePolynomial::term(k, &exps, c)?;
                for l in 0..m {
                    p = p.mul(&univariate(term.pairing[l], &q[mono.exponent(l) as usize])?)?;
                }
                total = total.add(&p)?;
            }
        }
        let scale = total.max_coefficient();
        for _ in 0..self.den_power {
            for i in 0..k {
                for j in i + 1..k {
                    let (quot, rem) = total.divide_by_difference(i, j)?;
                    if rem > DIVISION_TOLERANCE * scale {
                        return Err(Error::Numerical(format!("inexact division by λ{i} − λ{j}: remainder {rem:e}")));
                    }
                    total = quot;
                }
            }
        }
        // the quotient carries rounding residue at the level the remainder test allows
        let residue = DIVISION_TOLERANCE * total.max_coefficient();
        Ok(total.truncated(residue).scale(self.kappa.inv()))
    }

    /// Tensor Gauss–Hermite evaluation of the same integral after the contour shift.
    pub fn quadrature(&self, g: &SingleFactor, lambdas: &[f64], nodes: Option<usize>) -> Result<Complex64> {
        self.check_lambdas(lambdas)?;
        self.check_factor(g)?;
        Error::check_budget("quadrature dimension", self.m, 4)?;
        let den = self.denominator(lambdas)?;
        let lam_vars: Vec<usize> = (self.m..self.m + self.k).collect();
        let lam_vals: Vec<Complex64> = lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        let d = g.degree();
        let needed = (self.max_t_degree + d + 2).div_ceil(2);
        let n = nodes.unwrap_or(needed);
        let (x, w) = gauss_hermite(n)?;
        let sqrt_a = self.a.sqrt();
        let norm = std::f64::consts::PI.sqrt();
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let tpoly = term.poly.partial_eval(&lam_vars, &lam_vals)?;
            let tterms = tpoly.sorted_terms();
            let points = n.pow(self.m as u32);
            Error::check_budget("quadrature work", points.saturating_mul(tterms.len()), QUADRATURE_WORK_LIMIT)?;
            // per axis: powers of the shifted node and g at it
            let axes: Vec<(Vec<Vec<Complex64>>, Vec<Complex64>)> = (0..self.m)
                .map(|l| {
                    let shift = Complex64::new(0.0, lambdas[term.pairing[l]]);
                    let dl = tpoly.degree_in(l) as usize;
                    let mut pw = Vec::with_capacity(n);
                    let mut gw = Vec::with_capacity(n);
                    for j in 0..n {
                        let z = Complex64::new(x[j] / sqrt_a, 0.0) + shift;
                        let mut p = vec![Complex64::new(1.0, 0.0); dl + 1];
                        for e in 1..=dl {
                            p[e] = p[e - 1] * z;
                        }
                        pw.push(p);
                        gw.push(g.eval(z) * (w[j] / norm));
                    }
                    (pw, gw)
                })
                .collect();
            let mut idx = vec![0usize; self.m];
            for _ in 0..points {
                let weight = idx.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (l, &j)| acc * axes[l].1[j]);
                let val: Complex64 = tterms
                    .iter()
                    .map(|&(mono, c)| idx.iter().enumerate().fold(c, |acc, (l, &j)| acc * axes[l].0[j][mono.exponent(l) as usize]))
                    .sum();
                total += weight * val;
                for slot in idx.iter_mut() {
                    *slot += 1;
                    if *slot < n {
                        break;
                    }
                    *slot = 0;
                }
            }
        }
        Ok(total / (self.kappa * den))
    }
}

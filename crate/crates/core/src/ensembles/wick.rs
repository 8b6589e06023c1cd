//! Exact small-N expectations by expanding `∏ det(λ_i − X)` in the independent
//! real Gaussian components of X and taking componentwise moments.

use num_complex::Complex64;

use super::{EnsembleKind, EnsembleSpec, LambdaPoints};
use crate::error::{Error, Result};
use crate::linalg::{binomial, Monomial, SparsePolynomial};

pub const WICK_MAX_DIM: usize = 3;
pub const WICK_MAX_K: usize = 4;

/// One independent real component `μ + σ Z`.
struct Component {
    mean: f64,
    var: f64,
}

impl Component {
    /// `E[(μ + σZ)^e] = Σ_j C(e, 2j) μ^{e−2j} σ^{2j} (2j−1)!!`.
    fn moments(&self, max: usize) -> Vec<f64> {
        (0..=max)
            .map(|e| {
                let mut sum = 0.0;
                let mut dfact = 1.0;
                for j in 0..=e / 2 {
                    sum += binomial(e, 2 * j) * self.mean.powi((e - 2 * j) as i32) * self.var.powi(j as i32) * dfact;
                    dfact *= (2 * j + 1) as f64;
                }
                sum
            })
            .collect()
    }
}

struct Expansion {
    components: Vec<Component>,
    // entries[i][j]: X_ij as a linear polynomial (plus constant shift in the entry route)
    entries: Vec<Vec<SparsePolynomial>>,
    nvars: usize,
}

fn check_bounds(spec: &EnsembleSpec, k: usize) -> Result<()> {
    Error::check_budget("wick oracle N", spec.dim(), WICK_MAX_DIM)?;
    Error::check_budget("wick oracle k", k, WICK_MAX_K)?;
    if k == 0 {
        return Err(Error::invalid("at least one λ is required"));
    }
    Ok(())
}

/// Builds the component list and the entry polynomials. With `shift_in_entries`
/// the source enters as constants in the diagonal entries; otherwise it is the
/// mean of the diagonal components.
fn expansion(spec: &EnsembleSpec, extra_vars: usize, shift_in_entries: bool) -> Result<Expansion> {
    let n = spec.dim();
    let inv_n = 1.0 / n as f64;
    let a = spec.source_or_zero();
    let mut components = Vec::new();
    let mut slots = vec![vec![(usize::MAX, usize::MAX); n]; n];
    for i in 0..n {
        for j in i..n {
            let mean = if i == j && !shift_in_entries { a[i] } else { 0.0 };
            let var = if i == j { inv_n } else { 0.5 * inv_n };
            let re = components.len();
            components.push(Component { mean, var });
            let im = if spec.kind() == EnsembleKind::Gue && i != j {
                components.push(Component { mean: 0.0, var: 0.5 * inv_n });
                components.len() - 1
            } else {
                usize::MAX
            };
            slots[i][j] = (re, im);
        }
    }
    let nvars = components.len() + extra_vars;
    let one = Complex64::new(1.0, 0.0);
    let lin = |re: usize, im: usize, conj: bool| -> Result<SparsePolynomial> {
        let mut terms = vec![(Monomial::var(re, 1)?, one)];
        if im != usize::MAX {
            let s = if conj { -Complex64::i() } else { Complex64::i() };
            terms.push((Monomial::var(im, 1)?, s));
        }
        SparsePolynomial::from_terms(nvars, terms)
    };
    let mut entries = vec![vec![SparsePolynomial::new(nvars)?; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (re, im) = if i <= j { slots[i][j] } else { slots[j][i] };
            let mut p = lin(re, im, i > j)?;
            if i == j && shift_in_entries && a[i] != 0.0 {
                p = p.add(&SparsePolynomial::constant(nvars, Complex64::new(a[i], 0.0))?)?;
            }
            entries[i][j] = p;
        }
    }
    Ok(Expansion {
        components,
        entries,
        nvars,
    })
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), sign));
            return;
        }
        // sign: count of unused indices smaller than the pick
        let mut smaller = 0;
        for v in 0..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            prefix.push(v);
            rec(prefix, used, if smaller % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            used[v] = false;
            smaller += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], 1.0, &mut out);
    out
}

/// Leibniz expansion of `det(lam·I − X)`.
fn char_det(ex: &Expansion, lam: &SparsePolynomial) -> Result<SparsePolynomial> {
    let n = ex.entries.len();
    let mut det = SparsePolynomial::new(ex.nvars)?;
    for (perm, sign) in permutations(n) {
        let mut term = SparsePolynomial::constant(ex.nvars, Complex64::new(sign, 0.0))?;
        for (i, &j) in perm.iter().enumerate() {
            let mut e = ex.entries[i][j].scale(Complex64::new(-1.0, 0.0));
            if i == j {
                e = e.add(lam)?;
            }
            term = term.mul(&e)?;
        }
        det = det.add(&term)?;
    }
    Ok(det)
}

/// Replaces every component monomial by its expectation; the remaining
/// variables (from index `components.len()` on) are kept and renumbered from 0.
fn expectation(ex: &Expansion, p: &SparsePolynomial) -> Result<SparsePolynomial> {
    let nc = ex.components.len();
    let maxdeg: Vec<usize> = (0..nc).map(|c| p.degree_in(c) as usize).collect();
    let tables: Vec<Vec<f64>> = ex.components.iter().zip(&maxdeg).map(|(c, &d)| c.moments(d)).collect();
    let rest = ex.nvars - nc;
    let mut out = Vec::with_capacity(p.len());
    for (m, c) in p.sorted_terms() {
        let mut coef = c;
        for (ci, table) in tables.iter().enumerate() {
            coef *= table[m.exponent(ci) as usize];
        }
        let exps: Vec<u32> = (0..rest).map(|v| m.exponent(nc + v)).collect();
        out.push((Monomial::from_exponents(&exps)?, coef));
    }
    SparsePolynomial::from_terms(rest, out)
}

fn numeric(spec: &EnsembleSpec, lambdas: &LambdaPoints, shift_in_entries: bool) -> Result<Complex64> {
    check_bounds(spec, lambdas.k())?;
    let ex = expansion(spec, 0, shift_in_entries)?;
    let mut prod = SparsePolynomial::constant(ex.nvars, Complex64::new(1.0, 0.0))?;
    for &l in lambdas.values() {
        let lam = SparsePolynomial::constant(ex.nvars, Complex64::new(l, 0.0))?;
        prod = prod.mul(&char_det(&ex, &lam)?)?;
    }
    let e = expectation(&ex, &prod)?;
    Ok(e.coefficient_of(Monomial::ONE))
}

/// Exact `E[∏ det(λ_i − X)]` for `N ≤ 3`, `k ≤ 4`. The source enters as the
/// mean of the diagonal components.
pub fn wick_oracle(spec: &EnsembleSpec, lambdas: &LambdaPoints) -> Result<Complex64> {
    numeric(spec, lambdas, false)
}

/// Same expectation with the source added to the entries of a centered matrix,
/// `E[∏ det(λ_i − A − X₀)]`; an independent route for source consistency.
pub fn wick_oracle_shifted(spec: &EnsembleSpec, lambdas: &LambdaPoints) -> Result<Complex64> {
    numeric(spec, lambdas, true)
}

/// The correlator as a polynomial in `λ_1..λ_k` (variables `0..k`).
pub fn wick_oracle_poly(spec: &EnsembleSpec, k: usize) -> Result<SparsePolynomial> {
    check_bounds(spec, k)?;
    let ex = expansion(spec, k, false)?;
    let nc = ex.components.len();
    let mut prod = SparsePolynomial::constant(ex.nvars, Complex64::new(1.0, 0.0))?;
    for l in 0..k {
        let lam = SparsePolynomial::variable(ex.nvars, nc + l)?;
        prod = prod.mul(&char_det(&ex, &lam)?)?;
    }
    expectation(&ex, &prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(v: &[f64]) -> LambdaPoints {
        LambdaPoints::new(v.to_vec()).unwrap()
    }

    #[test]
    fn noncentral_moments() {
        let c = Component { mean: 0.5, var: 2.0 };
        let m = c.moments(4);
        assert!((m[0] - 1.0).abs() < 1e-15);
        assert!((m[1] - 0.5).abs() < 1e-15);
        assert!((m[2] - (0.25 + 2.0)).abs() < 1e-15);
        assert!((m[3] - (0.125 + 3.0 * 0.5 * 2.0)).abs() < 1e-14);
        assert!((m[4] - (0.0625 + 6.0 * 0.25 * 2.0 + 3.0 * 4.0)).abs() < 1e-13);
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        let odd = p.iter().find(|(v, _)| v == &vec![1, 0, 2]).unwrap();
        assert_eq!(odd.1, -1.0);
        let even = p.iter().find(|(v, _)| v == &vec![1, 2, 0]).unwrap();
        assert_eq!(even.1, 1.0);
    }

    #[test]
    fn goe_n1_k2() {
        let spec = EnsembleSpec::goe(1).unwrap();
        let v = wick_oracle(&spec, &lp(&[0.7, -1.3])).unwrap();
        assert!((v.re - (0.7 * -1.3 + 1.0)).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn n2_single_factor() {
        let x = 0.8;
        let goe = wick_oracle(&EnsembleSpec::goe(2).unwrap(), &lp(&[x])).unwrap();
        assert!((goe.re - (x * x - 0.25)).abs() < 1e-14);
        let gue = wick_oracle(&EnsembleSpec::gue(2).unwrap(), &lp(&[x])).unwrap();
        assert!((gue.re - (x * x - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn bounds_enforced() {
        assert!(wick_oracle(&EnsembleSpec::goe(4).unwrap(), &lp(&[0.0])).is_err());
        assert!(wick_oracle(&EnsembleSpec::goe(2).unwrap(), &lp(&[0.0; 5])).is_err());
    }

    #[test]
    fn poly_is_monic() {
        let p = wick_oracle_poly(&EnsembleSpec::gue(2).unwrap(), 2).unwrap();
        assert!((p.coefficient(&[2, 2]) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.degree_in(1), 2);
    }
}

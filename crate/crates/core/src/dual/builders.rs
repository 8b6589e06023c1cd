//! Integrand numerators for every dual representation, built once per (formula, N).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::formula::{DualFormula, Normalization};
use crate::error::{Error, Result};
use crate::hiz::ChiTable;
use crate::linalg::SparsePolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum FormulaKey {
    /// GUE, k distinct arguments.
    GueDistinct(usize),
    /// GUE, m coincident arguments.
    GueMoment(usize),
    /// GOE, m coincident arguments.
    GoeMoment(usize),
    GoeK2,
    GoeK3,
    GoeK4,
}

impl FormulaKey {
    pub fn name(self) -> &'static str {
        match self {
            FormulaKey::GueDistinct(_) => "gue-distinct",
            FormulaKey::GueMoment(_) => "gue-moment",
            FormulaKey::GoeMoment(_) => "goe-moment",
            FormulaKey::GoeK2 => "goe-k2",
            FormulaKey::GoeK3 => "goe-k3",
            FormulaKey::GoeK4 => "goe-k4",
        }
    }

    /// Largest N the expansion budget allows.
    pub fn max_dim(self) -> usize {
        match self {
            FormulaKey::GueDistinct(_) | FormulaKey::GueMoment(_) => 64,
            FormulaKey::GoeMoment(m) if m <= 2 => 64,
            FormulaKey::GoeMoment(m) if m <= 4 => 32,
            FormulaKey::GoeMoment(_) => 12,
            FormulaKey::GoeK2 => 128,
            FormulaKey::GoeK3 => 16,
            FormulaKey::GoeK4 => 8,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("matrix dimension N must be at least 1"));
        }
        match self {
            FormulaKey::GueDistinct(k) => {
                if k == 0 {
                    return Err(Error::invalid("at least one λ is required"));
                }
                Error::check_budget("GUE distinct-λ k", k, 6)?
            }
            FormulaKey::GueMoment(m) => {
                if m == 0 {
                    return Err(Error::invalid("at least one factor is required"));
                }
                Error::check_budget("GUE moment factors", m, 3)?
            }
            FormulaKey::GoeMoment(m) => {
                if m == 0 {
                    return Err(Error::invalid("at least one factor is required"));
                }
                Error::check_budget("GOE moment factors", m, 6)?
            }
            _ => {}
        }
        Error::check_budget(&format!("{} N", self.name()), n, self.max_dim())
    }
}

type Cache = Mutex<HashMap<(FormulaKey, usize), Arc<DualFormula>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The formula for `key` at dimension `n`, built on first use.
pub(crate) fn formula(key: FormulaKey, n: usize) -> Result<Arc<DualFormula>> {
    key.check(n)?;
    if let Some(f) = cache().lock().expect("formula cache poisoned").get(&(key, n)) {
        return Ok(f.clone());
    }
    let built = Arc::new(build(key, n)?);
    let mut guard = cache().lock().expect("formula cache poisoned");
    Ok(guard.entry((key, n)).or_insert(built).clone())
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn diff(nvars: usize, i: usize, j: usize) -> Result<SparsePolynomial> {
    SparsePolynomial::difference(nvars, i, j)
}

fn build(key: FormulaKey, n: usize) -> Result<DualFormula> {
    let nf = n as f64;
    match key {
        FormulaKey::GueDistinct(k) => {
            let vars: Vec<usize> = (0..k).collect();
            let num = SparsePolynomial::vandermonde(2 * k, &vars, 1)?;
            DualFormula::new(n, k, k, nf / 2.0, 1, vec![(num, vars)], Normalization::LeadingLambda)
        }
        FormulaKey::GueMoment(m) => {
            let vars: Vec<usize> = (0..m).collect();
            let num = SparsePolynomial::vandermonde(m + 1, &vars, 2)?;
            DualFormula::new(n, m, 1, nf / 2.0, 0, vec![(num, vec![0; m])], Normalization::CenteredMoment)
        }
        FormulaKey::GoeMoment(m) => {
            let vars: Vec<usize> = (0..m).collect();
            let num = SparsePolynomial::vandermonde(m + 1, &vars, 4)?;
            DualFormula::new(n, m, 1, nf, 0, vec![(num, vec![0; m])], Normalization::CenteredMoment)
        }
        FormulaKey::GoeK2 => {
            // N δ u² + i u with u = t0 − t1, δ = λ0 − λ1, over δ³
            let nv = 4;
            let u = diff(nv, 0, 1)?;
            let d = diff(nv, 2, 3)?;
            let num = d.mul(&u.pow(2)?)?.scale(Complex64::new(nf, 0.0)).add(&u.scale(Complex64::i()))?;
            DualFormula::new(n, 2, 2, nf, 3, vec![(num, vec![0, 1])], Normalization::LeadingLambda)
        }
        FormulaKey::GoeK3 => build_k3(n),
        FormulaKey::GoeK4 => build_k4(n),
    }
}

/// `Δ(t)² Δ(λ) χ₃`-type numerator with the cyclic pairs (01), (12), (20), over `Δ(λ)³`.
/// Scaled by `2N³` so every coefficient is an integer.
fn build_k3(n: usize) -> Result<DualFormula> {
    let nv = 6;
    let nf = n as f64;
    let pairs = [(0, 1), (1, 2), (2, 0)];
    let t: Vec<SparsePolynomial> = pairs.iter().map(|&(a, b)| diff(nv, a, b)).collect::<Result<_>>()?;
    let l: Vec<SparsePolynomial> = pairs.iter().map(|&(a, b)| diff(nv, 3 + a, 3 + b)).collect::<Result<_>>()?;
    let prod = |ps: &[&SparsePolynomial]| -> Result<SparsePolynomial> {
        ps.iter().try_fold(SparsePolynomial::constant(nv, one())?, |acc, p| acc.mul(p))
    };
    let t_sq: Vec<SparsePolynomial> = t.iter().map(|p| p.pow(2)).collect::<Result<_>>()?;
    let mut num = prod(&[&t_sq[0], &t_sq[1], &t_sq[2], &l[0], &l[1], &l[2]])?.scale(Complex64::new(2.0 * nf.powi(3), 0.0));
    for p in 0..3 {
        let (q, r) = ((p + 1) % 3, (p + 2) % 3);
        let single = prod(&[&l[q], &l[r], &t[p], &t_sq[q], &t_sq[r]])?;
        num = num.add(&single.scale(Complex64::new(0.0, 2.0 * nf * nf)))?;
    }
    for p in 0..3 {
        for q in p + 1..3 {
            let r = 3 - p - q;
            let pair = prod(&[&l[r], &t[p], &t[q], &t_sq[r]])?;
            num = num.add(&pair.scale(Complex64::new(-2.0 * nf, 0.0)))?;
        }
    }
    let triple = prod(&[&t[0], &t[1], &t[2]])?;
    num = num.add(&triple.scale(Complex64::new(0.0, -3.0)))?;
    DualFormula::new(n, 3, 3, nf, 3, vec![(num, vec![0, 1, 2])], Normalization::LeadingLambda)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(p: &mut Vec<usize>, i: usize, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if i == p.len() {
            out.push((p.clone(), sign));
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(p, i + 1, if i == j { sign } else { -sign }, out);
            p.swap(i, j);
        }
    }
    rec(&mut p, 0, 1.0, &mut out);
    out
}

/// `Σ_σ sgn(σ) Δ(t) f(τ(t_σ, λ))` with `τ_ij = 2N(λ_i − λ_j)(t_σ(i) − t_σ(j))`, over `Δ(λ)³`.
/// `f` is scaled by 288 so its coefficients are integers.
const K4_SCALE: f64 = 288.0;

fn build_k4(n: usize) -> Result<DualFormula> {
    let nv = 8;
    let nf = n as f64;
    let chi = ChiTable::standard(4)?;
    let vars: Vec<usize> = (0..4).collect();
    let dt = SparsePolynomial::vandermonde(nv, &vars, 1)?;
    let mut terms = Vec::with_capacity(24);
    for (sigma, sign) in permutations(4) {
        let mut tau: HashMap<(usize, usize), SparsePolynomial> = HashMap::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let p = diff(nv, 4 + i, 4 + j)?
                    .mul(&diff(nv, sigma[i], sigma[j])?)?
                    .scale(Complex64::new(2.0 * nf, 0.0));
                tau.insert((i, j), p);
            }
        }
        let mut f = SparsePolynomial::new(nv)?;
        for g in chi.groups() {
            for m in &g.members {
                let c = g.coefficient * K4_SCALE;
                let p0 = Complex64::new(c.re.round(), c.im.round());
                debug_assert!((p0 - c).norm() < 1e-9);
                let mut p = SparsePolynomial::constant(nv, p0)?;
                for &(i, j) in m {
                    p = p.mul(&tau[&(i.min(j), i.max(j))])?;
                }
                f = f.add(&p)?;
            }
        }
        let num = f.mul(&dt)?.scale(Complex64::new(sign, 0.0));
        let mut pairing = vec![0; 4];
        for (l, &s) in sigma.iter().enumerate() {
            pairing[s] = l;
        }
        terms.push((num, pairing));
    }
    DualFormula::new(n, 4, 4, nf, 3, terms, Normalization::LeadingLambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        for (p, s) in &ps {
            let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            assert_eq!(*s, if inversions % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn budgets_enforced() {
        assert!(formula(FormulaKey::GoeK3, 17).is_err());
        assert!(formula(FormulaKey::GoeK4, 9).is_err());
        assert!(formula(FormulaKey::GoeMoment(7), 2).is_err());
        assert!(formula(FormulaKey::GueDistinct(7), 2).is_err());
        assert!(formula(FormulaKey::GueMoment(4), 2).is_err());
        assert!(formula(FormulaKey::GoeMoment(5), 13).is_err());
    }

    #[test]
    fn cache_returns_same_formula() {
        let a = formula(FormulaKey::GoeK2, 3).unwrap();
        let b = formula(FormulaKey::GoeK2, 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn k4_constant_scales_as_n6() {
        for n in 1..=3 {
            let f = formula(FormulaKey::GoeK4, n).unwrap();
            // −16/3 N⁶ for f as printed, times the integer scaling
            let want = -16.0 / 3.0 * (n as f64).powi(6) * K4_SCALE;
            assert!((f.kappa() - Complex64::new(want, 0.0)).norm() < 1e-10 * want.abs(), "N={n}: {}", f.kappa());
        }
    }
}

use std::fmt;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// Maximum number of variables a polynomial may carry.
pub const MAX_VARS: usize = 16;
/// Maximum exponent of a single variable.
pub const MAX_EXPONENT: u32 = 255;

const PRUNE: f64 = 1e-300;
// Bit 8i for i = 1..16: a carry into any of these means a byte overflowed.
const CARRY_MASK: u128 = 0x0101_0101_0101_0101_0101_0101_0101_0100;

/// Exponent vector packed one byte per variable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(Error::budget("polynomial variables", exps.len(), MAX_VARS));
        }
        let mut packed = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            if e > MAX_EXPONENT {
                return Err(Error::budget("monomial exponent", e as usize, MAX_EXPONENT as usize));
            }
            packed |= (e as u128) << (8 * i);
        }
        Ok(Monomial(packed))
    }

    /// `x_var^e`.
    pub fn var(var: usize, e: u32) -> Result<Self> {
        if var >= MAX_VARS {
            return Err(Error::budget("polynomial variables", var + 1, MAX_VARS));
        }
        if e > MAX_EXPONENT {
            return Err(Error::budget("monomial exponent", e as usize, MAX_EXPONENT as usize));
        }
        Ok(Monomial((e as u128) << (8 * var)))
    }

    #[inline]
    pub fn exponent(self, var: usize) -> u32 {
        ((self.0 >> (8 * var)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exponent(v)).collect()
    }

    pub fn degree(self) -> u32 {
        self.0.to_le_bytes().iter().map(|&b| b as u32).sum()
    }

    /// Exponent-wise sum; `None` on overflow of any exponent.
    #[inline]
    pub fn checked_mul(self, other: Monomial) -> Option<Monomial> {
        let sum = self.0.checked_add(other.0)?;
        if (self.0 ^ other.0 ^ sum) & CARRY_MASK != 0 {
            None
        } else {
            Some(Monomial(sum))
        }
    }

    /// The monomial with `var`'s exponent replaced by `e`.
    pub fn with_exponent(self, var: usize, e: u32) -> Monomial {
        debug_assert!(e <= MAX_EXPONENT && var < MAX_VARS);
        let mask = !(0xffu128 << (8 * var));
        Monomial((self.0 & mask) | ((e as u128) << (8 * var)))
    }

    /// True when every variable at index `>= nvars` has exponent zero.
    pub fn fits(self, nvars: usize) -> bool {
        nvars >= MAX_VARS || self.0 >> (8 * nvars) == 0
    }
}

/// Multivariate polynomial with complex coefficients and no stored zeros.
#[derive(Clone, Default)]
pub struct SparsePolynomial {
    nvars: usize,
    terms: FxHashMap<Monomial, Complex64>,
}

fn negligible(c: Complex64) -> bool {
    c.norm() < PRUNE
}

impl SparsePolynomial {
    pub fn new(nvars: usize) -> Result<Self> {
        Error::check_budget("polynomial variables", nvars, MAX_VARS)?;
        Ok(Self {
            nvars,
            terms: FxHashMap::default(),
        })
    }

    pub fn constant(nvars: usize, c: Complex64) -> Result<Self> {
        let mut p = Self::new(nvars)?;
        p.add_term(Monomial::ONE, c);
        Ok(p)
    }

    /// The polynomial `x_var`.
    pub fn variable(nvars: usize, var: usize) -> Result<Self> {
        if var >= nvars {
            return Err(Error::invalid(format!("variable {var} out of range for {nvars} variables")));
        }
        let mut p = Self::new(nvars)?;
        p.add_term(Monomial::var(var, 1)?, Complex64::new(1.0, 0.0));
        Ok(p)
    }

    /// Single term `c · x^exps`.
    pub fn term(nvars: usize, exps: &[u32], c: Complex64) -> Result<Self> {
        if exps.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: exps.len(),
            });
        }
        let mut p = Self::new(nvars)?;
        p.add_term(Monomial::from_exponents(exps)?, c);
        Ok(p)
    }

    /// Accumulates `(monomial, coefficient)` pairs, summing repeats.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Complex64)>) -> Result<Self> {
        let mut p = Self::new(nvars)?;
        for (m, c) in terms {
            if !m.fits(nvars) {
                return Err(Error::invalid("monomial uses a variable beyond nvars"));
            }
            *p.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.prune();
        Ok(p)
    }

    /// `x_i − x_j`.
    pub fn difference(nvars: usize, i: usize, j: usize) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::from_terms(nvars, [(Monomial::var(i, 1)?, one), (Monomial::var(j, 1)?, -one)])
    }

    /// `∏_{i<j} (x_{v_i} − x_{v_j})^power` over the listed variables.
    pub fn vandermonde(nvars: usize, vars: &[usize], power: u32) -> Result<Self> {
        let mut acc = Self::constant(nvars, Complex64::new(1.0, 0.0))?;
        for a in 0..vars.len() {
            for b in a + 1..vars.len() {
                let f = Self::difference(nvars, vars[a], vars[b])?.pow(power)?;
                acc = acc.mul(&f)?;
            }
        }
        Ok(acc)
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        if negligible(c) {
            return;
        }
        let e = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if negligible(*e) {
            self.terms.remove(&m);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !negligible(*c));
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    /// Terms sorted by monomial, the canonical order for deterministic reductions.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Complex64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|(m, _)| *m);
        v
    }

    pub fn coefficient(&self, exps: &[u32]) -> Complex64 {
        Monomial::from_exponents(exps)
            .ok()
            .and_then(|m| self.terms.get(&m).copied())
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coefficient_of(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Drops every term with modulus at or below `tol`.
    pub fn truncated(&self, tol: f64) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(m, c)| (*m, *c)).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in other.sorted_terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        };
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let large_terms = large.sorted_terms();
        let mut terms: FxHashMap<Monomial, Complex64> = FxHashMap::default();
        terms.reserve(large.len() * small.len().min(8));
        for (ma, ca) in small.sorted_terms() {
            for &(mb, cb) in &large_terms {
                let m = ma
                    .checked_mul(mb)
                    .ok_or_else(|| Error::budget("monomial exponent", MAX_EXPONENT as usize + 1, MAX_EXPONENT as usize))?;
                *terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        let mut out = Self {
            nvars: self.nvars,
            terms,
        };
        out.prune();
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::constant(self.nvars, Complex64::new(1.0, 0.0))?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Evaluates at a point, summing terms in canonical order.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let powers: Vec<Vec<Complex64>> = (0..self.nvars)
            .map(|v| {
                let d = self.degree_in(v) as usize;
                let mut p = Vec::with_capacity(d + 1);
                p.push(Complex64::new(1.0, 0.0));
                for i in 0..d {
                    p.push(p[i] * point[v]);
                }
                p
            })
            .collect();
        Ok(self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                (0..self.nvars).fold(c, |acc, v| acc * powers[v][m.exponent(v) as usize])
            })
            .sum())
    }

    /// Substitutes numeric values for some variables, keeping the variable count.
    pub fn partial_eval(&self, vars: &[usize], values: &[Complex64]) -> Result<Self> {
        if vars.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: vars.len(),
                got: values.len(),
            });
        }
        let mut out = Self::new(self.nvars)?;
        for (m, c) in self.sorted_terms() {
            let mut coef = c;
            let mut mono = m;
            for (&v, &x) in vars.iter().zip(values) {
                let e = m.exponent(v);
                if e > 0 {
                    coef *= x.powu(e);
                    mono = mono.with_exponent(v, 0);
                }
            }
            out.add_term(mono, coef);
        }
        Ok(out)
    }

    /// Exact division by `x_i − x_j`. Returns the quotient and the largest
    /// remainder coefficient (zero when the division is exact).
    pub fn divide_by_difference(&self, i: usize, j: usize) -> Result<(Self, f64)> {
        if i >= self.nvars || j >= self.nvars || i == j {
            return Err(Error::invalid("divide_by_difference needs two distinct variables"));
        }
        let d = self.degree_in(i);
        // slices c_e: coefficient polynomials of x_i^e
        let mut slices: Vec<Self> = vec![Self::new(self.nvars)?; d as usize + 1];
        for (m, c) in self.sorted_terms() {
            let e = m.exponent(i) as usize;
            slices[e].add_term(m.with_exponent(i, 0), c);
        }
        let xj = Self::variable(self.nvars, j)?;
        let mut quotient = Self::new(self.nvars)?;
        let mut carry = Self::new(self.nvars)?;
        for e in (1..=d as usize).rev() {
            let q = slices[e].add(&carry)?;
            for (m, c) in q.sorted_terms() {
                quotient.add_term(m.with_exponent(i, (e - 1) as u32), c);
            }
            carry = q.mul(&xj)?;
        }
        let remainder = slices[0].add(&carry)?;
        Ok((quotient, remainder.max_coefficient()))
    }
}

impl PartialEq for SparsePolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl fmt::Debug for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparsePolynomial")
            .field("nvars", &self.nvars)
            .field(
                "terms",
                &self
                    .sorted_terms()
                    .into_iter()
                    .map(|(m, c)| (m.exponents(self.nvars), c))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

pub fn poly_add(p: &SparsePolynomial, q: &SparsePolynomial) -> Result<SparsePolynomial> {
    p.add(q)
}

pub fn poly_mul(p: &SparsePolynomial, q: &SparsePolynomial) -> Result<SparsePolynomial> {
    p.mul(q)
}

pub fn poly_scale(p: &SparsePolynomial, s: Complex64) -> SparsePolynomial {
    p.scale(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vandermonde;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn square_of_variable() {
        let x = SparsePolynomial::variable(1, 0).unwrap();
        let sq = poly_mul(&x, &x).unwrap();
        assert_eq!(sq, SparsePolynomial::term(1, &[2], c(1.0)).unwrap());
    }

    #[test]
    fn times_zero_is_empty() {
        let x = SparsePolynomial::variable(2, 1).unwrap();
        let z = SparsePolynomial::new(2).unwrap();
        assert!(poly_mul(&x, &z).unwrap().is_zero());
        assert!(poly_scale(&x, c(0.0)).is_zero());
    }

    #[test]
    fn vandermonde_expansion_evaluates() {
        let d = SparsePolynomial::vandermonde(3, &[0, 1, 2], 1).unwrap();
        let v = d.eval(&[c(3.0), c(2.0), c(1.0)]).unwrap();
        assert_eq!(v, vandermonde(&[c(3.0), c(2.0), c(1.0)]));
        assert_eq!(v, c(2.0));
    }

    #[test]
    fn mismatched_nvars_rejected() {
        let a = SparsePolynomial::variable(1, 0).unwrap();
        let b = SparsePolynomial::variable(2, 0).unwrap();
        assert!(poly_add(&a, &b).is_err());
        assert!(poly_mul(&a, &b).is_err());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let x = SparsePolynomial::variable(1, 0).unwrap();
        assert!(x.sub(&x).unwrap().is_zero());
    }

    #[test]
    fn tiny_coefficients_are_pruned() {
        let p = SparsePolynomial::constant(1, c(1e-301)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn monomial_overflow_detected() {
        let a = Monomial::var(3, 200).unwrap();
        let b = Monomial::var(3, 100).unwrap();
        assert!(a.checked_mul(b).is_none());
        let top = Monomial::var(15, 255).unwrap();
        assert!(top.checked_mul(Monomial::var(15, 1).unwrap()).is_none());
        let ok = a.checked_mul(Monomial::var(2, 255).unwrap()).unwrap();
        assert_eq!(ok.exponent(3), 200);
        assert_eq!(ok.exponent(2), 255);
    }

    #[test]
    fn divide_by_difference_is_exact() {
        let d = SparsePolynomial::vandermonde(3, &[0, 1, 2], 2).unwrap();
        let (q, rem) = d.divide_by_difference(0, 1).unwrap();
        assert_eq!(rem, 0.0);
        let back = q.mul(&SparsePolynomial::difference(3, 0, 1).unwrap()).unwrap();
        assert_eq!(back, d);
        let (_, rem) = SparsePolynomial::variable(2, 0).unwrap().divide_by_difference(0, 1).unwrap();
        assert!(rem > 0.0);
    }

    #[test]
    fn partial_eval_matches_full_eval() {
        let d = SparsePolynomial::vandermonde(3, &[0, 1, 2], 2).unwrap();
        let pt = [c(0.3), Complex64::new(1.1, 0.2), c(-0.7)];
        let part = d.partial_eval(&[1, 2], &pt[1..]).unwrap();
        let full = d.eval(&pt).unwrap();
        assert!((part.eval(&pt).unwrap() - full).norm() < 1e-14);
        assert_eq!(part.degree_in(1), 0);
    }
}

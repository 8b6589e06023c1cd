use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparsePolynomial;

pub const MAX_MOMENT: usize = 400;

/// The one-dimensional weight `e^{−a t² + b t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianLinearForm {
    pub a: f64,
    #[serde(with = "crate::complex_serde")]
    pub b: Complex64,
}

impl GaussianLinearForm {
    pub fn new(a: f64, b: Complex64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid("Gaussian form needs a > 0"));
        }
        Ok(Self { a, b })
    }

    /// `e^{b²/4a} √(π/a)`, the integral of the weight itself.
    pub fn mass(&self) -> Complex64 {
        (self.b * self.b / (4.0 * self.a)).exp() * (std::f64::consts::PI / self.a).sqrt()
    }

    /// Center of the shifted contour, `b/(2a)`.
    pub fn center(&self) -> Complex64 {
        self.b / (2.0 * self.a)
    }
}

/// `E[(s + c)^m]` for `s ~ N(0, 1/(2a))`, by the closed binomial sum
/// `Σ_j C(m,2j) c^{m−2j} (2j−1)!! / (2a)^j`.
pub fn normalized_moment(m: usize, a: f64, c: Complex64) -> Complex64 {
    // f_j = C(m,2j)(2j−1)!!/(2a)^j, built by ratios so nothing overflows early
    let mut f = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=m / 2 {
        sum += c.powu((m - 2 * j) as u32) * f;
        let r = (m - 2 * j) as f64 * (m - 2 * j).saturating_sub(1) as f64;
        f *= r / ((2 * j + 2) as f64 * 2.0 * a);
    }
    sum
}

/// `∫ t^m e^{−a t² + b t} dt` in closed form after the contour shift `t = s + b/(2a)`.
pub fn gaussian_moment_1d(m: usize, form: &GaussianLinearForm) -> Result<Complex64> {
    Error::check_budget("Gaussian moment order", m, MAX_MOMENT)?;
    Ok(form.mass() * normalized_moment(m, form.a, form.center()))
}

/// `μ_n = E[(s + c)^n]` for `n = 0..=max` by the recurrence
/// `μ_{n+1} = c μ_n + (n/(2a)) μ_{n−1}`.
pub(crate) fn moment_table(max: usize, a: f64, c: Complex64) -> Vec<Complex64> {
    let mut mu = Vec::with_capacity(max + 1);
    mu.push(Complex64::new(1.0, 0.0));
    if max >= 1 {
        mu.push(c);
    }
    let inv = 1.0 / (2.0 * a);
    for n in 1..max {
        let next = c * mu[n] + mu[n - 1] * (n as f64 * inv);
        mu.push(next);
    }
    mu
}

/// `E[s^n]` for centered `s ~ N(0, 1/(2a))`.
pub(crate) fn centered_moments(max: usize, a: f64) -> Vec<f64> {
    let mut out = vec![0.0; max + 1];
    out[0] = 1.0;
    let var = 1.0 / (2.0 * a);
    for n in (2..=max).step_by(2) {
        out[n] = out[n - 2] * (n - 1) as f64 * var;
    }
    out
}

/// `∫ p(t) ∏_v e^{−a_v t_v² + b_v t_v} dt`, summing monomials in canonical order.
pub fn integrate_poly_gaussian(p: &SparsePolynomial, forms: &[GaussianLinearForm]) -> Result<Complex64> {
    if forms.len() != p.nvars() {
        return Err(Error::DimensionMismatch {
            expected: p.nvars(),
            got: forms.len(),
        });
    }
    let tables: Vec<Vec<Complex64>> = forms
        .iter()
        .enumerate()
        .map(|(v, f)| {
            let d = p.degree_in(v) as usize;
            Error::check_budget("Gaussian moment order", d, MAX_MOMENT)?;
            let mass = f.mass();
            Ok(moment_table(d, f.a, f.center()).into_iter().map(|m| m * mass).collect())
        })
        .collect::<Result<_>>()?;
    Ok(p.sorted_terms()
        .into_iter()
        .map(|(m, c)| tables.iter().enumerate().fold(c, |acc, (v, t)| acc * t[m.exponent(v) as usize]))
        .sum())
}

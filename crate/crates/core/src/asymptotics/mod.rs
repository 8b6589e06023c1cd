//! Large-N predictions: semicircle densities, saddle points, the universal
//! constants γ_k, moment asymptotics, and the scaling-limit kernels.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::f64::consts::PI;

use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};

pub const GAMMA_MAX_K: usize = 20;
/// Below this |x| the kernels switch to their four-term Taylor series.
///
/// The closed form `cos x/x² − sin x/x³` loses about `3ε/x²` to cancellation,
/// which is 3e−11 relative at x = 0.01; at 0.1 both sides stay below 1e−13.
pub const KERNEL_SERIES_CUTOFF: f64 = 0.1;

/// Semicircle density: `√(2−λ²)/π` (GOE) or `√(4−λ²)/(2π)` (GUE), zero outside.
pub fn rho(kind: EnsembleKind, lambda: f64) -> f64 {
    let r2 = edge(kind).powi(2);
    let d = r2 - lambda * lambda;
    if d <= 0.0 {
        return 0.0;
    }
    match kind {
        EnsembleKind::Goe => d.sqrt() / PI,
        EnsembleKind::Gue => d.sqrt() / (2.0 * PI),
    }
}

/// Spectral edge: √2 for GOE, 2 for GUE.
pub fn edge(kind: EnsembleKind) -> f64 {
    match kind {
        EnsembleKind::Goe => std::f64::consts::SQRT_2,
        EnsembleKind::Gue => 2.0,
    }
}

fn check_bulk(kind: EnsembleKind, lambda: f64) -> Result<()> {
    if !(lambda.abs() < edge(kind)) {
        return Err(Error::invalid(format!("λ = {lambda} is not strictly inside the support")));
    }
    Ok(())
}

/// γ_k as an exact rational.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalConstant {
    pub k: usize,
    pub ensemble: EnsembleKind,
    pub value: BigRational,
}

impl UniversalConstant {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for UniversalConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("UniversalConstant", 5)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("ensemble", &self.ensemble)?;
        st.serialize_field("numerator", &self.value.numer().to_string())?;
        st.serialize_field("denominator", &self.value.denom().to_string())?;
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Product forms: GOE `∏_{l=1}^k (2l−1)!/(2k+2l−1)!`, GUE `∏_{l=0}^{k−1} l!/(k+l)!`.
pub fn gamma_k(kind: EnsembleKind, k: usize) -> Result<UniversalConstant> {
    check_gamma_k(k)?;
    let value = match kind {
        EnsembleKind::Goe => (1..=k).fold(BigRational::one(), |acc, l| acc * ratio(factorial(2 * l - 1), factorial(2 * k + 2 * l - 1))),
        EnsembleKind::Gue => (0..k).fold(BigRational::one(), |acc, l| acc * ratio(factorial(l), factorial(k + l))),
    };
    Ok(UniversalConstant { k, ensemble: kind, value })
}

fn check_gamma_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("γ_k needs k ≥ 1"));
    }
    Error::check_budget("γ_k order", k, GAMMA_MAX_K)
}

/// Binomial forms: GOE `C(2k,k) [∏_1^k (2l)!]² / ∏_1^{2k} (2l)!`,
/// GUE `C(2k,k) h_k²/h_{2k}` with `h_k = ∏_0^k l!`.
pub fn gamma_k_binomial(kind: EnsembleKind, k: usize) -> Result<UniversalConstant> {
    check_gamma_k(k)?;
    let central = ratio(factorial(2 * k), factorial(k) * factorial(k));
    let value = match kind {
        EnsembleKind::Goe => {
            let top: BigInt = (1..=k).map(|l| factorial(2 * l)).product();
            let bottom: BigInt = (1..=2 * k).map(|l| factorial(2 * l)).product();
            central * ratio(top.clone() * top, bottom)
        }
        EnsembleKind::Gue => {
            let h = |m: usize| -> BigInt { (0..=m).map(factorial).product() };
            central * ratio(h(k) * h(k), h(2 * k))
        }
    };
    Ok(UniversalConstant { k, ensemble: kind, value })
}

/// The large-N moment formulas as written:
/// GOE `γ_k N^{2k²} (2πρ)^{2k²+k}`, GUE `γ_k (2πNρ)^{k²}`.
///
/// These drop the λ-independent exponential and power-of-two factors that the
/// monic normalization carries; see [`monic_moment_asymptotic`].
pub fn moment_asymptotic(kind: EnsembleKind, n: usize, k: usize, lambda: f64) -> Result<f64> {
    check_bulk(kind, lambda)?;
    let g = gamma_k(kind, k)?.to_f64();
    let (nf, kf) = (n as f64, k as f64);
    let two_pi_rho = 2.0 * PI * rho(kind, lambda);
    Ok(match kind {
        EnsembleKind::Goe => g * nf.powf(2.0 * kf * kf) * two_pi_rho.powf(2.0 * kf * kf + kf),
        EnsembleKind::Gue => g * (nf * two_pi_rho).powf(kf * kf),
    })
}

/// Large-N `E[det(λ − X)^{2k}]` on the monic normalization:
/// GOE `2^{−k(2k+1)/2} γ_k N^{2k²} (2πρ)^{2k²+k} e^{Nk(λ²−1−ln 2)}`,
/// GUE `γ_k (2πNρ)^{k²} e^{Nk(λ²/2−1)}`.
pub fn monic_moment_asymptotic(kind: EnsembleKind, n: usize, k: usize, lambda: f64) -> Result<f64> {
    let base = moment_asymptotic(kind, n, k, lambda)?;
    let (nf, kf) = (n as f64, k as f64);
    let l2 = lambda * lambda;
    Ok(match kind {
        EnsembleKind::Goe => base * 2f64.powf(-kf * (2.0 * kf + 1.0) / 2.0) * (nf * kf * (l2 - 1.0 - std::f64::consts::LN_2)).exp(),
        EnsembleKind::Gue => base * (nf * kf * (l2 / 2.0 - 1.0)).exp(),
    })
}

/// The two saddle points of the one-variable dual exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaddleData {
    pub ensemble: EnsembleKind,
    pub lambda: f64,
    #[serde(with = "crate::complex_serde")]
    pub plus: Complex64,
    #[serde(with = "crate::complex_serde")]
    pub minus: Complex64,
}

impl SaddleData {
    /// Residual of the defining quadratic at both roots.
    pub fn residual(&self) -> f64 {
        let i = Complex64::i();
        let q = |t: Complex64| match self.ensemble {
            EnsembleKind::Goe => 2.0 * t * t - 2.0 * i * self.lambda * t - 1.0,
            EnsembleKind::Gue => t * t - i * self.lambda * t - 1.0,
        };
        q(self.plus).norm().max(q(self.minus).norm())
    }
}

/// GOE: roots of `2t² − 2iλt − 1 = 0`, `t± = (iλ ± √(2−λ²))/2`.
/// GUE: roots of `b² − iλb − 1 = 0`, `b± = (iλ ± √(4−λ²))/2`.
pub fn saddle_points(kind: EnsembleKind, lambda: f64) -> Result<SaddleData> {
    check_bulk(kind, lambda)?;
    let r = (edge(kind).powi(2) - lambda * lambda).sqrt();
    let c = Complex64::new(0.0, lambda / 2.0);
    Ok(SaddleData {
        ensemble: kind,
        lambda,
        plus: c + r / 2.0,
        minus: c - r / 2.0,
    })
}

/// `cos x/x² − sin x/x³`, with the series `−1/3 + x²/30 − x⁴/840 + x⁶/45360` near 0.
pub fn kernel_goe(x: f64) -> f64 {
    if x.abs() < KERNEL_SERIES_CUTOFF {
        let x2 = x * x;
        return -1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45360.0));
    }
    x.cos() / (x * x) - x.sin() / (x * x * x)
}

/// `sin x / x`, with the series `1 − x²/6 + x⁴/120 − x⁶/5040` near 0.
pub fn kernel_sine(x: f64) -> f64 {
    if x.abs() < KERNEL_SERIES_CUTOFF {
        let x2 = x * x;
        return 1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 - x2 / 5040.0));
    }
    x.sin() / x
}

/// `J_{1/2}(x) = √(2/πx) sin x`.
pub fn bessel_j_half(x: f64) -> f64 {
    (2.0 / (PI * x)).sqrt() * x.sin()
}

/// `J_{3/2}(x) = √(2/πx) (sin x/x − cos x)`.
pub fn bessel_j_three_halves(x: f64) -> f64 {
    (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos())
}

/// Largest relative deviation over the grid of
/// `kernel_goe(x) = −√(π/2x³) J_{3/2}(x)` and `kernel_sine(x) = √(π/2x) J_{1/2}(x)`.
pub fn bessel_half_identity_check(grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in grid {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid("Bessel grid points must be positive"));
        }
        let goe = -(PI / (2.0 * x * x * x)).sqrt() * bessel_j_three_halves(x);
        let sine = (PI / (2.0 * x)).sqrt() * bessel_j_half(x);
        worst = worst.max(((kernel_goe(x) - goe) / goe).abs());
        worst = worst.max(((kernel_sine(x) - sine) / sine).abs());
    }
    Ok(worst)
}

/// The pair `center ± x/(2πNρ(center))` whose GOE two-point function the
/// kernel describes at scaling variable x.
pub fn scaling_points(n: usize, center: f64, x: f64) -> Result<(f64, f64)> {
    check_bulk(EnsembleKind::Goe, center)?;
    let d = x / (2.0 * PI * n as f64 * rho(EnsembleKind::Goe, center));
    Ok((center + d, center - d))
}

/// The kernel value predicted for the GOE two-point function at scaling
/// variable x, up to one constant per (N, center).
pub fn scaling_limit_prediction(n: usize, center: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    check_bulk(EnsembleKind::Goe, center)?;
    Ok(kernel_goe(x))
}

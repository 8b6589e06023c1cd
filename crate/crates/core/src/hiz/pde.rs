//! Finite-difference checks of the radial equations solved by the HIZ integrands.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chi::{ChiTable, TauTable};
use super::group::hiz_unitary;
use crate::error::{Error, Result};
use crate::linalg::vandermonde_real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeCheckSpec {
    pub beta: u8,
    pub k: usize,
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub ts: Vec<f64>,
    pub step: f64,
}

impl PdeCheckSpec {
    pub fn new(beta: u8, n: usize, lambdas: Vec<f64>, ts: Vec<f64>, step: f64) -> Result<Self> {
        let spec = Self {
            beta,
            k: lambdas.len(),
            n,
            lambdas,
            ts,
            step,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.beta != 2 && self.beta != 4 {
            return Err(Error::invalid("β must be 2 or 4"));
        }
        if self.lambdas.len() != self.k || self.ts.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: self.ts.len().min(self.lambdas.len()),
            });
        }
        if self.n == 0 || self.k == 0 {
            return Err(Error::invalid("N and k must be positive"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid("finite-difference step must be positive"));
        }
        if vandermonde_real(&self.ts) == 0.0 || vandermonde_real(&self.lambdas) == 0.0 {
            return Err(Error::degenerate("t and λ values must be distinct"));
        }
        Ok(())
    }
}

/// Finite-difference step used by the verification suites.
pub const PDE_STEP: f64 = 1e-4;

/// A random point away from coincidences: λ and t uniform in [−1, 1] with
/// pairwise gaps of at least 0.15, N uniform in 2..=5.
///
/// N = 1 is left out because small `Nλ` makes the β = 2 plane-wave sum
/// cancel to a few digits before differencing.
pub fn generic_pde_point<R: Rng + ?Sized>(rng: &mut R, beta: u8, k: usize) -> Result<PdeCheckSpec> {
    let n = rng.gen_range(2..=5);
    let draw = |rng: &mut R| loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ok = (0..k).all(|i| (i + 1..k).all(|j| (v[i] - v[j]).abs() >= 0.15));
        if ok {
            return v;
        }
    };
    let lambdas = draw(rng);
    let ts = draw(rng);
    PdeCheckSpec::new(beta, n, lambdas, ts, PDE_STEP)
}

/// Second-order central differences: `(f, Σ_i ∂_i f weighted by w_i, Σ_i ∂_i² f)`.
fn derivatives<F>(f: &F, t: &[f64], h: f64, w: &[f64]) -> Result<(Complex64, Complex64, Complex64)>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let f0 = f(t)?;
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    let mut p = t.to_vec();
    for i in 0..t.len() {
        p[i] = t[i] + h;
        let fp = f(&p)?;
        p[i] = t[i] - h;
        let fm = f(&p)?;
        p[i] = t[i];
        first += w[i] * (fp - fm) / (2.0 * h);
        second += (fp - 2.0 * f0 + fm) / (h * h);
    }
    Ok((f0, first, second))
}

/// Relative residual of the radial equation at one point.
///
/// β = 4: `[Σ ∂_i² + 2iN Σ λ_i ∂_i − Σ_{i<j} 4/(t_i − t_j)²] χ`.
/// β = 2: `[Σ ∂_i² + N² Σ λ_i²] ψ` for `ψ = Δ(t) · hiz_unitary`, a sum of plane waves.
/// The result is `|R|` over the largest of the term magnitudes.
pub fn pde_residual(spec: &PdeCheckSpec) -> Result<f64> {
    spec.validate()?;
    match spec.beta {
        4 => pde_residual_with(&ChiTable::standard(spec.k)?, spec),
        _ => unitary_residual(spec),
    }
}

/// The β = 4 residual for an arbitrary coefficient table (sensitivity controls).
pub fn pde_residual_with(chi: &ChiTable, spec: &PdeCheckSpec) -> Result<f64> {
    spec.validate()?;
    if spec.beta != 4 || chi.k() != spec.k {
        return Err(Error::invalid("table and spec disagree on β or k"));
    }
    let nf = spec.n as f64;
    let lam: Vec<Complex64> = spec.lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    let f = |t: &[f64]| -> Result<Complex64> {
        let tc: Vec<Complex64> = t.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        chi.eval(&TauTable::from_points(nf, &tc, &lam)?)
    };
    let (f0, first, second) = derivatives(&f, &spec.ts, spec.step, &spec.lambdas)?;
    let drift = Complex64::new(0.0, 2.0 * nf) * first;
    let mut inv = 0.0;
    for i in 0..spec.k {
        for j in i + 1..spec.k {
            inv += 1.0 / (spec.ts[i] - spec.ts[j]).powi(2);
        }
    }
    let potential = f0 * (4.0 * inv);
    let scale = second.norm().max(drift.norm()).max(potential.norm());
    Ok((second + drift - potential).norm() / scale)
}

fn unitary_residual(spec: &PdeCheckSpec) -> Result<f64> {
    let nf = spec.n as f64;
    let f = |t: &[f64]| -> Result<Complex64> { Ok(vandermonde_real(t) * hiz_unitary(spec.n, t, &spec.lambdas)?) };
    let zeros = vec![0.0; spec.k];
    let (f0, _, second) = derivatives(&f, &spec.ts, spec.step, &zeros)?;
    let energy = f0 * (nf * nf * spec.lambdas.iter().map(|l| l * l).sum::<f64>());
    let scale = second.norm().max(energy.norm());
    Ok((second + energy).norm() / scale)
}

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{EnsembleKind, EnsembleSpec, LambdaPoints};
use crate::error::{Error, Result};
use crate::linalg::{det_complex_in_place, det_real_in_place, ComplexSquareMatrix};
use crate::stats::{run_blocks, McEstimate};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Real symmetric draw into `out` (row-major N×N).
fn fill_goe<R: Rng + ?Sized>(n: usize, source: Option<&[f64]>, rng: &mut R, out: &mut [f64]) {
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    for i in 0..n {
        let shift = source.map_or(0.0, |a| a[i]);
        out[i * n + i] = shift + sd_diag * normal(rng);
        for j in i + 1..n {
            let x = sd_off * normal(rng);
            out[i * n + j] = x;
            out[j * n + i] = x;
        }
    }
}

/// Complex Hermitian draw into `out` (row-major N×N).
fn fill_gue<R: Rng + ?Sized>(n: usize, source: Option<&[f64]>, rng: &mut R, out: &mut [Complex64]) {
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    for i in 0..n {
        let shift = source.map_or(0.0, |a| a[i]);
        out[i * n + i] = Complex64::new(shift + sd_diag * normal(rng), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
            out[i * n + j] = z;
            out[j * n + i] = z.conj();
        }
    }
}

/// One draw of `X = A + X₀` with `X₀` from the ensemble's Gaussian weight.
///
/// GOE: `X_ii ~ N(0, 1/N)`, `X_ij ~ N(0, 1/(2N))`. GUE: `X_ii ~ N(0, 1/N)`,
/// off-diagonal real and imaginary parts each `N(0, 1/(2N))`.
pub fn sample_matrix<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> ComplexSquareMatrix {
    let n = spec.dim();
    match spec.kind() {
        EnsembleKind::Goe => {
            let mut buf = vec![0.0; n * n];
            fill_goe(n, spec.source(), rng, &mut buf);
            ComplexSquareMatrix::from_real(n, &buf).expect("finite draw")
        }
        EnsembleKind::Gue => {
            let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
            fill_gue(n, spec.source(), rng, &mut buf);
            ComplexSquareMatrix::new(n, buf).expect("finite draw")
        }
    }
}

struct Scratch<T> {
    x: Vec<T>,
    work: Vec<T>,
}

/// Monte Carlo estimate of `E[∏_i det(λ_i − X)]`.
///
/// Bitwise reproducible for fixed `(seed, samples)` whatever the thread count.
pub fn mc_correlator(spec: &EnsembleSpec, lambdas: &LambdaPoints, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::invalid("Monte Carlo needs at least 2 samples"));
    }
    let n = spec.dim();
    let lams = lambdas.values();
    let source = spec.source();
    let est = match spec.kind() {
        EnsembleKind::Goe => run_blocks(
            samples,
            seed,
            || Scratch {
                x: vec![0.0; n * n],
                work: vec![0.0; n * n],
            },
            |rng, s| {
                fill_goe(n, source, rng, &mut s.x);
                let mut prod = 1.0;
                for &lam in lams {
                    for (w, x) in s.work.iter_mut().zip(&s.x) {
                        *w = -x;
                    }
                    for i in 0..n {
                        s.work[i * n + i] += lam;
                    }
                    prod *= det_real_in_place(&mut s.work, n);
                }
                Complex64::new(prod, 0.0)
            },
        ),
        EnsembleKind::Gue => run_blocks(
            samples,
            seed,
            || Scratch {
                x: vec![Complex64::new(0.0, 0.0); n * n],
                work: vec![Complex64::new(0.0, 0.0); n * n],
            },
            |rng, s| {
                fill_gue(n, source, rng, &mut s.x);
                let mut prod = Complex64::new(1.0, 0.0);
                for &lam in lams {
                    for (w, x) in s.work.iter_mut().zip(&s.x) {
                        *w = -x;
                    }
                    for i in 0..n {
                        s.work[i * n + i] += lam;
                    }
                    prod *= det_complex_in_place(&mut s.work, n);
                }
                prod
            },
        ),
    };
    Ok(est)
}

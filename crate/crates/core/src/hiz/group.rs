//! Group integrals `∫ e^{iN tr(X g Y g⁻¹)} dg` over U(k) and Sp(k).

use num_complex::Complex64;

use super::chi::{ChiTable, TauTable};
use crate::error::{Error, Result};
use crate::linalg::{haar_sample, lu_det, vandermonde_real, ComplexSquareMatrix, Group};
use crate::stats::{run_blocks, McEstimate};

pub const MIN_GROUP_SAMPLES: u64 = 1000;

fn check_distinct(v: &[f64], what: &str) -> Result<()> {
    if vandermonde_real(v) == 0.0 {
        return Err(Error::degenerate(format!("coincident {what}")));
    }
    Ok(())
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::invalid("at least one point is required"));
    }
    Ok(())
}

/// The unitary HIZ integral `∫_{U(k)} e^{iN tr(diag(x) U diag(y) U†)} dU`
/// in the determinant form
/// `(iN)^{−k(k−1)/2} ∏_{p<k} p! · det(e^{iN x_i y_j}) / (Δ(x)Δ(y))`.
pub fn hiz_unitary(n: usize, xs: &[f64], ys: &[f64]) -> Result<Complex64> {
    check_pair(xs, ys)?;
    check_distinct(xs, "x values")?;
    check_distinct(ys, "y values")?;
    let k = xs.len();
    let nf = n as f64;
    let m = ComplexSquareMatrix::from_fn(k, |i, j| Complex64::new(0.0, nf * xs[i] * ys[j]).exp());
    let mut c = Complex64::new(1.0, 0.0);
    for p in 1..k {
        for q in 1..=p {
            c *= q as f64;
        }
    }
    let pairs = (k * (k - 1) / 2) as i32;
    c /= Complex64::new(0.0, nf).powi(pairs);
    Ok(c * lu_det(&m) / (vandermonde_real(xs) * vandermonde_real(ys)))
}

/// Haar Monte Carlo estimate of the group integral. For Sp(k) the diagonal
/// entries are doubled in the 2k×2k embedding and the trace is halved, so the
/// integrand at `g = 1` is `e^{iN Σ x_i y_i}` in both cases.
pub fn group_integral_mc(group: Group, k: usize, n: usize, xs: &[f64], ys: &[f64], samples: u64, seed: u64) -> Result<McEstimate> {
    check_pair(xs, ys)?;
    if xs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: xs.len(),
        });
    }
    if samples < MIN_GROUP_SAMPLES {
        return Err(Error::invalid(format!("group Monte Carlo needs at least {MIN_GROUP_SAMPLES} samples")));
    }
    let nf = n as f64;
    let (dim, weight) = match group {
        Group::Unitary => (k, 1.0),
        Group::CompactSymplectic => (2 * k, 0.5),
    };
    let x: Vec<f64> = (0..dim).map(|a| xs[a % k]).collect();
    let y: Vec<f64> = (0..dim).map(|b| ys[b % k]).collect();
    Ok(run_blocks(
        samples,
        seed,
        || (),
        |rng, _| {
            let u = haar_sample(group, k, rng).element;
            let mut phase = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    phase += x[a] * u[(a, b)].norm_sqr() * y[b];
                }
            }
            Complex64::new(0.0, nf * weight * phase).exp()
        },
    ))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(p, i + 1, out);
            p.swap(i, j);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..k).collect(), 0, &mut out);
    out
}

/// `Σ_σ e^{iN λ·t_σ} χ(τ(t_σ, λ)) / (Δ(t)Δ(λ))²` with `τ_ij = N(λ_i − λ_j)(t_σ(i) − t_σ(j))`.
///
/// Proportional to the Sp(k) integral; the constant is left to the caller.
/// For k = 4 the χ form is the appendix polynomial over `∏τ`, so the
/// `(ΔtΔλ)³` bookkeeping there collapses to the same square.
pub fn symmetrized_hiz_sympl(k: usize, n: usize, ts: &[f64], lambdas: &[f64]) -> Result<Complex64> {
    symmetrized_with(&ChiTable::standard(k)?, n, ts, lambdas)
}

pub(crate) fn symmetrized_with(chi: &ChiTable, n: usize, ts: &[f64], lambdas: &[f64]) -> Result<Complex64> {
    check_inputs(chi.k(), ts, lambdas)?;
    let k = chi.k();
    let nf = n as f64;
    let lam: Vec<Complex64> = lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    let mut max_phase: f64 = 0.0;
    for sigma in permutations(k) {
        let tp: Vec<Complex64> = sigma.iter().map(|&s| Complex64::new(ts[s], 0.0)).collect();
        let phase: f64 = (0..k).map(|i| lambdas[i] * ts[sigma[i]]).sum();
        max_phase = max_phase.max((nf * phase).abs());
        let tau = TauTable::from_points(nf, &tp, &lam)?;
        let term = Complex64::new(0.0, nf * phase).exp() * chi.eval(&tau)?;
        sum += term;
        mag += term.norm();
    }
    let d = vandermonde_real(ts) * vandermonde_real(lambdas);
    let direct = sum / (d * d);
    let direct_err = mag / (d * d).abs();
    if mag <= 1e2 * sum.norm() {
        return Ok(direct);
    }
    // Small τ: the permutation sum cancels through order ε^{3P}. Expanding the
    // exponentials by degree and dropping the orders that vanish identically
    // avoids the cancellation.
    let top = 3 * k * (k - 1) / 2;
    let mut extra = 0;
    let mut bound = 1.0;
    while extra < 200 && bound > 1e-20 {
        extra += 1;
        bound *= max_phase / extra as f64;
    }
    let (coef, scale) = degree_series(chi, n, ts, lambdas, top + extra)?;
    let denom = nf.powi((k * (k - 1) / 2) as i32) * d * d * d;
    let series: Complex64 = coef[top..].iter().sum::<Complex64>() / denom;
    let series_err = scale[top..].iter().sum::<f64>() / denom.abs();
    Ok(if series_err < direct_err { series } else { direct })
}

fn check_inputs(k: usize, ts: &[f64], lambdas: &[f64]) -> Result<()> {
    check_pair(ts, lambdas)?;
    if ts.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: ts.len() });
    }
    check_distinct(ts, "t values")?;
    check_distinct(lambdas, "λ values")
}

/// Coefficients of ε^e, `e = 0..=max`, in `Σ_σ sgn · e^{iεNφ_σ} · (χ∏τ)(ετ_σ)`,
/// together with the summed magnitudes of their contributions.
fn degree_series(chi: &ChiTable, n: usize, ts: &[f64], lambdas: &[f64], max: usize) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let k = chi.k();
    let nf = n as f64;
    let lam: Vec<Complex64> = lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    let mut coef = vec![Complex64::new(0.0, 0.0); max + 1];
    let mut scale = vec![0.0; max + 1];
    for sigma in permutations(k) {
        let tp: Vec<Complex64> = sigma.iter().map(|&s| Complex64::new(ts[s], 0.0)).collect();
        let tau = TauTable::from_points(nf, &tp, &lam)?;
        let sign = crate::linalg::vandermonde(&tp).re.signum() * vandermonde_real(ts).signum();
        let phase = Complex64::new(0.0, nf * (0..k).map(|i| lambdas[i] * ts[sigma[i]]).sum::<f64>());
        for (j, a) in chi.numerator_by_degree(&tau)?.into_iter().enumerate() {
            let mut term = sign * a;
            for e in j..=max {
                coef[e] += term;
                scale[e] += term.norm();
                term *= phase / (e - j + 1) as f64;
            }
        }
    }
    Ok((coef, scale))
}

/// `lim_{ε→0} symmetrized_hiz_sympl(k, N, εt, λ)`, read off exactly from the
/// Taylor coefficients in ε. A function of k and N only.
///
/// Fails with [`Error::Numerical`] if a coefficient below order ε^{3P} does not
/// cancel, which would mean the form is singular at the origin.
pub fn symmetrized_zero_limit(k: usize, n: usize, ts: &[f64], lambdas: &[f64]) -> Result<Complex64> {
    let chi = ChiTable::standard(k)?;
    check_inputs(k, ts, lambdas)?;
    let p = k * (k - 1) / 2;
    let top = 3 * p;
    let (coef, scale) = degree_series(&chi, n, ts, lambdas, top)?;
    for e in 0..top {
        if coef[e].norm() > 1e-9 * scale[e].max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "symmetrized form is singular at the origin: order ε^{e} coefficient {:.3e} does not cancel",
                coef[e].norm()
            )));
        }
    }
    let d = vandermonde_real(ts) * vandermonde_real(lambdas);
    Ok(coef[top] / ((n as f64).powi(p as i32) * d * d * d))
}

/// Constant `c_k(N)` with `∫_{Sp(k)} = c_k(N) · symmetrized_hiz_sympl`, fixed by
/// the value 1 at coincident zero arguments.
pub fn sympl_normalization(k: usize, n: usize) -> Result<f64> {
    let nf = n as f64;
    match k {
        2 => Ok(SYMPL_K2_CONSTANT / nf.powi(2)),
        3 => Ok(SYMPL_K3_CONSTANT / nf.powi(6)),
        4 => Ok(SYMPL_K4_CONSTANT / nf.powi(12)),
        _ => Err(Error::invalid("symplectic HIZ constants exist for k ∈ {2, 3, 4}")),
    }
}

/// `N² · c₂(N) = −3!`.
pub const SYMPL_K2_CONSTANT: f64 = -6.0;
/// `N⁶ · c₃(N) = −6!`.
pub const SYMPL_K3_CONSTANT: f64 = -720.0;
/// `N¹² · c₄(N) = 10!`.
pub const SYMPL_K4_CONSTANT: f64 = 3_628_800.0;

/// The Sp(2) integral in closed form,
/// `e^{iN(λ₁+λ₂)(t₁+t₂)/2} · 3(sin z − z cos z)/z³` with `z = N(λ₁−λ₂)(t₁−t₂)/2`.
pub fn sympl_hiz_k2(n: usize, ts: [f64; 2], lambdas: [f64; 2]) -> Complex64 {
    let nf = n as f64;
    let z = nf * (lambdas[0] - lambdas[1]) * (ts[0] - ts[1]) / 2.0;
    let phase = Complex64::new(0.0, nf * (lambdas[0] + lambdas[1]) * (ts[0] + ts[1]) / 2.0).exp();
    let radial = if z.abs() < 1e-3 {
        // 3(sin z − z cos z)/z³ = 1 − z²/10 + z⁴/280 − …
        let z2 = z * z;
        1.0 - z2 / 10.0 + z2 * z2 / 280.0
    } else {
        3.0 * (z.sin() - z * z.cos()) / (z * z * z)
    };
    phase * radial
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_limit_fixes_the_constants() {
        let ts = [0.3, -0.7, 1.1];
        let ls = [0.5, -0.2, 0.9];
        for n in 1..4 {
            let l2 = symmetrized_zero_limit(2, n, &ts[..2], &ls[..2]).unwrap();
            assert!((l2 * sympl_normalization(2, n).unwrap() - 1.0).norm() < 1e-10, "{l2}");
            let l3 = symmetrized_zero_limit(3, n, &ts, &ls).unwrap();
            assert!((l3 * sympl_normalization(3, n).unwrap() - 1.0).norm() < 1e-9, "{l3}");
        }
    }

    #[test]
    fn k4_limit_is_regular() {
        let ts = [0.2, -0.1, 0.3, -0.25];
        let ls = [0.5, -0.6, 0.1, 0.9];
        for n in 1..4 {
            let l = symmetrized_zero_limit(4, n, &ts, &ls).unwrap();
            assert!((l * sympl_normalization(4, n).unwrap() - 1.0).norm() < 1e-8, "{l}");
        }
    }

    #[test]
    fn small_tau_stays_accurate() {
        // reference from a 60-digit evaluation of the same sum
        let ts = [0.2, -0.1, 0.3, -0.25];
        let ls = [0.5, -0.6, 0.1, 0.9];
        let v = sympl_normalization(4, 1).unwrap() * symmetrized_hiz_sympl(4, 1, &ts, &ls).unwrap();
        assert!((v - Complex64::new(0.9949670899, 0.03359058905)).norm() < 1e-8, "{v}");
        let e = 0.1;
        let v = sympl_normalization(4, 1).unwrap() * symmetrized_hiz_sympl(4, 1, &ts.map(|t| e * t), &ls).unwrap();
        assert!((v - Complex64::new(0.9999495533, 0.003374840243)).norm() < 1e-8, "{v}");
    }

    #[test]
    fn large_tau_uses_the_direct_sum() {
        let ts = [0.4, -0.3, 0.9, -0.8];
        let ls = [0.5, -0.6, 0.1, 0.9];
        let v = sympl_normalization(4, 1).unwrap() * symmetrized_hiz_sympl(4, 1, &ts, &ls).unwrap();
        assert!((v - Complex64::new(0.9612854671, 0.04328706874)).norm() < 1e-8, "{v}");
    }

    #[test]
    fn k2_form_matches_closed_form() {
        let (ts, ls) = ([0.4, -0.9], [1.2, 0.3]);
        for n in 1..5 {
            let v = sympl_normalization(2, n).unwrap() * symmetrized_hiz_sympl(2, n, &ts, &ls).unwrap();
            let c = sympl_hiz_k2(n, ts, ls);
            assert!((v - c).norm() < 1e-12, "{v} {c}");
        }
    }
}

//! Gauss–Hermite rules for `∫ f(x) e^{−x²} dx`.

use crate::error::{Error, Result};

pub const MAX_NODES: usize = 200;

/// Nodes and weights of the n-point rule, nodes in decreasing order.
///
/// Newton iteration on the orthonormal Hermite recurrence with the usual
/// asymptotic starting guesses; the weights sum to `√π`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::budget("quadrature nodes", n, MAX_NODES));
    }
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{−1/4}
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("Gauss–Hermite node {i} of {n} did not converge")));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok((x, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [1, 2, 5, 20, 60] {
            let (_, w) = gauss_hermite(n).unwrap();
            let s: f64 = w.iter().sum();
            assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn exact_for_even_moments() {
        // ∫ x^{2j} e^{−x²} = Γ(j + 1/2)
        let (x, w) = gauss_hermite(8).unwrap();
        let mut gamma = std::f64::consts::PI.sqrt();
        for j in 0..8 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * j)).sum();
            assert!((q - gamma).abs() <= 1e-12 * gamma, "j={j}");
            gamma *= j as f64 + 0.5;
        }
    }

    #[test]
    fn rejects_zero_nodes() {
        assert!(gauss_hermite(0).is_err());
    }
}

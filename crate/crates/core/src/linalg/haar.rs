use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexSquareMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Unitary,
    CompactSymplectic,
}

/// A Haar-distributed element of U(k) (k×k) or Sp(k) (embedded as 2k×2k).
#[derive(Clone, Debug)]
pub struct HaarSample {
    pub group: Group,
    pub k: usize,
    pub element: ComplexSquareMatrix,
}

/// The standard antisymmetric form `J = [[0, I], [−I, 0]]` of size 2k.
pub fn symplectic_form(k: usize) -> ComplexSquareMatrix {
    ComplexSquareMatrix::from_fn(2 * k, |i, j| {
        if j == i + k {
            Complex64::new(1.0, 0.0)
        } else if i == j + k {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Gram–Schmidt step against the stored columns, run twice for stability, then normalize.
fn orthonormalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in basis {
            let p = dot(q, v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
}

/// Draws a Haar element.
///
/// Unitary: Gram–Schmidt QR of a complex Ginibre matrix; the normalization
/// makes R's diagonal real-positive, which is the phase fix that yields Haar.
/// Symplectic: the same over quaternion columns `(v, −J v̄)`, which keeps `U J Uᵀ = J`.
pub fn haar_sample<R: Rng + ?Sized>(group: Group, k: usize, rng: &mut R) -> HaarSample {
    assert!(k >= 1, "group rank must be at least 1");
    let dim = match group {
        Group::Unitary => k,
        Group::CompactSymplectic => 2 * k,
    };
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    let mut partner: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v = gaussian_vector(dim, rng);
        orthonormalize(&mut v, &cols);
        if group == Group::CompactSymplectic {
            // w = −J v̄ = (−v̄_lower, v̄_upper)
            let w: Vec<Complex64> = (0..dim)
                .map(|a| if a < k { -v[a + k].conj() } else { v[a - k].conj() })
                .collect();
            cols.push(v);
            cols.push(w.clone());
            partner.push(w);
        } else {
            cols.push(v);
        }
    }
    let element = match group {
        Group::Unitary => ComplexSquareMatrix::from_fn(dim, |a, j| cols[j][a]),
        Group::CompactSymplectic => ComplexSquareMatrix::from_fn(dim, |a, j| {
            if j < k {
                cols[2 * j][a]
            } else {
                partner[j - k][a]
            }
        }),
    };
    HaarSample { group, k, element }
}

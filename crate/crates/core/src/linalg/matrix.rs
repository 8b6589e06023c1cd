use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexSquareMatrix {
    /// Builds a matrix from row-major entries, rejecting empty or non-finite input.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                for j in 0..n {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when `|m_ij + m_ji| <= tol * max(1, max|m|)` for all entries.
    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        (0..self.dim).all(|i| (0..self.dim).all(|j| (self[(i, j)] + self[(j, i)]).norm() <= tol * scale))
    }

    pub fn lu(&self) -> Lu {
        Lu::factor(self)
    }
}

impl Index<(usize, usize)> for ComplexSquareMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexSquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    dim: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn factor(m: &ComplexSquareMatrix) -> Self {
        let n = m.dim;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Self {
            dim: n,
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        let n = self.dim;
        (0..n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[i * n + i])
    }

    /// Solves `A x = b`; `None` when the factorization hit an exact zero pivot.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.singular || b.len() != self.dim {
            return None;
        }
        let n = self.dim;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i * n + i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<ComplexSquareMatrix> {
        let n = self.dim;
        let mut inv = ComplexSquareMatrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Some(inv)
    }
}

/// Determinant by LU with partial pivoting (threshold 0, always the largest pivot).
pub fn lu_det(m: &ComplexSquareMatrix) -> Complex64 {
    Lu::factor(m).det()
}

/// In-place determinant of a row-major real matrix. Destroys `a`.
pub(crate) fn det_real_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in k..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        let inv = 1.0 / pivot;
        for i in k + 1..n {
            let f = a[i * n + k] * inv;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    det
}

/// In-place determinant of a row-major complex matrix. Destroys `a`.
pub(crate) fn det_complex_in_place(a: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in k + 1..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for j in k..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        let inv = pivot.inv();
        for i in k + 1..n {
            let f = a[i * n + k] * inv;
            for j in k + 1..n {
                let u = a[k * n + j];
                a[i * n + j] -= f * u;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_det_is_one() {
        assert_eq!(lu_det(&ComplexSquareMatrix::identity(3)), c(1.0));
    }

    #[test]
    fn diagonal_det_is_product() {
        let m = ComplexSquareMatrix::from_real(2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(lu_det(&m), c(6.0));
    }

    #[test]
    fn det_times_det_inverse_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = ComplexSquareMatrix::from_fn(6, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let lu = m.lu();
            let inv = lu.inverse().unwrap();
            let prod = lu.det() * lu_det(&inv);
            assert!((prod - c(1.0)).norm() < 1e-10, "{prod}");
        }
    }

    #[test]
    fn triangular_det_is_diagonal_product() {
        let m = ComplexSquareMatrix::from_real(3, &[2.0, 5.0, -1.0, 0.0, 3.0, 7.0, 0.0, 0.0, -4.0]).unwrap();
        assert_eq!(lu_det(&m), c(-24.0));
    }

    #[test]
    fn singular_det_is_zero() {
        let m = ComplexSquareMatrix::from_real(2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(lu_det(&m).norm() < 1e-15);
    }

    #[test]
    fn in_place_paths_match_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..7 {
            let re: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = ComplexSquareMatrix::from_real(n, &re).unwrap();
            let mut a = re.clone();
            let d = det_real_in_place(&mut a, n);
            assert!((c(d) - lu_det(&m)).norm() < 1e-12);
            let mut z = m.as_slice().to_vec();
            assert!((det_complex_in_place(&mut z, n) - lu_det(&m)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ComplexSquareMatrix::new(0, vec![]).is_err());
        assert!(ComplexSquareMatrix::new(2, vec![c(1.0); 3]).is_err());
        assert!(ComplexSquareMatrix::new(1, vec![c(f64::NAN)]).is_err());
    }
}

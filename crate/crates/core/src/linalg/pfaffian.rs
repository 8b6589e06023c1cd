use num_complex::Complex64;

use super::matrix::ComplexSquareMatrix;
use crate::error::{Error, Result};

const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Pfaffian of an even-dimensional antisymmetric matrix, with `Pf [[0, a], [-a, 0]] = a`.
///
/// Dimensions up to 4 use the cofactor expansion; larger ones use a
/// Parlett–Reid style skew elimination pivoting on the largest column entry.
pub fn pfaffian(m: &ComplexSquareMatrix) -> Result<Complex64> {
    let n = m.dim();
    if n % 2 == 1 {
        return Err(Error::invalid(format!("pfaffian needs even dimension, got {n}")));
    }
    if !m.is_antisymmetric(ANTISYMMETRY_TOL) {
        return Err(Error::invalid("pfaffian input is not antisymmetric"));
    }
    let a = |i: usize, j: usize| m[(i, j)];
    match n {
        2 => Ok(a(0, 1)),
        4 => Ok(a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2)),
        _ => Ok(parlett_reid(m.as_slice().to_vec(), n)),
    }
}

fn parlett_reid(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1) * n + k].norm();
        for i in k + 2..n {
            let v = a[i * n + k].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if kp != k + 1 {
            for j in 0..n {
                a.swap((k + 1) * n + j, kp * n + j);
            }
            for i in 0..n {
                a.swap(i * n + k + 1, i * n + kp);
            }
            pf = -pf;
        }
        let piv = a[k * n + k + 1];
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[k * n + j] / piv).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[i * n + k + 1]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[i * n + j] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Self-dual quaternion matrix given by its Hermitian block `B` and antisymmetric block `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfDualQuaternionMatrix {
    b: ComplexSquareMatrix,
    d: ComplexSquareMatrix,
}

impl SelfDualQuaternionMatrix {
    /// Validates `B = B†` and `D = -Dᵀ` exactly as stored.
    pub fn new(b: ComplexSquareMatrix, d: ComplexSquareMatrix) -> Result<Self> {
        if b.dim() != d.dim() {
            return Err(Error::DimensionMismatch {
                expected: b.dim(),
                got: d.dim(),
            });
        }
        let k = b.dim();
        for i in 0..k {
            for j in 0..k {
                if b[(i, j)] != b[(j, i)].conj() {
                    return Err(Error::invalid("B block is not Hermitian"));
                }
                if d[(i, j)] != -d[(j, i)] {
                    return Err(Error::invalid("D block is not antisymmetric"));
                }
            }
        }
        Ok(Self { b, d })
    }

    pub fn zeros(k: usize) -> Self {
        Self {
            b: ComplexSquareMatrix::zeros(k),
            d: ComplexSquareMatrix::zeros(k),
        }
    }

    pub fn k(&self) -> usize {
        self.b.dim()
    }

    pub fn b(&self) -> &ComplexSquareMatrix {
        &self.b
    }

    pub fn d(&self) -> &ComplexSquareMatrix {
        &self.d
    }

    /// The 2k×2k antisymmetric matrix `[[D, Λ − iBᵀ], [−(Λ − iB), D†]]`, with `Λ = diag(shift)`.
    pub fn assemble(&self, shift: &[Complex64]) -> Result<ComplexSquareMatrix> {
        let k = self.k();
        if shift.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: shift.len(),
            });
        }
        let i = Complex64::i();
        let lam = |r: usize, c: usize| if r == c { shift[r] } else { Complex64::new(0.0, 0.0) };
        Ok(ComplexSquareMatrix::from_fn(2 * k, |r, c| match (r < k, c < k) {
            (true, true) => self.d[(r, c)],
            (true, false) => lam(r, c - k) - i * self.b[(c - k, r)],
            (false, true) => -(lam(r - k, c) - i * self.b[(r - k, c)]),
            (false, false) => self.d[(c - k, r - k)].conj(),
        }))
    }
}

/// Quaternionic determinant `(−1)^{k(k−1)/2} Pf M`.
///
/// The sign makes the result `∏ shift` when `B = D = 0`; at `k = 2` this is `−Pf M`.
pub fn qdet(m: &SelfDualQuaternionMatrix, shift: &[Complex64]) -> Result<Complex64> {
    let k = m.k();
    let pf = pfaffian(&m.assemble(shift)?)?;
    Ok(if (k * (k - 1) / 2) % 2 == 0 { pf } else { -pf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu_det;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_antisymmetric(n: usize, rng: &mut impl Rng) -> ComplexSquareMatrix {
        let mut m = ComplexSquareMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = -z;
            }
        }
        m
    }

    #[test]
    fn two_by_two_canonical() {
        let m = ComplexSquareMatrix::from_real(2, &[0.0, 5.0, -5.0, 0.0]).unwrap();
        assert_eq!(pfaffian(&m).unwrap(), c(5.0));
    }

    #[test]
    fn block_diagonal_is_product() {
        let (a, b) = (1.5, -2.5);
        let mut m = ComplexSquareMatrix::zeros(4);
        m[(0, 1)] = c(a);
        m[(1, 0)] = c(-a);
        m[(2, 3)] = c(b);
        m[(3, 2)] = c(-b);
        assert_eq!(pfaffian(&m).unwrap(), c(a * b));
        // the same through the elimination path
        let mut big = ComplexSquareMatrix::zeros(6);
        for (blk, v) in [(0usize, a), (2, b), (4, 3.0)] {
            big[(blk, blk + 1)] = c(v);
            big[(blk + 1, blk)] = c(-v);
        }
        assert!((pfaffian(&big).unwrap() - c(a * b * 3.0)).norm() < 1e-14);
    }

    #[test]
    fn squared_equals_det_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_antisymmetric(8, &mut rng);
        let pf = pfaffian(&m).unwrap();
        let det = lu_det(&m);
        assert!((pf * pf - det).norm() <= 1e-10 * det.norm());
    }

    #[test]
    fn elimination_agrees_with_cofactor_at_4() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_antisymmetric(4, &mut rng);
        let direct = pfaffian(&m).unwrap();
        let elim = parlett_reid(m.as_slice().to_vec(), 4);
        assert!((direct - elim).norm() < 1e-14);
    }

    #[test]
    fn rejects_odd_and_non_antisymmetric() {
        assert!(pfaffian(&ComplexSquareMatrix::zeros(3)).is_err());
        let m = ComplexSquareMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(pfaffian(&m).is_err());
    }

    #[test]
    fn qdet_scalar_case() {
        let q = SelfDualQuaternionMatrix::zeros(1);
        assert_eq!(qdet(&q, &[c(0.7)]).unwrap(), c(0.7));
    }

    #[test]
    fn qdet_explicit_k2_expression() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let b11 = rng.gen_range(-1.0..1.0);
            let b22 = rng.gen_range(-1.0..1.0);
            let b12 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let d = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (l1, l2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let bm = ComplexSquareMatrix::new(2, vec![c(b11), b12, b12.conj(), c(b22)]).unwrap();
            let dm = ComplexSquareMatrix::new(2, vec![c(0.0), d, -d, c(0.0)]).unwrap();
            let q = SelfDualQuaternionMatrix::new(bm, dm).unwrap();
            let i = Complex64::i();
            let expected = d.norm_sqr() + (l1 - i * b11) * (l2 - i * b22) + b12.norm_sqr();
            let got = qdet(&q, &[c(l1), c(l2)]).unwrap();
            assert!((got - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn qdet_zero_blocks_is_product_of_shifts() {
        for k in 1..=4 {
            let shifts: Vec<Complex64> = (0..k).map(|j| Complex64::new(0.3 + j as f64, -0.2 * j as f64)).collect();
            let got = qdet(&SelfDualQuaternionMatrix::zeros(k), &shifts).unwrap();
            let expected = shifts.iter().product::<Complex64>();
            // elimination multiplies the pivots in its own order, so allow a few ulps
            assert!((got - expected).norm() <= 4.0 * f64::EPSILON * expected.norm(), "k={k}");
        }
    }

    #[test]
    fn rejects_non_hermitian_b() {
        let bm = ComplexSquareMatrix::new(1, vec![Complex64::new(0.0, 1.0)]).unwrap();
        assert!(SelfDualQuaternionMatrix::new(bm, ComplexSquareMatrix::zeros(1)).is_err());
    }
}

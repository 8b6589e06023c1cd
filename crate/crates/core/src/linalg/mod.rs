//! Dense linear algebra, special functions, Haar sampling and the sparse
//! polynomial engine used by every exact evaluator.

mod haar;
mod matrix;
mod pfaffian;
mod poly;
mod special;

pub use haar::{haar_sample, symplectic_form, Group, HaarSample};
pub use matrix::{lu_det, ComplexSquareMatrix, Lu};
pub use pfaffian::{pfaffian, qdet, SelfDualQuaternionMatrix};
pub use poly::{poly_add, poly_mul, poly_scale, Monomial, SparsePolynomial, MAX_EXPONENT, MAX_VARS};
pub use special::{binomial, hermite, vandermonde, vandermonde_real};

pub(crate) use matrix::{det_complex_in_place, det_real_in_place};

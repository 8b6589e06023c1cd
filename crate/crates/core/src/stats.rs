//! Streaming statistics and the block-parallel Monte Carlo driver.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Draws per RNG stream. Each block owns stream `block_index` of the seed, so
/// the sample sequence depends only on `(seed, samples)`, never on threads.
pub const BLOCK: u64 = 4096;

/// Welford accumulator over complex samples, tracking the real and
/// imaginary variances separately.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexWelford {
    n: u64,
    mean: Complex64,
    m2_re: f64,
    m2_im: f64,
}

impl ComplexWelford {
    pub fn push(&mut self, z: Complex64) {
        self.n += 1;
        let d = z - self.mean;
        self.mean += d / self.n as f64;
        let d2 = z - self.mean;
        self.m2_re += d.re * d2.re;
        self.m2_im += d.im * d2.im;
    }

    /// Chan et al. pairwise merge.
    pub fn merge(&mut self, other: &ComplexWelford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let wa = self.n as f64;
        let wb = other.n as f64;
        let f = wa * wb / n as f64;
        self.mean += d * (wb / n as f64);
        self.m2_re += other.m2_re + d.re * d.re * f;
        self.m2_im += other.m2_im + d.im * d.im * f;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// Euclidean norm of the real and imaginary standard errors of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let n = self.n as f64;
        ((self.m2_re + self.m2_im) / (n - 1.0) / n).sqrt()
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    #[serde(with = "crate::complex_serde")]
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean − reference| / stderr`.
    pub fn z_score(&self, reference: Complex64) -> f64 {
        (self.mean - reference).norm() / self.stderr
    }
}

/// Runs `draw` `samples` times over seeded blocks in parallel and merges
/// the per-block accumulators in block order.
///
/// `make_state` builds per-block scratch space so `draw` can avoid allocation.
pub(crate) fn run_blocks<S, M, F>(samples: u64, seed: u64, make_state: M, draw: F) -> McEstimate
where
    M: Fn() -> S + Sync,
    F: Fn(&mut ChaCha8Rng, &mut S) -> Complex64 + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<ComplexWelford> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut state = make_state();
            let mut acc = ComplexWelford::default();
            let count = BLOCK.min(samples - b * BLOCK);
            for _ in 0..count {
                acc.push(draw(&mut rng, &mut state));
            }
            acc
        })
        .collect();
    let mut total = ComplexWelford::default();
    for p in &parts {
        total.merge(p);
    }
    McEstimate {
        mean: total.mean(),
        stderr: total.stderr(),
        samples,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut whole = ComplexWelford::default();
        xs.iter().for_each(|&z| whole.push(z));
        let mut a = ComplexWelford::default();
        let mut b = ComplexWelford::default();
        xs[..313].iter().for_each(|&z| a.push(z));
        xs[313..].iter().for_each(|&z| b.push(z));
        a.merge(&b);
        assert!((a.mean() - whole.mean()).norm() < 1e-14);
        assert!((a.stderr() - whole.stderr()).abs() < 1e-14);
    }

    #[test]
    fn independent_of_thread_count() {
        let draw = |rng: &mut ChaCha8Rng, _: &mut ()| Complex64::new(rng.gen::<f64>(), rng.gen::<f64>());
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_blocks(20_000, 9, || (), draw));
        let three = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| run_blocks(20_000, 9, || (), draw));
        assert_eq!(one, three);
    }
}

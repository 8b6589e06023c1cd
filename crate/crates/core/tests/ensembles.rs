use charpoly::ensembles::*;
use charpoly::linalg::ComplexSquareMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lambdas(v: &[f64]) -> LambdaPoints {
    LambdaPoints::new(v.to_vec()).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Number of eigenvalues of the Hermitian `m` below `x`, from the signs of
/// the pivots of an unpivoted LDL* factorization of `m − x`.
fn count_below(m: &ComplexSquareMatrix, x: f64) -> usize {
    let n = m.dim();
    let mut a: Vec<Complex64> = m.as_slice().to_vec();
    for i in 0..n {
        a[i * n + i] -= x;
    }
    let mut negative = 0;
    for p in 0..n {
        let d = a[p * n + p].re;
        if d < 0.0 {
            negative += 1;
        }
        for i in p + 1..n {
            let f = a[i * n + p] / d;
            for j in p + 1..n {
                let v = a[p * n + j];
                a[i * n + j] -= f * v;
            }
        }
    }
    negative
}

fn largest_eigenvalue(m: &ComplexSquareMatrix) -> f64 {
    let n = m.dim();
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if count_below(m, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn median_edge(spec: &EnsembleSpec, draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut edges: Vec<f64> = (0..draws).map(|_| largest_eigenvalue(&sample_matrix(spec, &mut rng))).collect();
    edges.sort_by(f64::total_cmp);
    edges[draws / 2]
}

#[test]
fn eigenvalue_counter_on_a_known_matrix() {
    let m = ComplexSquareMatrix::from_real(3, &[2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
    assert_eq!(count_below(&m, 0.0), 1);
    assert!((largest_eigenvalue(&m) - 2.0).abs() < 1e-12);
}

#[test]
fn goe_diagonal_variance() {
    let spec = EnsembleSpec::goe(50).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let draws = 10_000;
    let var = (0..draws).map(|_| sample_matrix(&spec, &mut rng)[(0, 0)].re.powi(2)).sum::<f64>() / draws as f64;
    assert!((var * 50.0 - 1.0).abs() < 0.05, "variance {var}");
}

#[test]
fn goe_spectral_edge() {
    let edge = median_edge(&EnsembleSpec::goe(50).unwrap(), 41);
    assert!((1.2..=1.6).contains(&edge), "edge {edge}");
}

#[test]
fn gue_spectral_edge() {
    let edge = median_edge(&EnsembleSpec::gue(50).unwrap(), 41);
    assert!((1.75..=2.1).contains(&edge), "edge {edge}");
}

/// Sample moments at 5σ: `Var(X_ii) = 1/N`, `Var(X_ij) = 1/(2N)` for GOE,
/// `E|X_ij|² = 1/N` for GUE.
#[test]
fn entry_covariances() {
    let n = 3;
    let draws = 100_000;
    for kind in [EnsembleKind::Goe, EnsembleKind::Gue] {
        let spec = EnsembleSpec::new(kind, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut diag = Vec::with_capacity(draws);
        let mut off = Vec::with_capacity(draws);
        for _ in 0..draws {
            let x = sample_matrix(&spec, &mut rng);
            assert_eq!(x[(0, 1)], x[(1, 0)].conj());
            if kind == EnsembleKind::Goe {
                assert_eq!(x[(0, 1)].im, 0.0);
            }
            diag.push(x[(1, 1)].re.powi(2));
            off.push(x[(0, 2)].norm_sqr());
        }
        let nf = n as f64;
        let expected_off = match kind {
            EnsembleKind::Goe => 1.0 / (2.0 * nf),
            EnsembleKind::Gue => 1.0 / nf,
        };
        for (vals, expected) in [(diag, 1.0 / nf), (off, expected_off)] {
            let mean = vals.iter().sum::<f64>() / draws as f64;
            let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0)).sqrt();
            let z = (mean - expected).abs() / (sd / (draws as f64).sqrt());
            assert!(z < 5.0, "{kind:?}: mean {mean} vs {expected}, z {z}");
        }
    }
}

#[test]
fn source_is_a_mean_shift() {
    let spec = EnsembleSpec::with_source(EnsembleKind::Goe, 2, Some(vec![0.5, -0.5])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let draws = 20_000;
    let mean = (0..draws).map(|_| sample_matrix(&spec, &mut rng)[(0, 0)].re).sum::<f64>() / draws as f64;
    assert!((mean - 0.5).abs() < 5.0 * (0.5f64 / draws as f64).sqrt());
}

#[test]
fn spec_validation() {
    assert!(EnsembleSpec::goe(0).is_err());
    assert!(EnsembleSpec::with_source(EnsembleKind::Gue, 2, Some(vec![1.0])).is_err());
    assert!(LambdaPoints::new(vec![]).is_err());
    assert!(LambdaPoints::new(vec![f64::NAN]).is_err());
    assert!(LambdaPoints::new(vec![0.3, 0.3]).is_ok());
}

#[test]
fn mc_goe_n1_pair_at_origin() {
    let est = mc_correlator(&EnsembleSpec::goe(1).unwrap(), &lambdas(&[0.0, 0.0]), 1_000_000, 1).unwrap();
    assert!(est.z_score(c(1.0)) <= 3.0, "{est:?}");
}

#[test]
fn mc_goe_n1_single_point() {
    let est = mc_correlator(&EnsembleSpec::goe(1).unwrap(), &lambdas(&[5.0]), 10_000, 2).unwrap();
    assert!(est.z_score(c(5.0)) <= 3.0, "{est:?}");
}

#[test]
fn mc_goe_n2_matches_oracle() {
    let spec = EnsembleSpec::goe(2).unwrap();
    let l = lambdas(&[0.7, -0.3]);
    let est = mc_correlator(&spec, &l, 1_000_000, 3).unwrap();
    assert!(est.z_score(wick_oracle(&spec, &l).unwrap()) <= 3.0, "{est:?}");
}

#[test]
fn mc_rejects_too_few_samples() {
    assert!(mc_correlator(&EnsembleSpec::goe(1).unwrap(), &lambdas(&[0.0]), 1, 0).is_err());
}

#[test]
fn mc_is_independent_of_thread_count() {
    let spec = EnsembleSpec::gue(3).unwrap();
    let l = lambdas(&[0.4, -0.2, 1.0]);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_correlator(&spec, &l, 50_000, 99).unwrap())
    };
    let one = run(1);
    for t in [2, 3, 8] {
        let other = run(t);
        assert_eq!(one.mean.re.to_bits(), other.mean.re.to_bits());
        assert_eq!(one.mean.im.to_bits(), other.mean.im.to_bits());
        assert_eq!(one.stderr.to_bits(), other.stderr.to_bits());
    }
}

#[test]
fn mc_is_permutation_invariant_in_distribution() {
    let spec = EnsembleSpec::goe(2).unwrap();
    let a = mc_correlator(&spec, &lambdas(&[0.9, -0.5, 0.1]), 200_000, 5).unwrap();
    let b = mc_correlator(&spec, &lambdas(&[0.1, 0.9, -0.5]), 200_000, 6).unwrap();
    let z = (a.mean - b.mean).norm() / (a.stderr.hypot(b.stderr));
    assert!(z <= 4.0, "z {z}");
}

#[test]
fn oracle_examples() {
    let goe1 = EnsembleSpec::goe(1).unwrap();
    for (l1, l2) in [(0.0, 0.0), (1.5, -0.25), (-2.0, 0.7)] {
        let v = wick_oracle(&goe1, &lambdas(&[l1, l2])).unwrap();
        assert!((v - c(l1 * l2 + 1.0)).norm() < 1e-14);
    }
    for l in [0.0, 0.6, -1.3] {
        let goe2 = wick_oracle(&EnsembleSpec::goe(2).unwrap(), &lambdas(&[l])).unwrap();
        assert!((goe2 - c(l * l - 0.25)).norm() < 1e-14);
        let gue2 = wick_oracle(&EnsembleSpec::gue(2).unwrap(), &lambdas(&[l])).unwrap();
        assert!((gue2 - c(l * l - 0.5)).norm() < 1e-14);
    }
}

#[test]
fn oracle_bounds_are_enforced() {
    assert!(wick_oracle(&EnsembleSpec::goe(WICK_MAX_DIM + 1).unwrap(), &lambdas(&[0.0])).is_err());
    assert!(wick_oracle(&EnsembleSpec::goe(1).unwrap(), &lambdas(&vec![0.1; WICK_MAX_K + 1])).is_err());
}

#[test]
fn oracle_is_permutation_invariant() {
    let base = [1.1, -0.4, 0.25, -1.7];
    let perms = [[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]];
    for kind in [EnsembleKind::Goe, EnsembleKind::Gue] {
        for n in 1..=3 {
            let spec = EnsembleSpec::new(kind, n).unwrap();
            let reference = wick_oracle(&spec, &lambdas(&base)).unwrap();
            for p in perms {
                let v: Vec<f64> = p.iter().map(|&i| base[i]).collect();
                let got = wick_oracle(&spec, &lambdas(&v)).unwrap();
                assert!((got - reference).norm() <= 1e-12 * reference.norm().max(1.0));
            }
        }
    }
}

#[test]
fn oracle_is_monic_of_degree_n() {
    for kind in [EnsembleKind::Goe, EnsembleKind::Gue] {
        for n in 1..=3 {
            for k in 1..=3 {
                let p = wick_oracle_poly(&EnsembleSpec::new(kind, n).unwrap(), k).unwrap();
                assert_eq!(p.nvars(), k);
                for var in 0..k {
                    assert_eq!(p.degree_in(var), n as u32);
                }
                assert!((p.coefficient(&vec![n as u32; k]) - c(1.0)).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn oracle_source_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for kind in [EnsembleKind::Goe, EnsembleKind::Gue] {
        for n in 1..=3 {
            for k in 1..=3 {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let l: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let spec = EnsembleSpec::with_source(kind, n, Some(a)).unwrap();
                let mean = wick_oracle(&spec, &lambdas(&l)).unwrap();
                let shifted = wick_oracle_shifted(&spec, &lambdas(&l)).unwrap();
                assert!((mean - shifted).norm() <= 1e-10 * shifted.norm().max(1.0));
            }
        }
    }
}

#[test]
fn oracle_with_source_at_n1_is_shifted_argument() {
    let spec = EnsembleSpec::with_source(EnsembleKind::Gue, 1, Some(vec![0.4])).unwrap();
    let v = wick_oracle(&spec, &lambdas(&[1.5])).unwrap();
    assert!((v - c(1.1)).norm() < 1e-14);
}

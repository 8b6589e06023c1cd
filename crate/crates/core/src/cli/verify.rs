use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{relative_deviation, ResultRow, VerifyArgs};
use crate::asymptotics::bessel_half_identity_check;
use crate::dual::{dual_correlator, goe_correlator_k2, goe_moment_dual, DualIntegralRequest};
use crate::ensembles::{wick_oracle, EnsembleKind, EnsembleSpec, LambdaPoints};
use crate::error::Result;
use crate::hiz::{generic_pde_point, group_integral_mc, hiz_unitary, pde_residual, sympl_hiz_k2};
use crate::linalg::{lu_det, pfaffian, ComplexSquareMatrix, Group};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Pfaffian,
    Oracle,
    HizPde,
    GroupMc,
    Bessel,
    Confluent,
    All,
}

impl Suite {
    const EACH: [Suite; 6] = [
        Suite::Pfaffian,
        Suite::Oracle,
        Suite::HizPde,
        Suite::GroupMc,
        Suite::Bessel,
        Suite::Confluent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pfaffian => "pfaffian",
            Suite::Oracle => "oracle",
            Suite::HizPde => "hiz-pde",
            Suite::GroupMc => "group-mc",
            Suite::Bessel => "bessel",
            Suite::Confluent => "confluent",
            Suite::All => "all",
        }
    }

    /// Documented default tolerance. For group-mc it is a bound on the z-score.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Pfaffian => 1e-10,
            Suite::Oracle => 1e-8,
            Suite::HizPde => 1e-5,
            Suite::GroupMc => 3.0,
            Suite::Bessel => 1e-12,
            Suite::Confluent => 1e-10,
            Suite::All => f64::NAN,
        }
    }
}

pub(super) fn cmd_verify(a: &VerifyArgs) -> Result<Vec<ResultRow>> {
    let mut suites: Vec<Suite> = Vec::new();
    for &s in &a.suite {
        let expanded: &[Suite] = if s == Suite::All { &Suite::EACH } else { std::slice::from_ref(&s) };
        for &e in expanded {
            if !suites.contains(&e) {
                suites.push(e);
            }
        }
    }
    let mut rows = Vec::new();
    for s in suites {
        let tol = a.tol.unwrap_or(s.default_tolerance());
        // each suite draws from its own stream so selections do not interact
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        rng.set_stream(s as u64);
        let found = match s {
            Suite::Pfaffian => pfaffian_suite(&mut rng)?,
            Suite::Oracle => oracle_suite(&mut rng)?,
            Suite::HizPde => pde_suite(&mut rng)?,
            Suite::GroupMc => group_suite(&mut rng, a.samples, a.seed)?,
            Suite::Bessel => vec![("grid 0.5,1,2,5,10".to_string(), bessel_half_identity_check(&[0.5, 1.0, 2.0, 5.0, 10.0])?)],
            Suite::Confluent => confluent_suite()?,
            Suite::All => unreachable!("expanded above"),
        };
        for (label, dev) in found {
            rows.push(
                ResultRow::new(format!("{}: {label}", s.name()))
                    .real("deviation", dev)
                    .real("tolerance", tol)
                    .check(dev <= tol),
            );
        }
    }
    Ok(rows)
}

/// Largest `|Pf² − det| / max(|det|, 1)` over 100 Gaussian antisymmetric matrices per even dimension.
fn pfaffian_suite(rng: &mut ChaCha8Rng) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for dim in [2, 4, 6, 8] {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let mut upper = vec![Complex64::new(0.0, 0.0); dim * dim];
            for v in upper.iter_mut() {
                *v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            let m = ComplexSquareMatrix::from_fn(dim, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Less => upper[i * dim + j],
                std::cmp::Ordering::Greater => -upper[j * dim + i],
                std::cmp::Ordering::Equal => Complex64::new(0.0, 0.0),
            });
            let pf = pfaffian(&m)?;
            let det = lu_det(&m);
            worst = worst.max((pf * pf - det).norm() / det.norm().max(1.0));
        }
        out.push((format!("dim {dim}"), worst));
    }
    Ok(out)
}

fn distinct_points(rng: &mut ChaCha8Rng, k: usize, half_width: f64, gap: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-half_width..half_width)).collect();
        if (0..k).all(|i| (i + 1..k).all(|j| (v[i] - v[j]).abs() >= gap)) {
            return v;
        }
    }
}

fn oracle_suite(rng: &mut ChaCha8Rng) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for kind in [EnsembleKind::Goe, EnsembleKind::Gue] {
        for n in 1..=3 {
            for k in 1..=4 {
                let spec = EnsembleSpec::new(kind, n)?;
                let mut worst: f64 = 0.0;
                for _ in 0..3 {
                    let l = LambdaPoints::new(distinct_points(rng, k, 1.5, 0.05))?;
                    let dual = dual_correlator(&DualIntegralRequest::new(spec.clone(), l.clone()))?.value;
                    worst = worst.max(relative_deviation(dual, wick_oracle(&spec, &l)?));
                }
                out.push((format!("{} N={n} k={k}", kind.name()), worst));
            }
        }
    }
    Ok(out)
}

fn pde_suite(rng: &mut ChaCha8Rng) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for beta in [4u8, 2] {
        for k in 2..=4 {
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                worst = worst.max(pde_residual(&generic_pde_point(rng, beta, k)?)?);
            }
            out.push((format!("beta={beta} k={k}"), worst));
        }
    }
    Ok(out)
}

/// z-scores of the k = 2 closed forms against Haar sampling.
fn group_suite(rng: &mut ChaCha8Rng, samples: u64, seed: u64) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (i, group) in [Group::Unitary, Group::CompactSymplectic].into_iter().enumerate() {
        for p in 0..3u64 {
            let n = 2;
            let xs = distinct_points(rng, 2, 1.0, 0.1);
            let ys = distinct_points(rng, 2, 1.0, 0.1);
            let exact = match group {
                Group::Unitary => hiz_unitary(n, &xs, &ys)?,
                Group::CompactSymplectic => sympl_hiz_k2(n, [xs[0], xs[1]], [ys[0], ys[1]]),
            };
            let est = group_integral_mc(group, 2, n, &xs, &ys, samples, seed.wrapping_add(10 * i as u64 + p))?;
            let name = match group {
                Group::Unitary => "U(2)",
                Group::CompactSymplectic => "Sp(2)",
            };
            out.push((format!("{name} point {p}"), est.z_score(exact)));
        }
    }
    Ok(out)
}

fn confluent_suite() -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for n in 1..=16 {
        let mut worst: f64 = 0.0;
        for lambda in [0.0, 0.5, 1.0] {
            let limit = goe_correlator_k2(n, lambda, lambda)?;
            worst = worst.max(relative_deviation(limit, goe_moment_dual(n, 1, lambda)?));
        }
        out.push((format!("N={n}"), worst));
    }
    Ok(out)
}

//! Search for flat unitary elements of the S₃ group algebra: coefficient
//! vectors with every `|z_g| = 1/√6`, i.e. 6×6 complex Hadamard matrices of the
//! form `Σ_g z_g L_g`.
//!
//! Each attempt draws a random start `(φ₁, φ₂, a, c)`, runs Nelder–Mead on the
//! flatness residual `Σ_g (|z_g|² − 1/6)²`, then polishes with damped
//! Gauss–Newton on the residual vector.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{extract_blocks, s3_closed_form_coeffs, IrrepSet};
use crate::error::{Error, Result};
use crate::groups::CoeffVector;
use crate::linalg::{haar_su2_pair, C64};

/// Required accuracy of `|z_g| = 1/√6`.
pub const FLATNESS_TOL: f64 = 1e-8;

const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct FlatSearchOptions {
    pub attempts: usize,
    pub seed: u64,
    pub simplex_iters: usize,
    pub polish_iters: usize,
}

impl FlatSearchOptions {
    pub fn new(attempts: usize, seed: u64) -> Self {
        FlatSearchOptions {
            attempts,
            seed,
            simplex_iters: 600,
            polish_iters: 60,
        }
    }
}

type Params = [f64; 6];

fn coeffs_of(x: &Params) -> [C64; 6] {
    let n = (x[2] * x[2] + x[3] * x[3] + x[4] * x[4] + x[5] * x[5]).sqrt();
    let a = C64::new(x[2], x[3]) / n;
    let c = C64::new(x[4], x[5]) / n;
    s3_closed_form_coeffs(x[0], x[1], a, c)
}

fn residuals(x: &Params) -> [f64; 6] {
    coeffs_of(x).map(|z| z.norm_sqr() - 1.0 / 6.0)
}

fn objective(x: &Params) -> f64 {
    residuals(x).iter().map(|r| r * r).sum()
}

fn nelder_mead(start: Params, iters: usize) -> Params {
    const N: usize = 6;
    let mut simplex: Vec<(Params, f64)> = (0..=N)
        .map(|i| {
            let mut p = start;
            if i > 0 {
                p[i - 1] += 0.3;
            }
            (p, objective(&p))
        })
        .collect();
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[N].1 - simplex[0].1 < 1e-30 {
            break;
        }
        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let along = |t: f64| -> Params {
            let worst = simplex[N].0;
            let mut p = [0.0; N];
            for k in 0..N {
                p[k] = centroid[k] + t * (worst[k] - centroid[k]);
            }
            p
        };
        let reflected = along(-1.0);
        let fr = objective(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = objective(&expanded);
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[N].1 { along(-0.5) } else { along(0.5) };
            let fc = objective(&contracted);
            if fc < simplex[N].1.min(fr) {
                simplex[N] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for (x, b) in entry.0.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    entry.1 = objective(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].0
}

fn gauss_newton_polish(mut x: Params, iters: usize) -> Params {
    let mut mu = 1e-6;
    let mut f = objective(&x);
    for _ in 0..iters {
        let r = residuals(&x);
        let mut jac = DMatrix::<f64>::zeros(6, 6);
        for k in 0..6 {
            let h = 1e-7;
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (rp, rm) = (residuals(&xp), residuals(&xm));
            for i in 0..6 {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jt = jac.transpose();
        let mut normal = &jt * &jac;
        for k in 0..6 {
            normal[(k, k)] += mu;
        }
        let Some(step) = normal.lu().solve(&(-(&jt * rv))) else {
            break;
        };
        let mut candidate = x;
        for k in 0..6 {
            candidate[k] += step[k];
        }
        let fc = objective(&candidate);
        if fc < f {
            x = candidate;
            f = fc;
            mu = (mu * 0.3).max(1e-15);
        } else {
            mu *= 10.0;
        }
        if f < 1e-30 {
            break;
        }
    }
    x
}

/// Seeded multi-start search for flat unitary S₃ coefficient vectors.
///
/// Returns distinct solutions in discovery order; the list may be empty.
pub fn flat_unitary_search(irreps: &IrrepSet, opts: FlatSearchOptions) -> Result<Vec<CoeffVector>> {
    if irreps.group().order() != 6 || irreps.dims() != [1, 1, 2] {
        return Err(Error::InvalidIrreps("flat search expects the S3 irreps".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let target = 1.0 / 6f64.sqrt();
    let mut found: Vec<CoeffVector> = Vec::new();
    for _ in 0..opts.attempts {
        let phi1: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let phi2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (a, c) = haar_su2_pair(&mut rng);
        let start = [phi1, phi2, a.re, a.im, c.re, c.im];
        let x = nelder_mead(start, opts.simplex_iters);
        if objective(&x) > 1e-8 {
            continue;
        }
        let x = gauss_newton_polish(x, opts.polish_iters);
        let z = coeffs_of(&x);
        if z.iter().any(|zg| (zg.norm() - target).abs() > FLATNESS_TOL) {
            continue;
        }
        let cv = CoeffVector::new(irreps.group().clone(), z.to_vec())?;
        if extract_blocks(&cv, irreps).is_err() {
            continue;
        }
        if found.iter().all(|f| f.max_abs_diff(&cv) > DEDUP_TOL) {
            found.push(cv);
        }
    }
    Ok(found)
}

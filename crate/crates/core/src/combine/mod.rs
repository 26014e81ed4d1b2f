//! Binary and ternary state combinations.
//!
//! The binary operation discards one output of a partial swap. The ternary
//! operation conjugates `ρ₁⊗ρ₂⊗ρ₃` by a unitary element `U = Σ zᵢQᵢ` of the S₃
//! group algebra and keeps the first qudit. Three independent evaluators of the
//! ternary map are provided (explicit partial trace, 36-term expansion, closed
//! q-form) so that each can be used as an oracle for the others.

mod nested;
mod params;

pub use nested::{
    delta_from_nested, nested_expand, nested_from_delta, nested_params_for_weights, nested_spec_for_weights,
    NestedSpec, Ordering, NESTED_TOL,
};
pub use params::{
    binary_params_from_coeffs, pdelta_from_q, q_from_pdelta, q_from_z, s3_coeffs_from_phases, sample_q_triple,
    sample_s3_coeffs, verify_real_imag_param, z_from_q, PDelta, QTriple, S3Coeffs, GAUGE_TOL, PARAM_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::s3_perms;
use crate::linalg::{self, CMatrix, C64, I};
use crate::repr::tensor_rep;
use crate::state::{double_commutator, partial_trace, DensityMatrix};

/// Largest qudit dimension accepted by the explicit three-qudit evaluator.
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

/// Selects `⊞` (`Plus`) or `⊟` (`Minus`) in the binary combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `0 → Plus`, `1 → Minus`, so that the value is `(−1)^bit`.
    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Sign::Plus),
            1 => Ok(Sign::Minus),
            _ => Err(Error::out_of_range("sign bit", format!("{bit}"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::out_of_range("lambda", format!("{lambda} not in [0, 1]")));
    }
    Ok(())
}

fn same_dim(states: &[&DensityMatrix]) -> Result<usize> {
    let d = states[0].dim();
    for s in &states[1..] {
        if s.dim() != d {
            return Err(Error::SizeMismatch {
                expected: d,
                found: s.dim(),
            });
        }
    }
    Ok(d)
}

/// Swap operator on two `d`-dimensional qudits.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = C64::from(1.0);
        }
    }
    s
}

/// `√λ·I + sign·i·√(1−λ)·S`.
pub fn partial_swap_unitary(lambda: f64, d: usize, sign: Sign) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let id = CMatrix::identity(d * d, d * d);
    Ok(id * C64::from(lambda.sqrt()) + swap_operator(d) * (I * sign.value() * (1.0 - lambda).sqrt()))
}

/// `λρ₁ + (1−λ)ρ₂ + sign·√(λ(1−λ))·i[ρ₂, ρ₁]`.
pub fn combine2(rho1: &DensityMatrix, rho2: &DensityMatrix, lambda: f64, sign: Sign) -> Result<DensityMatrix> {
    check_lambda(lambda)?;
    same_dim(&[rho1, rho2])?;
    let (r1, r2) = (rho1.matrix(), rho2.matrix());
    let m = r1 * C64::from(lambda)
        + r2 * C64::from(1.0 - lambda)
        + linalg::commutator(r2, r1) * (I * sign.value() * (lambda * (1.0 - lambda)).sqrt());
    Ok(DensityMatrix::from_trusted(m))
}

/// `Tr₂[U_λ(ρ₁⊗ρ₂)U_λ†]` evaluated explicitly.
pub fn combine2_bruteforce(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    lambda: f64,
    sign: Sign,
) -> Result<DensityMatrix> {
    let d = same_dim(&[rho1, rho2])?;
    let u = partial_swap_unitary(lambda, d, sign)?;
    let joint = &u * rho1.matrix().kronecker(rho2.matrix()) * u.adjoint();
    Ok(DensityMatrix::from_trusted(partial_trace(&joint, &[1], d, 2)?))
}

/// `Tr₂,₃[U(ρ₁⊗ρ₂⊗ρ₃)U†]` with `U = Σ zᵢQᵢ` built from qudit permutations.
pub fn combine3_bruteforce(states: [&DensityMatrix; 3], z: &S3Coeffs) -> Result<DensityMatrix> {
    let d = same_dim(&states)?;
    if d > BRUTE_FORCE_MAX_DIM {
        return Err(Error::SizeCap {
            dim: d,
            cap: BRUTE_FORCE_MAX_DIM,
        });
    }
    let dim = d * d * d;
    let mut u = CMatrix::zeros(dim, dim);
    for (p, &zi) in s3_perms().iter().zip(z.coeffs()) {
        u += tensor_rep(p, d)? * zi;
    }
    let joint = states[0]
        .matrix()
        .kronecker(states[1].matrix())
        .kronecker(states[2].matrix());
    let out = &u * joint * u.adjoint();
    Ok(DensityMatrix::from_trusted(partial_trace(&out, &[1], d, 3)?))
}

/// The 36-term expansion of the ternary map for arbitrary coefficients.
///
/// The result is a state only when `z` is unitary, so a bare matrix is returned.
pub fn combine3_magic(states: [&DensityMatrix; 3], z: &[C64; 6]) -> Result<CMatrix> {
    same_dim(&states)?;
    let [r1, r2, r3] = states.map(|s| s.matrix());
    let cj = |k: usize| z[k - 1].conj();
    let zz = |k: usize| z[k - 1];
    let tr = |a: &CMatrix, b: &CMatrix| linalg::trace(&(a * b));
    let with_ct = |coef: C64, m: CMatrix| -> CMatrix {
        let t = m * coef;
        let ct = t.adjoint();
        t + ct
    };

    let w1 = zz(1).norm_sqr() + zz(4).norm_sqr() + 2.0 * (zz(1) * cj(4)).re * tr(r2, r3);
    let w2 = zz(2).norm_sqr() + zz(5).norm_sqr() + 2.0 * (zz(2) * cj(5)).re * tr(r3, r1);
    let w3 = zz(3).norm_sqr() + zz(6).norm_sqr() + 2.0 * (zz(3) * cj(6)).re * tr(r1, r2);

    let mut m = r1 * w1 + r2 * w2 + r3 * w3;
    m += with_ct(zz(1) * cj(5) + zz(4) * cj(2), r1 * r2);
    m += with_ct(zz(2) * cj(6) + zz(5) * cj(3), r2 * r3);
    m += with_ct(zz(3) * cj(4) + zz(6) * cj(1), r3 * r1);
    m += with_ct(zz(2) * cj(1) + zz(5) * cj(4), r2 * r3 * r1);
    m += with_ct(zz(3) * cj(2) + zz(6) * cj(5), r3 * r1 * r2);
    m += with_ct(zz(1) * cj(3) + zz(4) * cj(6), r1 * r2 * r3);
    Ok(m)
}

/// Closed form of the ternary map in the q-parametrization.
pub fn combine3_closed(states: [&DensityMatrix; 3], q: &QTriple) -> Result<DensityMatrix> {
    same_dim(&states)?;
    let [r1, r2, r3] = states.map(|s| s.matrix());
    let [q1, q2, q3] = *q.values();
    let x12 = q1 * q2.conj();
    let x23 = q2 * q3.conj();
    let x31 = q3 * q1.conj();
    let icomm = |a: &CMatrix, b: &CMatrix| linalg::commutator(a, b) * I;

    let mut m = r1 * C64::from(q1.norm_sqr()) + r2 * C64::from(q2.norm_sqr()) + r3 * C64::from(q3.norm_sqr());
    m += icomm(r1, r2) * C64::from(x12.im) + icomm(r2, r3) * C64::from(x23.im) + icomm(r3, r1) * C64::from(x31.im);
    m += (r2 * r3 * r1 + r1 * r3 * r2) * C64::from(x12.re);
    m += (r3 * r1 * r2 + r2 * r1 * r3) * C64::from(x23.re);
    m += (r1 * r2 * r3 + r3 * r2 * r1) * C64::from(x31.re);
    Ok(DensityMatrix::from_trusted(m))
}

/// Closed form of the ternary map in the weight/angle parametrization.
pub fn combine3_pdelta(states: [&DensityMatrix; 3], pd: &PDelta) -> Result<DensityMatrix> {
    same_dim(&states)?;
    let [r1, r2, r3] = states.map(|s| s.matrix());
    let [p1, p2, p3] = pd.weights();
    let [d12, d23, d31] = pd.deltas();
    let (s12, s23, s31) = ((p1 * p2).sqrt(), (p2 * p3).sqrt(), (p3 * p1).sqrt());
    let icomm = |a: &CMatrix, b: &CMatrix| linalg::commutator(a, b) * I;
    let r = |x: f64| C64::from(x);

    let mut m = r1 * r(p1) + r2 * r(p2) + r3 * r(p3);
    m += icomm(r1, r2) * r(s12 * d12.sin()) + icomm(r2, r3) * r(s23 * d23.sin()) + icomm(r3, r1) * r(s31 * d31.sin());
    m += (r2 * r3 * r1 + r1 * r3 * r2) * r(s12 * d12.cos());
    m += (r3 * r1 * r2 + r2 * r1 * r3) * r(s23 * d23.cos());
    m += (r1 * r2 * r3 + r3 * r2 * r1) * r(s31 * d31.cos());
    Ok(DensityMatrix::from_trusted(m))
}

/// `max |op(VρᵢV†…) − V·op(ρᵢ…)·V†|` over matrix entries.
pub fn covariance_check<F>(op: F, v: &CMatrix, inputs: &[DensityMatrix]) -> Result<f64>
where
    F: Fn(&[DensityMatrix]) -> Result<CMatrix>,
{
    let rotated: Vec<DensityMatrix> = inputs.iter().map(|s| s.conjugate_by(v)).collect::<Result<_>>()?;
    let lhs = op(&rotated)?;
    let rhs = v * op(inputs)? * v.adjoint();
    Ok(linalg::max_abs_diff(&lhs, &rhs))
}

/// Coefficients `(x, y)` expressing the third-order part of the closed form as
/// `x·i[ρ₁, i[ρ₂, ρ₃]] + y·i[i[ρ₁, ρ₂], ρ₃]`.
pub fn third_order_reduce(q: &QTriple) -> Result<(f64, f64)> {
    let [q1, q2, q3] = *q.values();
    let x = (q1 * q2.conj()).re;
    let y = (q2 * q3.conj()).re;
    let z = (q3 * q1.conj()).re;
    let sum = x + y + z;
    if sum.abs() > PARAM_TOL {
        return Err(Error::CoefficientSumNonzero { sum });
    }
    Ok((x, y))
}

/// `x·i[A, i[B, C]] + y·i[i[A, B], C]`.
pub fn double_commutator_form(a: &CMatrix, b: &CMatrix, c: &CMatrix, x: f64, y: f64) -> Result<CMatrix> {
    let first = double_commutator(a, b, c)? * C64::from(-x);
    let ab = crate::state::commutator(a, b)?;
    let second = crate::state::commutator(&ab, c)? * C64::from(-y);
    Ok(first + second)
}

/// Third-order block `Σ Re(qᵢq̄ⱼ)(…)` of the closed form, evaluated directly.
pub fn third_order_block(states: [&DensityMatrix; 3], q: &QTriple) -> Result<CMatrix> {
    same_dim(&states)?;
    let [r1, r2, r3] = states.map(|s| s.matrix());
    let [q1, q2, q3] = *q.values();
    Ok((r2 * r3 * r1 + r1 * r3 * r2) * C64::from((q1 * q2.conj()).re)
        + (r3 * r1 * r2 + r2 * r1 * r3) * C64::from((q2 * q3.conj()).re)
        + (r1 * r2 * r3 + r3 * r2 * r1) * C64::from((q3 * q1.conj()).re))
}

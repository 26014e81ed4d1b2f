//! Parametrizations of the ternary combination: raw S₃ coefficients, the
//! q-triple, and weights with phase differences.

use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Sign;
use crate::error::{Error, Result};
use crate::groups::CoeffVector;
use crate::io::{complex_from_json, complex_to_json, ComplexJson};
use crate::linalg::{cis, haar_su2_pair, wrap_angle, C64, I};
use crate::repr::{extract_blocks, irreps_s3, s3_closed_form_coeffs, IrrepSet};

/// Tolerance on the algebraic constraints of `QTriple` and `PDelta`.
pub const PARAM_TOL: f64 = 1e-10;
/// Tolerance on the real/imaginary pattern of gauge-fixed coefficients.
pub const GAUGE_TOL: f64 = 1e-10;

const DEGENERATE_AMPLITUDE: f64 = 1e-12;

fn s3_irreps() -> &'static IrrepSet {
    static IRREPS: OnceLock<IrrepSet> = OnceLock::new();
    IRREPS.get_or_init(irreps_s3)
}

/// Coefficients `z₁..z₆` of a unitary element of the S₃ group algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct S3Coeffs {
    z: [C64; 6],
}

impl S3Coeffs {
    /// Accepts `z` only if `Σ zᵢLᵢ` is unitary.
    pub fn new(z: [C64; 6]) -> Result<Self> {
        let cv = CoeffVector::new(Arc::clone(s3_irreps().group()), z.to_vec())?;
        extract_blocks(&cv, s3_irreps()).map_err(|e| match e {
            Error::NonUnitaryBlock { residual, .. } => Error::NonUnitaryCoefficients { residual },
            other => other,
        })?;
        Ok(S3Coeffs { z })
    }

    pub fn from_coeff_vector(cv: &CoeffVector) -> Result<Self> {
        let z: [C64; 6] = cv.coeffs().try_into().map_err(|_| Error::SizeMismatch {
            expected: 6,
            found: cv.coeffs().len(),
        })?;
        Self::new(z)
    }

    pub fn identity() -> Self {
        let mut z = [C64::from(0.0); 6];
        z[0] = C64::from(1.0);
        S3Coeffs { z }
    }

    pub fn indicator(k: usize) -> Result<Self> {
        if k >= 6 {
            return Err(Error::InvalidElement(k));
        }
        let mut z = [C64::from(0.0); 6];
        z[k] = C64::from(1.0);
        Ok(S3Coeffs { z })
    }

    pub fn coeffs(&self) -> &[C64; 6] {
        &self.z
    }

    pub fn to_coeff_vector(&self) -> CoeffVector {
        CoeffVector::new(Arc::clone(s3_irreps().group()), self.z.to_vec()).expect("six coefficients")
    }

    /// `(Re z₁z̄₄, Re z₂z̄₅, Re z₃z̄₆)`: the state-dependent part of the first-order weights.
    pub fn independence_residuals(&self) -> [f64; 3] {
        let z = &self.z;
        [
            (z[0] * z[3].conj()).re,
            (z[1] * z[4].conj()).re,
            (z[2] * z[5].conj()).re,
        ]
    }

    pub fn is_state_independent(&self) -> bool {
        self.independence_residuals().iter().all(|r| r.abs() <= PARAM_TOL)
    }

    pub fn to_json(&self) -> Vec<ComplexJson> {
        self.z.iter().map(|&x| complex_to_json(x)).collect()
    }

    pub fn from_json(values: &[ComplexJson]) -> Result<Self> {
        let z: [C64; 6] = values
            .iter()
            .map(|&v| complex_from_json(v))
            .collect::<Vec<_>>()
            .try_into()
            .map_err(|v: Vec<C64>| Error::SizeMismatch {
                expected: 6,
                found: v.len(),
            })?;
        Self::new(z)
    }
}

/// S₃ coefficients with block unitaries `(e^{iφ₁}, e^{iφ₂}, [[a, c], [−c̄, ā]])`.
pub fn s3_coeffs_from_phases(phi1: f64, phi2: f64, a: C64, c: C64) -> Result<S3Coeffs> {
    let norm = a.norm_sqr() + c.norm_sqr();
    if (norm - 1.0).abs() > PARAM_TOL {
        return Err(Error::NormViolation(format!("|a|^2 + |c|^2 = {norm}")));
    }
    Ok(S3Coeffs {
        z: s3_closed_form_coeffs(phi1, phi2, a, c),
    })
}

/// Generic unitary S₃ coefficients: uniform phases, Haar `(a, c)`.
pub fn sample_s3_coeffs<R: Rng + ?Sized>(rng: &mut R) -> S3Coeffs {
    let phi1 = rng.random_range(0.0..TAU);
    let phi2 = rng.random_range(0.0..TAU);
    let (a, c) = haar_su2_pair(rng);
    S3Coeffs {
        z: s3_closed_form_coeffs(phi1, phi2, a, c),
    }
}

/// `(q₁, q₂, q₃)` with `Σ|qᵢ|² = 1` and `Σqᵢ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QTriple {
    q: [C64; 3],
}

#[derive(Serialize, Deserialize)]
struct QTripleJson {
    q: [ComplexJson; 3],
}

impl Serialize for QTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QTripleJson {
            q: self.q.map(complex_to_json),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = QTripleJson::deserialize(d)?;
        QTriple::new(raw.q.map(complex_from_json)).map_err(serde::de::Error::custom)
    }
}

impl QTriple {
    /// Accepts `|Σqᵢ| = 1` and rotates the global phase so that `Σqᵢ = 1`.
    /// Triples already at `Σqᵢ = 1` to rounding are kept bit for bit.
    pub fn new(q: [C64; 3]) -> Result<Self> {
        let norm: f64 = q.iter().map(|x| x.norm_sqr()).sum();
        if (norm - 1.0).abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("sum |q|^2 = {norm}")));
        }
        let sum: C64 = q.iter().sum();
        if (sum.norm() - 1.0).abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("|sum q| = {}", sum.norm())));
        }
        if (sum - 1.0).norm() <= 4.0 * f64::EPSILON {
            return Ok(QTriple { q });
        }
        let phase = sum.conj() / sum.norm();
        Ok(QTriple {
            q: q.map(|x| x * phase),
        })
    }

    pub fn values(&self) -> &[C64; 3] {
        &self.q
    }

    pub fn weights(&self) -> [f64; 3] {
        self.q.map(|x| x.norm_sqr())
    }

    pub fn conj(&self) -> Self {
        QTriple {
            q: self.q.map(|x| x.conj()),
        }
    }

    /// `(qₚ₍₁₎, qₚ₍₂₎, qₚ₍₃₎)` for a 0-based index permutation `p`.
    pub fn permuted(&self, p: [usize; 3]) -> Self {
        QTriple {
            q: [self.q[p[0]], self.q[p[1]], self.q[p[2]]],
        }
    }

    /// `(Re q₁q̄₂, Re q₂q̄₃, Re q₃q̄₁)`; these sum to zero.
    pub fn cross_re(&self) -> [f64; 3] {
        let [q1, q2, q3] = self.q;
        [(q1 * q2.conj()).re, (q2 * q3.conj()).re, (q3 * q1.conj()).re]
    }

    /// Residuals `(Σ|qᵢ|² − 1, |Σqᵢ − 1|)`.
    pub fn residuals(&self) -> (f64, f64) {
        let norm: f64 = self.q.iter().map(|x| x.norm_sqr()).sum();
        let sum: C64 = self.q.iter().sum();
        (norm - 1.0, (sum - 1.0).norm())
    }
}

/// Pairs `qₖ = zₖ + zₖ₊₃` for coefficients in the gauge `z₁..₃ ∈ ℝ`, `z₄..₆ ∈ iℝ`.
pub fn q_from_z(z: &S3Coeffs) -> Result<QTriple> {
    let c = z.coeffs();
    let residual = c[..3]
        .iter()
        .map(|x| x.im.abs())
        .chain(c[3..].iter().map(|x| x.re.abs()))
        .fold(0.0, f64::max);
    if residual > GAUGE_TOL {
        return Err(Error::GaugeViolation { residual });
    }
    QTriple::new([
        C64::from(c[0].re) + C64::new(0.0, c[3].im),
        C64::from(c[1].re) + C64::new(0.0, c[4].im),
        C64::from(c[2].re) + C64::new(0.0, c[5].im),
    ])
}

/// `z = (Re q₁, Re q₂, Re q₃, i Im q₁, i Im q₂, i Im q₃)`.
pub fn z_from_q(q: &QTriple) -> S3Coeffs {
    let v = q.values();
    S3Coeffs {
        z: [
            C64::from(v[0].re),
            C64::from(v[1].re),
            C64::from(v[2].re),
            C64::new(0.0, v[0].im),
            C64::new(0.0, v[1].im),
            C64::new(0.0, v[2].im),
        ],
    }
}

/// Point on the constraint manifold from a uniform phase and Haar `(a, c)`.
pub fn sample_q_triple<R: Rng + ?Sized>(rng: &mut R) -> QTriple {
    let phi = rng.random_range(0.0..TAU);
    let (a, c) = haar_su2_pair(rng);
    let e = cis(phi);
    let s3 = 3f64.sqrt();
    let raw = [(e + a * 2.0) / 3.0, (e - a - c * s3) / 3.0, (e - a + c * s3) / 3.0];
    // The raw triple has Σq = e^{iφ} exactly up to rounding; rotate it directly.
    let rot = cis(-phi);
    QTriple {
        q: raw.map(|x| x * rot),
    }
}

/// Weights `pₖ = |qₖ|²` with consecutive phase differences `(δ₁₂, δ₂₃, δ₃₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PDelta {
    p: [f64; 3],
    delta: [f64; 3],
}

impl PDelta {
    pub fn new(p: [f64; 3], delta: [f64; 3]) -> Result<Self> {
        if p.iter().any(|&x| x.is_nan() || x < -PARAM_TOL) || (p.iter().sum::<f64>() - 1.0).abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("weights {p:?}")));
        }
        let p = p.map(|x| x.max(0.0));
        let wrapped = wrap_angle(delta.iter().sum());
        if wrapped.abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("angle sum {wrapped}")));
        }
        let pd = PDelta {
            p,
            delta: delta.map(wrap_angle),
        };
        let c = pd.cosine_constraint();
        if c.abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("weighted cosine sum {c}")));
        }
        Ok(pd)
    }

    pub fn weights(&self) -> [f64; 3] {
        self.p
    }

    pub fn deltas(&self) -> [f64; 3] {
        self.delta
    }

    /// `√(p₁p₂)cos δ₁₂ + √(p₂p₃)cos δ₂₃ + √(p₃p₁)cos δ₃₁`.
    pub fn cosine_constraint(&self) -> f64 {
        let [p1, p2, p3] = self.p;
        let [d12, d23, d31] = self.delta;
        (p1 * p2).sqrt() * d12.cos() + (p2 * p3).sqrt() * d23.cos() + (p3 * p1).sqrt() * d31.cos()
    }
}

/// Splits `q` into weights and phase differences.
pub fn pdelta_from_q(q: &QTriple) -> Result<PDelta> {
    let v = q.values();
    let weights = q.weights();
    if v.iter().any(|x| x.norm() <= DEGENERATE_AMPLITUDE) {
        return Err(Error::DegenerateWeight { weights });
    }
    let phi = v.map(|x| x.arg());
    let delta = [
        wrap_angle(phi[0] - phi[1]),
        wrap_angle(phi[1] - phi[2]),
        wrap_angle(phi[2] - phi[0]),
    ];
    Ok(PDelta { p: weights, delta })
}

/// Rebuilds `q` with `φ₁ = 0`, then rotates the free global phase so `Σq = 1`.
pub fn q_from_pdelta(pd: &PDelta) -> Result<QTriple> {
    let [p1, p2, p3] = pd.p;
    let [d12, d23, _] = pd.delta;
    let phi2 = -d12;
    let phi3 = phi2 - d23;
    QTriple::new([C64::from(p1.sqrt()), cis(phi2) * p2.sqrt(), cis(phi3) * p3.sqrt()])
}

/// Whether `z = (a₁, a₂, a₃, ib₁, ib₂, ib₃)` is unitary, via
/// `Σaᵢ² + Σbᵢ² = 1` and `a₁a₂ + a₂a₃ + a₃a₁ + b₁b₂ + b₂b₃ + b₃b₁ = 0`.
pub fn verify_real_imag_param(a: [f64; 3], b: [f64; 3]) -> bool {
    let norm: f64 = a.iter().chain(&b).map(|x| x * x).sum();
    let cross = a[0] * a[1] + a[1] * a[2] + a[2] * a[0] + b[0] * b[1] + b[1] * b[2] + b[2] * b[0];
    (norm - 1.0).abs() <= PARAM_TOL && cross.abs() <= PARAM_TOL
}

/// Writes a unitary `z₁I + z₂S` as `e^{iφ}(√λ·I ± i√(1−λ)·S)`, returning `(λ, φ, sign)`.
pub fn binary_params_from_coeffs(z1: C64, z2: C64) -> Result<(f64, f64, Sign)> {
    let norm = z1.norm_sqr() + z2.norm_sqr();
    let cross = (z1 * z2.conj()).re;
    if (norm - 1.0).abs() > PARAM_TOL || cross.abs() > PARAM_TOL {
        return Err(Error::NonUnitaryCoefficients {
            residual: (norm - 1.0).abs().max(cross.abs()),
        });
    }
    let lambda = z1.norm_sqr().clamp(0.0, 1.0);
    let phi = if z1.norm() > DEGENERATE_AMPLITUDE {
        z1.arg()
    } else {
        (z2 / I).arg()
    };
    let ratio = z2 * cis(-phi) / I;
    let sign = if ratio.re >= 0.0 { Sign::Plus } else { Sign::Minus };
    Ok((lambda, wrap_angle(phi), sign))
}

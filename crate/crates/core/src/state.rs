//! Qudit density matrices and the operations the combination maps are built
//! from: tensor products, partial traces, commutators and entropy functionals.
//!
//! Subsystems are numbered from 1; subsystem 1 is the most significant factor
//! of a Kronecker product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, MatrixJson};
use crate::linalg::{self, commutator as comm, hermitian_eigenvalues, CMatrix, C64, DIM_CAP};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = -1e-9;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

/// Validity measurements of a candidate state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub trace_re: f64,
    pub trace_im: f64,
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(m: &CMatrix) -> Result<Self> {
        let tr = linalg::trace(m);
        let eig = hermitian_eigenvalues(m)?;
        Ok(StateDiagnostics {
            trace_re: tr.re,
            trace_im: tr.im,
            hermiticity_residual: linalg::hermiticity_residual(m),
            min_eigenvalue: eig.first().copied().unwrap_or(0.0),
        })
    }

    pub fn is_valid(&self) -> bool {
        self.hermiticity_residual <= HERMITIAN_TOL
            && (self.trace_re - 1.0).abs() <= TRACE_TOL
            && self.trace_im.abs() <= TRACE_TOL
            && self.min_eigenvalue >= PSD_TOL
    }
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidState(format!("shape {:?}", m.shape())));
        }
        let diag = StateDiagnostics::of(&m)?;
        if !diag.is_valid() {
            return Err(Error::InvalidState(format!("{diag:?}")));
        }
        Ok(DensityMatrix { m })
    }

    /// Wraps the output of a map that provably returns a state.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        DensityMatrix { m }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let d = psi.len();
        Ok(DensityMatrix {
            m: CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            m: CMatrix::identity(d, d) / C64::from(d as f64),
        }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::from(probs[i])
            } else {
                C64::from(0.0)
            }
        }))
    }

    /// `½(I + xσx + yσy + zσz)`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(bloch_matrix(x, y, z))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        StateDiagnostics::of(&self.m)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.m * &self.m)).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.m)
    }

    /// `(Tr ρσx, Tr ρσy, Tr ρσz)` for a qubit.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        bloch_vector(&self.m)
    }

    /// `V ρ V†`.
    pub fn conjugate_by(&self, v: &CMatrix) -> Result<Self> {
        if v.shape() != self.m.shape() {
            return Err(Error::SizeMismatch {
                expected: self.dim(),
                found: v.nrows(),
            });
        }
        Ok(DensityMatrix {
            m: v * &self.m * v.adjoint(),
        })
    }

    pub fn to_json(&self) -> MatrixJson {
        io::matrix_to_json(&self.m)
    }

    pub fn from_json(rows: &MatrixJson) -> Result<Self> {
        Self::new(io::matrix_from_json(rows)?)
    }
}

pub fn bloch_matrix(x: f64, y: f64, z: f64) -> CMatrix {
    let h = 0.5;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(h * (1.0 + z), 0.0),
            C64::new(h * x, -h * y),
            C64::new(h * x, h * y),
            C64::new(h * (1.0 - z), 0.0),
        ],
    )
}

pub fn bloch_vector(m: &CMatrix) -> Result<[f64; 3]> {
    if m.shape() != (2, 2) {
        return Err(Error::SizeMismatch {
            expected: 2,
            found: m.nrows(),
        });
    }
    // Tr(ρσx) = 2 Re ρ01, Tr(ρσy) = -2 Im ρ01... with ρ01 = (x - iy)/2.
    Ok([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
}

/// Kronecker product of a list of states.
pub fn tensor(states: &[&DensityMatrix]) -> Result<DensityMatrix> {
    let mut dim: usize = 1;
    for s in states {
        dim = dim.saturating_mul(s.dim());
        if dim > DIM_CAP {
            return Err(Error::SizeCap { dim, cap: DIM_CAP });
        }
    }
    let m = states
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, s| acc.kronecker(&s.m));
    Ok(DensityMatrix { m })
}

/// Partial trace of a `dⁿ × dⁿ` matrix keeping the 1-based subsystems in `keep`
/// (in ascending order in the result).
pub fn partial_trace(m: &CMatrix, keep: &[usize], d: usize, n: usize) -> Result<CMatrix> {
    let dim = crate::repr::checked_pow(d, n)?;
    if m.shape() != (dim, dim) {
        return Err(Error::SizeMismatch {
            expected: dim,
            found: m.nrows(),
        });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k == 0 || k > n) {
        return Err(Error::BadSubsystems(format!("keep {keep:?} with n = {n}")));
    }
    let traced: Vec<usize> = (1..=n).filter(|k| !kept.contains(k)).collect();
    let dk = d.pow(kept.len() as u32);
    let dt = d.pow(traced.len() as u32);

    // Place digits (most significant first) of `value` into the given subsystem slots.
    let scatter = |value: usize, slots: &[usize], digits: &mut [usize]| {
        let mut x = value;
        for &s in slots.iter().rev() {
            digits[s - 1] = x % d;
            x /= d;
        }
    };
    let gather = |digits: &[usize]| digits.iter().fold(0, |acc, &x| acc * d + x);

    let mut out = CMatrix::zeros(dk, dk);
    let mut row_digits = vec![0usize; n];
    let mut col_digits = vec![0usize; n];
    for i in 0..dk {
        scatter(i, &kept, &mut row_digits);
        for j in 0..dk {
            scatter(j, &kept, &mut col_digits);
            let mut acc = C64::from(0.0);
            for t in 0..dt {
                scatter(t, &traced, &mut row_digits);
                scatter(t, &traced, &mut col_digits);
                acc += m[(gather(&row_digits), gather(&col_digits))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::SizeMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(comm(a, b))
}

/// `[A, [B, C]]`.
pub fn double_commutator(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    commutator(a, &commutator(b, c)?)
}

/// Random state `G G† / Tr(G G†)` with `G` a `d × rank` complex Gaussian matrix.
pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::out_of_range("rank", format!("rank {rank} for d = {d}")));
    }
    let g = linalg::gaussian_matrix(rng, d, rank);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m);
    let mut m = m / tr;
    // Exact Hermitian symmetrization removes rounding asymmetry.
    m = (&m + m.adjoint()) * C64::from(0.5);
    Ok(DensityMatrix { m })
}

pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(&mut rng, d, rank)
}

/// Symmetric functions of the spectrum used as concave entropy probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum EntropyFunctional {
    VonNeumann,
    Renyi { alpha: f64 },
    NegPurity,
}

impl EntropyFunctional {
    /// The registry probed by the inequality scans.
    pub fn registry() -> Vec<EntropyFunctional> {
        vec![
            EntropyFunctional::VonNeumann,
            EntropyFunctional::Renyi { alpha: 0.5 },
            EntropyFunctional::Renyi { alpha: 2.0 },
            EntropyFunctional::NegPurity,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            EntropyFunctional::VonNeumann => "von_neumann".into(),
            EntropyFunctional::Renyi { alpha } => format!("renyi_{alpha}"),
            EntropyFunctional::NegPurity => "neg_purity".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "von_neumann" | "von-neumann" | "vn" => Ok(EntropyFunctional::VonNeumann),
            "neg_purity" | "neg-purity" => Ok(EntropyFunctional::NegPurity),
            _ => {
                let alpha = s
                    .strip_prefix("renyi_")
                    .or_else(|| s.strip_prefix("renyi-"))
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::Format(format!("unknown functional `{s}`")))?;
                if alpha <= 0.0 || alpha == 1.0 {
                    return Err(Error::Format(format!("unsupported Rényi order {alpha}")));
                }
                Ok(EntropyFunctional::Renyi { alpha })
            }
        }
    }

    /// Whether the functional is concave on `d × d` states.
    ///
    /// Rényi entropies are concave for `α ≤ 1`; for `α > 1` concavity holds
    /// when `α ≤ 1 + ln 4 / ln(d − 1)` (any `α` for qubits).
    pub fn is_concave_for(&self, d: usize) -> bool {
        match *self {
            EntropyFunctional::Renyi { alpha } if alpha > 1.0 => {
                d <= 2 || alpha <= 1.0 + 4f64.ln() / ((d - 1) as f64).ln()
            }
            _ => true,
        }
    }

    /// Evaluates on a spectrum, clamping eigenvalues into `[0, 1]`.
    pub fn eval_spectrum(&self, eigenvalues: &[f64]) -> f64 {
        let clamped = eigenvalues.iter().map(|&l| l.clamp(0.0, 1.0));
        match *self {
            EntropyFunctional::VonNeumann => clamped.filter(|&l| l > 0.0).map(|l| -l * l.ln()).sum(),
            EntropyFunctional::Renyi { alpha } => {
                let s: f64 = clamped.map(|l| if l > 0.0 { l.powf(alpha) } else { 0.0 }).sum();
                s.ln() / (1.0 - alpha)
            }
            EntropyFunctional::NegPurity => -clamped.map(|l| l * l).sum::<f64>(),
        }
    }
}

pub fn entropy(f: EntropyFunctional, rho: &DensityMatrix) -> Result<f64> {
    Ok(f.eval_spectrum(&rho.eigenvalues()?))
}

/// Entropy of an arbitrary Hermitian matrix (used on raw combination outputs).
pub fn entropy_of_matrix(f: EntropyFunctional, m: &CMatrix) -> Result<f64> {
    Ok(f.eval_spectrum(&hermitian_eigenvalues(m)?))
}

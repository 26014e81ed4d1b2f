//! Irreducible representations, the group Fourier transform, and the
//! correspondence between unitary elements of the group algebra and tuples of
//! per-irrep unitary blocks.
//!
//! A coefficient vector `z` gives a unitary `Σ_g z_g L_g` exactly when every
//! block `Σ_g z_g τ(g)` is unitary. [`synthesize_coeffs`] goes from blocks to
//! coefficients via `z_g = Σ_τ (d_τ/|G|) Tr(τ(g)† U_τ)`, and [`extract_blocks`]
//! goes back.

mod flat;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{cyclic_group, perm_inverse, symmetric_group, CoeffVector, FiniteGroup, Perm};
use crate::io::{self, MatrixJson};
use crate::linalg::{self, c, cis, haar_unitary, max_abs_diff, unitarity_residual, CMatrix, C64, DIM_CAP};

pub use flat::{flat_unitary_search, FlatSearchOptions, FLATNESS_TOL};

/// Entrywise tolerance for block unitarity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Entrywise tolerance for the block-diagonal structure after conjugation by `F`.
pub const BLOCK_TOL: f64 = 1e-10;

const IRREP_TOL: f64 = 1e-12;

/// One irreducible unitary representation `g ↦ τ(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<CMatrix>,
}

impl Irrep {
    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(linalg::trace).collect()
    }

    /// Checks unitarity, `τ(e) = I`, and `τ(gh) = τ(g)τ(h)` on every pair.
    pub fn validate(&self, group: &FiniteGroup) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidIrreps(format!("{}: {msg}", self.label)));
        if self.matrices.len() != group.order() {
            return bad(format!(
                "{} matrices for group of order {}",
                self.matrices.len(),
                group.order()
            ));
        }
        for (g, m) in self.matrices.iter().enumerate() {
            if m.shape() != (self.dim, self.dim) {
                return bad(format!("matrix {g} has shape {:?}", m.shape()));
            }
            if unitarity_residual(m) > IRREP_TOL {
                return bad(format!("matrix {g} is not unitary"));
            }
        }
        if max_abs_diff(&self.matrices[group.identity()], &linalg::identity(self.dim)) > IRREP_TOL {
            return bad("identity is not mapped to I".into());
        }
        for g in group.elements() {
            for h in group.elements() {
                let prod = &self.matrices[g] * &self.matrices[h];
                if max_abs_diff(&prod, &self.matrices[group.mul(g, h)]) > IRREP_TOL {
                    return bad(format!("homomorphism fails on ({g}, {h})"));
                }
            }
        }
        Ok(())
    }
}

/// A complete set of inequivalent irreps of a group.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    group: Arc<FiniteGroup>,
    irreps: Vec<Irrep>,
}

impl IrrepSet {
    /// Validates each irrep, the dimension count `Σ d_τ² = |G|`, and pairwise
    /// character orthogonality.
    pub fn new(group: Arc<FiniteGroup>, irreps: Vec<Irrep>) -> Result<Self> {
        for irrep in &irreps {
            irrep.validate(&group)?;
        }
        let dim_sum: usize = irreps.iter().map(|t| t.dim * t.dim).sum();
        if dim_sum != group.order() {
            return Err(Error::InvalidIrreps(format!(
                "sum of squared dimensions {dim_sum} != group order {}",
                group.order()
            )));
        }
        let n = group.order() as f64;
        let chars: Vec<Vec<C64>> = irreps.iter().map(Irrep::character).collect();
        for (a, ca) in chars.iter().enumerate() {
            for (b, cb) in chars.iter().enumerate() {
                let ip: C64 = ca.iter().zip(cb).map(|(x, y)| x * y.conj()).sum::<C64>() / n;
                let expect = if a == b { 1.0 } else { 0.0 };
                if (ip - C64::from(expect)).norm() > 1e-10 {
                    return Err(Error::InvalidIrreps(format!(
                        "characters of `{}` and `{}` are not orthonormal",
                        irreps[a].label, irreps[b].label
                    )));
                }
            }
        }
        Ok(IrrepSet { group, irreps })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|t| t.dim).collect()
    }

    pub fn to_json_string(&self) -> String {
        let file = io::Tagged::new(IrrepFile {
            irreps: self
                .irreps
                .iter()
                .map(|t| IrrepJson {
                    label: t.label.clone(),
                    dim: t.dim,
                    matrices: t.matrices.iter().map(io::matrix_to_json).collect(),
                })
                .collect(),
        });
        io::to_json_pretty(&file)
    }

    pub fn from_json_str(group: Arc<FiniteGroup>, s: &str) -> Result<Self> {
        let file: io::Tagged<IrrepFile> = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        io::check_format(Some(&file.format))?;
        let irreps = file
            .body
            .irreps
            .iter()
            .map(|t| {
                Ok(Irrep {
                    label: t.label.clone(),
                    dim: t.dim,
                    matrices: t.matrices.iter().map(io::matrix_from_json).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, irreps)
    }
}

#[derive(Serialize, Deserialize)]
struct IrrepFile {
    irreps: Vec<IrrepJson>,
}

#[derive(Serialize, Deserialize)]
struct IrrepJson {
    label: String,
    dim: usize,
    matrices: Vec<MatrixJson>,
}

fn scalar(z: C64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

fn mat2(a: C64, b: C64, cc: C64, d: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

fn real2(a: f64, b: f64, cc: f64, d: f64) -> CMatrix {
    mat2(C64::from(a), C64::from(b), C64::from(cc), C64::from(d))
}

/// Trivial, sign, and the real two-dimensional irrep of S₃ (symmetries of an
/// equilateral triangle with a vertex on the x axis), in canonical element order.
pub fn irreps_s3() -> IrrepSet {
    let group = Arc::new(symmetric_group(3).expect("S3"));
    let h = 3f64.sqrt() / 2.0;
    let trivial = Irrep {
        label: "trivial".into(),
        dim: 1,
        matrices: vec![scalar(C64::from(1.0)); 6],
    };
    let sign = Irrep {
        label: "sign".into(),
        dim: 1,
        matrices: [1.0, 1.0, 1.0, -1.0, -1.0, -1.0]
            .iter()
            .map(|&s| scalar(C64::from(s)))
            .collect(),
    };
    let standard = Irrep {
        label: "standard".into(),
        dim: 2,
        matrices: vec![
            real2(1.0, 0.0, 0.0, 1.0),
            real2(-0.5, -h, h, -0.5),
            real2(-0.5, h, -h, -0.5),
            real2(1.0, 0.0, 0.0, -1.0),
            real2(-0.5, -h, -h, 0.5),
            real2(-0.5, h, h, 0.5),
        ],
    };
    IrrepSet::new(group, vec![trivial, sign, standard]).expect("S3 irreps are valid")
}

/// The two-dimensional irrep of S₃ in the basis diagonalizing the 3-cycles,
/// with `ω = e^{2πi/3}`. Equivalent to the real standard irrep.
pub fn s3_standard_alt() -> Irrep {
    let o = cis(2.0 * std::f64::consts::PI / 3.0);
    let o2 = o * o;
    let zero = C64::from(0.0);
    let one = C64::from(1.0);
    Irrep {
        label: "standard'".into(),
        dim: 2,
        matrices: vec![
            mat2(one, zero, zero, one),
            mat2(o, zero, zero, o2),
            mat2(o2, zero, zero, o),
            mat2(zero, one, one, zero),
            mat2(zero, o2, o, zero),
            mat2(zero, o, o2, zero),
        ],
    }
}

/// The `n` characters `τ_k(g) = e^{2πi k g / n}` of `Z_n`.
pub fn irreps_cyclic(n: usize) -> Result<IrrepSet> {
    let group = Arc::new(cyclic_group(n)?);
    let irreps = (0..n)
        .map(|k| Irrep {
            label: format!("chi{k}"),
            dim: 1,
            matrices: (0..n)
                .map(|g| scalar(cis(2.0 * std::f64::consts::PI * ((k * g) % n) as f64 / n as f64)))
                .collect(),
        })
        .collect();
    IrrepSet::new(group, irreps)
}

/// Offsets of each irrep's `d_τ²` rows in the Fourier basis.
fn block_offsets(irreps: &IrrepSet) -> Vec<usize> {
    let mut off = Vec::with_capacity(irreps.irreps.len());
    let mut acc = 0;
    for t in &irreps.irreps {
        off.push(acc);
        acc += t.dim * t.dim;
    }
    off
}

/// The group Fourier transform: row `(τ, j, k)` (flattened as
/// `offset_τ + j·d_τ + k`), column `g`, entry `√(d_τ/|G|) τ(g)_{jk}`.
pub fn fourier_matrix(irreps: &IrrepSet) -> Result<CMatrix> {
    let n = irreps.group.order();
    let dim_sum: usize = irreps.irreps.iter().map(|t| t.dim * t.dim).sum();
    if dim_sum != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: dim_sum,
        });
    }
    let mut f = CMatrix::zeros(n, n);
    for (t, off) in irreps.irreps.iter().zip(block_offsets(irreps)) {
        let scale = (t.dim as f64 / n as f64).sqrt();
        for g in 0..n {
            for j in 0..t.dim {
                for k in 0..t.dim {
                    f[(off + j * t.dim + k, g)] = t.matrices[g][(j, k)] * scale;
                }
            }
        }
    }
    Ok(f)
}

/// Conjugates `m` into the Fourier basis and, if the result has the form
/// `⊕_τ (B_τ ⊗ I_{d_τ})`, returns the blocks `B_τ`.
pub fn block_decompose(m: &CMatrix, irreps: &IrrepSet) -> Result<Vec<CMatrix>> {
    let n = irreps.group.order();
    if m.shape() != (n, n) {
        return Err(Error::SizeMismatch {
            expected: n,
            found: m.nrows(),
        });
    }
    let f = fourier_matrix(irreps)?;
    let hat = &f * m * f.adjoint();
    let mut rebuilt = CMatrix::zeros(n, n);
    let mut blocks = Vec::with_capacity(irreps.irreps.len());
    for (t, off) in irreps.irreps.iter().zip(block_offsets(irreps)) {
        let d = t.dim;
        let b = CMatrix::from_fn(d, d, |j, jp| {
            (0..d).map(|k| hat[(off + j * d + k, off + jp * d + k)]).sum::<C64>() / d as f64
        });
        for j in 0..d {
            for jp in 0..d {
                for k in 0..d {
                    rebuilt[(off + j * d + k, off + jp * d + k)] = b[(j, jp)];
                }
            }
        }
        blocks.push(b);
    }
    let residual = max_abs_diff(&hat, &rebuilt);
    if residual > BLOCK_TOL {
        return Err(Error::NotBlockDiagonal { residual });
    }
    Ok(blocks)
}

/// One unitary block per irrep, in the irrep order of the owning [`IrrepSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockUnitaries {
    blocks: Vec<CMatrix>,
}

impl BlockUnitaries {
    pub fn new(blocks: Vec<CMatrix>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            let residual = unitarity_residual(b);
            if residual > UNITARY_TOL {
                return Err(Error::NonUnitaryBlock {
                    irrep: format!("#{i}"),
                    residual,
                });
            }
        }
        Ok(BlockUnitaries { blocks })
    }

    /// Haar-random block for each irrep.
    pub fn random<R: Rng + ?Sized>(irreps: &IrrepSet, rng: &mut R) -> Self {
        BlockUnitaries {
            blocks: irreps.irreps.iter().map(|t| haar_unitary(rng, t.dim)).collect(),
        }
    }

    /// The blocks `τ(g)`, which synthesize to the indicator of `g`.
    pub fn of_element(irreps: &IrrepSet, g: usize) -> Self {
        BlockUnitaries {
            blocks: irreps.irreps.iter().map(|t| t.matrices[g].clone()).collect(),
        }
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn max_abs_diff(&self, other: &BlockUnitaries) -> f64 {
        if self.blocks.len() != other.blocks.len() {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .zip(&other.blocks)
            .fold(0.0, |m, (a, b)| m.max(max_abs_diff(a, b)))
    }
}

/// `z_g = Σ_τ (d_τ/|G|) Tr(τ(g)† U_τ)`.
pub fn synthesize_coeffs(blocks: &BlockUnitaries, irreps: &IrrepSet) -> Result<CoeffVector> {
    if blocks.blocks.len() != irreps.irreps.len() {
        return Err(Error::SizeMismatch {
            expected: irreps.irreps.len(),
            found: blocks.blocks.len(),
        });
    }
    for (t, b) in irreps.irreps.iter().zip(&blocks.blocks) {
        if b.shape() != (t.dim, t.dim) {
            return Err(Error::SizeMismatch {
                expected: t.dim,
                found: b.nrows(),
            });
        }
        let residual = unitarity_residual(b);
        if residual > UNITARY_TOL {
            return Err(Error::NonUnitaryBlock {
                irrep: t.label.clone(),
                residual,
            });
        }
    }
    let n = irreps.group.order();
    let coeffs = (0..n)
        .map(|g| {
            irreps
                .irreps
                .iter()
                .zip(&blocks.blocks)
                .map(|(t, u)| {
                    // Tr(A† U) = Σ_{jk} conj(A_{kj}) U_{kj}
                    let a = &t.matrices[g];
                    let tr: C64 = a.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
                    tr * (t.dim as f64 / n as f64)
                })
                .sum()
        })
        .collect();
    CoeffVector::new(irreps.group.clone(), coeffs)
}

/// `B_τ = Σ_g z_g τ(g)` without any unitarity check.
pub fn blocks_of(z: &CoeffVector, irreps: &IrrepSet) -> Vec<CMatrix> {
    irreps
        .irreps
        .iter()
        .map(|t| {
            t.matrices
                .iter()
                .zip(z.coeffs())
                .fold(CMatrix::zeros(t.dim, t.dim), |acc, (m, &zg)| acc + m * zg)
        })
        .collect()
}

/// Blocks `B_τ = Σ_g z_g τ(g)`; fails on the first non-unitary block.
/// Success is exactly the condition for `Σ_g z_g L_g` to be unitary.
pub fn extract_blocks(z: &CoeffVector, irreps: &IrrepSet) -> Result<BlockUnitaries> {
    if z.coeffs().len() != irreps.group.order() {
        return Err(Error::SizeMismatch {
            expected: irreps.group.order(),
            found: z.coeffs().len(),
        });
    }
    let blocks = blocks_of(z, irreps);
    for (t, b) in irreps.irreps.iter().zip(&blocks) {
        let residual = unitarity_residual(b);
        if residual > UNITARY_TOL {
            return Err(Error::NonUnitaryBlock {
                irrep: t.label.clone(),
                residual,
            });
        }
    }
    Ok(BlockUnitaries { blocks })
}

/// Tensor representation `Q_π : |i_1 … i_n⟩ ↦ |i_{π⁻¹(1)} … i_{π⁻¹(n)}⟩` on
/// `(C^d)^{⊗n}`, where `n = π.len()`. Subsystem 1 is the most significant digit.
pub fn tensor_rep(p: &Perm, d: usize) -> Result<CMatrix> {
    let n = p.len();
    let dim = checked_pow(d, n)?;
    let p_inv = perm_inverse(p);
    let mut q = CMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    for col in 0..dim {
        let mut x = col;
        for k in (0..n).rev() {
            digits[k] = x % d;
            x /= d;
        }
        let row = (0..n).fold(0, |acc, k| acc * d + digits[p_inv.apply(k + 1) - 1]);
        q[(row, col)] = C64::from(1.0);
    }
    Ok(q)
}

pub(crate) fn checked_pow(d: usize, n: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::out_of_range("local dimension", "d = 0"));
    }
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(d);
        if dim > DIM_CAP {
            return Err(Error::SizeCap { dim, cap: DIM_CAP });
        }
    }
    Ok(dim)
}

/// `Σ_π z_π Q_π` for a coefficient vector over a permutation group.
pub fn tensor_lincomb(z: &CoeffVector, d: usize) -> Result<CMatrix> {
    let group = z.group();
    let mut acc: Option<CMatrix> = None;
    for g in group.elements() {
        let p = group
            .perm(g)
            .ok_or_else(|| Error::Format("group was not built from permutations".into()))?;
        let term = tensor_rep(p, d)? * z.coeffs()[g];
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    Ok(acc.expect("groups are non-empty"))
}

/// The six canonical-order S₃ coefficients computed directly from
/// `U_1 = e^{iφ₁}`, `U_2 = e^{iφ₂}`, `U_3 = [[a, c], [-c̄, ā]]`.
pub fn s3_closed_form_coeffs(phi1: f64, phi2: f64, a: C64, cc: C64) -> [C64; 6] {
    let e1 = cis(phi1);
    let e2 = cis(phi2);
    let s3 = 3f64.sqrt();
    let plus = a + cc * s3;
    let minus = a - cc * s3;
    [
        (e1 + e2 + 4.0 * a.re) / 6.0,
        (e1 + e2 - 2.0 * plus.re) / 6.0,
        (e1 + e2 - 2.0 * minus.re) / 6.0,
        (e1 - e2 + c(0.0, 4.0 * a.im)) / 6.0,
        (e1 - e2 - c(0.0, 2.0 * plus.im)) / 6.0,
        (e1 - e2 - c(0.0, 2.0 * minus.im)) / 6.0,
    ]
}

/// Block unitaries `(e^{iφ₁}, e^{iφ₂}, [[a, c], [-c̄, ā]])` for S₃.
pub fn s3_blocks(phi1: f64, phi2: f64, a: C64, cc: C64) -> Result<BlockUnitaries> {
    let norm = a.norm_sqr() + cc.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NormViolation(format!("|a|^2 + |c|^2 = {norm}")));
    }
    BlockUnitaries::new(vec![
        scalar(cis(phi1)),
        scalar(cis(phi2)),
        mat2(a, cc, -cc.conj(), a.conj()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{left_regular, regular_lincomb, s3_perms};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn s3_irreps_basic_facts() {
        let irreps = irreps_s3();
        assert_eq!(irreps.dims(), vec![1, 1, 2]);
        let t3 = &irreps.irreps()[2].matrices;
        assert!(max_abs_diff(&(&t3[3] * &t3[4]), &t3[1]) < 1e-15);
        let alt = s3_standard_alt();
        alt.validate(irreps.group()).unwrap();
        for (x, y) in alt.character().iter().zip(irreps.irreps()[2].character()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn irrep_set_rejects_incomplete() {
        let full = irreps_s3();
        let partial = full.irreps()[..2].to_vec();
        assert!(IrrepSet::new(full.group().clone(), partial).is_err());
        let mut broken = full.irreps().to_vec();
        broken[2].matrices[1] = broken[2].matrices[2].clone();
        assert!(IrrepSet::new(full.group().clone(), broken).is_err());
    }

    #[test]
    fn cyclic_characters() {
        let z2 = irreps_cyclic(2).unwrap();
        let ch: Vec<Vec<C64>> = z2.irreps().iter().map(Irrep::character).collect();
        assert!((ch[1][1] + 1.0).norm() < 1e-15);
        assert!((ch[0][1] - 1.0).norm() < 1e-15);
        assert_eq!(irreps_cyclic(1).unwrap().irreps().len(), 1);
        assert!(irreps_cyclic(0).is_err());
    }

    #[test]
    fn fourier_unitary_and_z2_form() {
        for irreps in [
            irreps_cyclic(2).unwrap(),
            irreps_cyclic(3).unwrap(),
            irreps_s3(),
            irreps_cyclic(1).unwrap(),
        ] {
            let f = fourier_matrix(&irreps).unwrap();
            assert!(unitarity_residual(&f) < 1e-10);
        }
        let f = fourier_matrix(&irreps_cyclic(2).unwrap()).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let expected = CMatrix::from_row_slice(2, 2, &[C64::from(r), C64::from(r), C64::from(r), C64::from(-r)]);
        assert!(max_abs_diff(&f, &expected) < 1e-15);
        assert_eq!(
            fourier_matrix(&irreps_cyclic(1).unwrap()).unwrap()[(0, 0)],
            C64::from(1.0)
        );
    }

    #[test]
    fn regular_rep_block_diagonalizes_into_irreps() {
        let irreps = irreps_s3();
        for g in 0..6 {
            let l = left_regular(irreps.group(), g).unwrap();
            let blocks = block_decompose(&l, &irreps).unwrap();
            for (b, t) in blocks.iter().zip(irreps.irreps()) {
                assert!(max_abs_diff(b, &t.matrices[g]) < 1e-12);
            }
        }
        let id = block_decompose(&CMatrix::identity(6, 6), &irreps).unwrap();
        assert!(id
            .iter()
            .all(|b| max_abs_diff(b, &CMatrix::identity(b.nrows(), b.nrows())) < 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let generic = crate::linalg::gaussian_matrix(&mut rng, 6, 6);
        assert!(matches!(
            block_decompose(&generic, &irreps),
            Err(Error::NotBlockDiagonal { .. })
        ));
    }

    #[test]
    fn synthesis_special_cases() {
        let irreps = irreps_s3();
        for g0 in 0..6 {
            let z = synthesize_coeffs(&BlockUnitaries::of_element(&irreps, g0), &irreps).unwrap();
            for (g, zg) in z.coeffs().iter().enumerate() {
                let expect = if g == g0 { 1.0 } else { 0.0 };
                assert!((zg - C64::from(expect)).norm() < 1e-15);
            }
            let back = extract_blocks(&z, &irreps).unwrap();
            assert!(back.max_abs_diff(&BlockUnitaries::of_element(&irreps, g0)) < 1e-15);
        }
        let non_unitary = BlockUnitaries {
            blocks: vec![scalar(C64::from(2.0)), scalar(C64::from(1.0)), CMatrix::identity(2, 2)],
        };
        assert!(matches!(
            synthesize_coeffs(&non_unitary, &irreps),
            Err(Error::NonUnitaryBlock { .. })
        ));
    }

    #[test]
    fn uniform_coefficients_fail_on_standard_block() {
        let irreps = irreps_s3();
        let z = CoeffVector::new(irreps.group().clone(), vec![C64::from(1.0 / 6.0); 6]).unwrap();
        match extract_blocks(&z, &irreps) {
            Err(Error::NonUnitaryBlock { irrep, .. }) => assert_eq!(irrep, "sign"),
            other => panic!("unexpected {other:?}"),
        }
        let blocks = blocks_of(&z, &irreps);
        assert!((blocks[0][(0, 0)] - 1.0).norm() < 1e-15);
        assert!(crate::linalg::max_abs(&blocks[2]) < 1e-15);
    }

    #[test]
    fn z2_synthesis_matches_phase_rotation_family() {
        let irreps = irreps_cyclic(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let phi1: f64 = rng.random_range(0.0..6.3);
            let phi2: f64 = rng.random_range(0.0..6.3);
            let blocks = BlockUnitaries::new(vec![scalar(cis(phi1)), scalar(cis(phi2))]).unwrap();
            let z = synthesize_coeffs(&blocks, &irreps).unwrap();
            let zi = (cis(phi1) + cis(phi2)) / 2.0;
            let zx = (cis(phi1) - cis(phi2)) / 2.0;
            assert!((z.coeffs()[0] - zi).norm() < 1e-15);
            assert!((z.coeffs()[1] - zx).norm() < 1e-15);
            // e^{iφ}(cos α I + i sin α X) with φ = (φ1+φ2)/2, α = (φ1-φ2)/2.
            let phi = (phi1 + phi2) / 2.0;
            let alpha = (phi1 - phi2) / 2.0;
            assert!((zi - cis(phi) * alpha.cos()).norm() < 1e-14);
            assert!((zx - cis(phi) * c(0.0, alpha.sin())).norm() < 1e-14);
            assert!(unitarity_residual(&regular_lincomb(&z)) < 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_synthesis() {
        let irreps = irreps_s3();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (a, cc) = crate::linalg::haar_su2_pair(&mut rng);
            let phi1: f64 = rng.random_range(0.0..6.3);
            let phi2: f64 = rng.random_range(0.0..6.3);
            let z = synthesize_coeffs(&s3_blocks(phi1, phi2, a, cc).unwrap(), &irreps).unwrap();
            let direct = s3_closed_form_coeffs(phi1, phi2, a, cc);
            for (x, y) in z.coeffs().iter().zip(direct) {
                assert!((x - y).norm() < 1e-14);
            }
        }
        assert!(s3_blocks(0.0, 0.0, C64::from(1.0), C64::from(0.5)).is_err());
    }

    #[test]
    fn tensor_rep_examples() {
        let q = s3_perms();
        // Q2 (e_0 ⊗ e_1 ⊗ e_2) = e_1 ⊗ e_2 ⊗ e_0 for d = 3.
        let q2 = tensor_rep(&q[1], 3).unwrap();
        let col = 5; // digits (0,1,2)
        let row = 9 + 2 * 3; // digits (1,2,0)
        assert_eq!(q2[(row, col)], C64::from(1.0));
        assert_eq!(tensor_rep(&q[0], 2).unwrap(), CMatrix::identity(8, 8));
        let swap = tensor_rep(&Perm::transposition(2, 1, 2).unwrap(), 2).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for (r, c_) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            expected[(r, c_)] = C64::from(1.0);
        }
        assert_eq!(swap, expected);
        assert!(matches!(tensor_rep(&Perm::identity(5), 6), Err(Error::SizeCap { .. })));
        // Homomorphism Q_σ Q_π = Q_{σπ}.
        for s in &q {
            for p in &q {
                let sp = crate::groups::perm_compose(s, p).unwrap();
                assert_eq!(
                    tensor_rep(s, 2).unwrap() * tensor_rep(p, 2).unwrap(),
                    tensor_rep(&sp, 2).unwrap()
                );
            }
        }
    }

    #[test]
    fn irreps_json_round_trip() {
        let irreps = irreps_s3();
        let s = irreps.to_json_string();
        let back = IrrepSet::from_json_str(irreps.group().clone(), &s).unwrap();
        assert_eq!(back.irreps(), irreps.irreps());
        let wrong = s.replace("qmix/1", "qmix/9");
        assert!(IrrepSet::from_json_str(irreps.group().clone(), &wrong).is_err());
    }
}

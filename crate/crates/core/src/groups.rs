//! Finite groups given by Cayley tables, permutations, and the regular
//! representations.
//!
//! Element ids are dense integers `0..order`. For the symmetric group on three
//! letters the ids follow a fixed order (identity, the two 3-cycles, then the
//! transpositions swapping 2↔3, 1↔2 and 1↔3) so that coefficient vectors
//! `z_1..z_6` index consistently everywhere in the crate.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Largest order for which associativity is checked on construction.
pub const ASSOCIATIVITY_CHECK_MAX: usize = 24;

/// A permutation of `{1, ..., n}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    /// Builds a permutation from 1-based images: `images[i-1] = π(i)`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[x - 1] = true;
        }
        Ok(Perm { images })
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            images: (1..=n).collect(),
        }
    }

    /// Transposition of the 1-based letters `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidPermutation(format!("({i} {j}) in S_{n}")));
        }
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(i - 1, j - 1);
        Ok(Perm { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `π(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &x)| x == k + 1)
    }
}

/// `(p ∘ q)(i) = p(q(i))`.
pub fn perm_compose(p: &Perm, q: &Perm) -> Result<Perm> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(Perm {
        images: q.images.iter().map(|&x| p.images[x - 1]).collect(),
    })
}

pub fn perm_inverse(p: &Perm) -> Perm {
    let mut images = vec![0; p.len()];
    for (i, &x) in p.images.iter().enumerate() {
        images[x - 1] = i + 1;
    }
    Perm { images }
}

/// A finite group presented by its Cayley table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    perms: Option<Vec<Perm>>,
}

impl FiniteGroup {
    /// Validates a Cayley table: Latin square, two-sided identity, inverses,
    /// and associativity for orders up to [`ASSOCIATIVITY_CHECK_MAX`].
    pub fn from_cayley_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidCayleyTable("empty table".into()));
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {r} has length {}, expected {n}",
                    row.len()
                )));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(Error::InvalidCayleyTable(format!("row {r} is not a permutation")));
                }
                seen[x] = true;
            }
        }
        for col in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                let x = row[col];
                if seen[x] {
                    return Err(Error::InvalidCayleyTable(format!("column {col} is not a permutation")));
                }
                seen[x] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidCayleyTable("no two-sided identity".into()))?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            let h = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidCayleyTable(format!("element {g} has no inverse")))?;
            inverse[g] = h;
        }
        if n <= ASSOCIATIVITY_CHECK_MAX {
            for a in 0..n {
                for b in 0..n {
                    let ab = table[a][b];
                    for c in 0..n {
                        if table[ab][c] != table[a][table[b][c]] {
                            return Err(Error::InvalidCayleyTable(format!(
                                "associativity fails on ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverse,
            perms: None,
        })
    }

    /// Group of permutations under composition, in the given element order.
    pub fn from_permutations(perms: Vec<Perm>) -> Result<Self> {
        let n = perms.len();
        let index = |p: &Perm| perms.iter().position(|q| q == p);
        let mut table = vec![vec![0; n]; n];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let pq = perm_compose(p, q)?;
                table[i][j] = index(&pq)
                    .ok_or_else(|| Error::InvalidCayleyTable("permutations are not closed under composition".into()))?;
            }
        }
        let mut group = Self::from_cayley_table(table)?;
        group.perms = Some(perms);
        Ok(group)
    }

    /// Loads `{"order": n, "table": [[...]]}` and validates it.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: CayleyTableFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if file.table.len() != file.order {
            return Err(Error::InvalidCayleyTable(format!(
                "order {} does not match table size {}",
                file.order,
                file.table.len()
            )));
        }
        Self::from_cayley_table(file.table)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&CayleyTableFile {
            order: self.order(),
            table: self.table.clone(),
        })
        .expect("table serializes")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn cayley_table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Permutation realizing element `g`, when the group was built from permutations.
    pub fn perm(&self, g: usize) -> Option<&Perm> {
        self.perms.as_ref().map(|p| &p[g])
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    fn check(&self, g: usize) -> Result<()> {
        if g < self.order() {
            Ok(())
        } else {
            Err(Error::InvalidElement(g))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CayleyTableFile {
    order: usize,
    table: Vec<Vec<usize>>,
}

/// The six elements of S₃ in canonical order, as image lists.
pub fn s3_perms() -> Vec<Perm> {
    [[1, 2, 3], [3, 1, 2], [2, 3, 1], [1, 3, 2], [2, 1, 3], [3, 2, 1]]
        .iter()
        .map(|im| Perm { images: im.to_vec() })
        .collect()
}

/// Symmetric group `S_n` for `1 <= n <= 5`.
///
/// `n = 3` uses the canonical order of [`s3_perms`]; other sizes list the
/// permutations lexicographically, which puts the identity first.
pub fn symmetric_group(n: usize) -> Result<FiniteGroup> {
    if !(1..=5).contains(&n) {
        return Err(Error::out_of_range(
            "symmetric group size",
            format!("n = {n}, need 1..=5"),
        ));
    }
    let perms = if n == 3 { s3_perms() } else { lexicographic_perms(n) };
    FiniteGroup::from_permutations(perms)
}

fn lexicographic_perms(n: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(Perm { images: prefix.clone() });
            return;
        }
        for x in 1..=n {
            if !used[x - 1] {
                used[x - 1] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x - 1] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Cyclic group `Z_n` with `g·h = (g + h) mod n`.
pub fn cyclic_group(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::out_of_range("cyclic group order", "n = 0"));
    }
    let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    FiniteGroup::from_cayley_table(table)
}

/// `L_g` with entry `(x, y) = 1` iff `g = x·y⁻¹`.
pub fn left_regular(group: &FiniteGroup, g: usize) -> Result<CMatrix> {
    group.check(g)?;
    let n = group.order();
    Ok(CMatrix::from_fn(n, n, |x, y| {
        if group.mul(x, group.inverse(y)) == g {
            C64::from(1.0)
        } else {
            C64::from(0.0)
        }
    }))
}

/// `R_g : |σ⟩ ↦ |σ g⁻¹⟩`, i.e. entry `(x, y) = 1` iff `x = y·g⁻¹`.
pub fn right_regular(group: &FiniteGroup, g: usize) -> Result<CMatrix> {
    group.check(g)?;
    let n = group.order();
    let g_inv = group.inverse(g);
    Ok(CMatrix::from_fn(n, n, |x, y| {
        if group.mul(y, g_inv) == x {
            C64::from(1.0)
        } else {
            C64::from(0.0)
        }
    }))
}

/// A complex coefficient per group element: an element of the group algebra.
#[derive(Debug, Clone)]
pub struct CoeffVector {
    group: Arc<FiniteGroup>,
    coeffs: Vec<C64>,
}

impl CoeffVector {
    pub fn new(group: Arc<FiniteGroup>, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::SizeMismatch {
                expected: group.order(),
                found: coeffs.len(),
            });
        }
        Ok(CoeffVector { group, coeffs })
    }

    pub fn indicator(group: Arc<FiniteGroup>, g: usize) -> Result<Self> {
        group.check(g)?;
        let mut coeffs = vec![C64::from(0.0); group.order()];
        coeffs[g] = C64::from(1.0);
        Ok(CoeffVector { group, coeffs })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn max_abs_diff(&self, other: &CoeffVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

/// `Σ_g z_g L_g`. Each position is written once since the `L_g` have disjoint supports.
pub fn regular_lincomb(z: &CoeffVector) -> CMatrix {
    let group = &z.group;
    let n = group.order();
    CMatrix::from_fn(n, n, |x, y| z.coeffs[group.mul(x, group.inverse(y))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_residual};

    #[test]
    fn s3_composition_matches_canonical_order() {
        let q = s3_perms();
        // Q4 Q5 = Q2, Q2^{-1} = Q3, transpositions self-inverse.
        assert_eq!(perm_compose(&q[3], &q[4]).unwrap(), q[1]);
        assert_eq!(perm_inverse(&q[1]), q[2]);
        for t in &q[3..] {
            assert_eq!(perm_inverse(t), *t);
            assert!(perm_compose(t, t).unwrap().is_identity());
        }
        assert_eq!(perm_compose(&Perm::identity(3), &q[4]).unwrap(), q[4]);
    }

    #[test]
    fn compose_size_mismatch() {
        let err = perm_compose(&Perm::identity(2), &Perm::identity(3)).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch { .. }));
    }

    #[test]
    fn perm_rejects_non_bijection() {
        assert!(Perm::new(vec![1, 1, 2]).is_err());
        assert!(Perm::new(vec![0, 1]).is_err());
        assert!(Perm::new(vec![2, 3, 1]).is_ok());
    }

    #[test]
    fn symmetric_group_orders() {
        assert_eq!(symmetric_group(1).unwrap().order(), 1);
        assert_eq!(symmetric_group(3).unwrap().order(), 6);
        assert_eq!(symmetric_group(4).unwrap().order(), 24);
        assert_eq!(symmetric_group(5).unwrap().order(), 120);
        assert!(symmetric_group(0).is_err());
        assert!(symmetric_group(6).is_err());
        assert_eq!(symmetric_group(4).unwrap().identity(), 0);
    }

    #[test]
    fn cyclic_groups() {
        let z2 = cyclic_group(2).unwrap();
        assert_eq!(z2.mul(1, 1), 0);
        assert_eq!(cyclic_group(1).unwrap().order(), 1);
        assert_eq!(cyclic_group(3).unwrap().element_order(1), 3);
    }

    #[test]
    fn weighted_left_regular_sum_matches_reference_table() {
        let g = symmetric_group(3).unwrap();
        let expected = [
            [1, 3, 2, 4, 5, 6],
            [2, 1, 3, 6, 4, 5],
            [3, 2, 1, 5, 6, 4],
            [4, 6, 5, 1, 2, 3],
            [5, 4, 6, 3, 1, 2],
            [6, 5, 4, 2, 3, 1],
        ];
        let mut sum = CMatrix::zeros(6, 6);
        for k in 0..6 {
            sum += left_regular(&g, k).unwrap() * C64::from((k + 1) as f64);
        }
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(sum[(x, y)], C64::from(expected[x][y] as f64));
            }
        }
    }

    #[test]
    fn left_regular_properties() {
        for group in [
            symmetric_group(3).unwrap(),
            symmetric_group(4).unwrap(),
            cyclic_group(5).unwrap(),
        ] {
            let n = group.order();
            let ls: Vec<CMatrix> = group.elements().map(|g| left_regular(&group, g).unwrap()).collect();
            assert_eq!(ls[group.identity()], CMatrix::identity(n, n));
            let mut cover = CMatrix::zeros(n, n);
            for (g, l) in ls.iter().enumerate() {
                let tr: C64 = l.diagonal().iter().sum();
                let expect = if g == group.identity() { n as f64 } else { 0.0 };
                assert_eq!(tr, C64::from(expect));
                assert!(unitarity_residual(l) == 0.0);
                cover += l;
            }
            // Disjoint supports tiling every position exactly once.
            assert!(cover.iter().all(|&x| x == C64::from(1.0)));
            for a in group.elements() {
                for b in group.elements() {
                    let hs: C64 = (ls[a].adjoint() * &ls[b]).diagonal().iter().sum();
                    let expect = if a == b { n as f64 } else { 0.0 };
                    assert_eq!(hs, C64::from(expect));
                    assert_eq!(&ls[a] * &ls[b], ls[group.mul(a, b)]);
                }
            }
        }
    }

    #[test]
    fn right_regular_commutes_with_left() {
        let g = symmetric_group(3).unwrap();
        assert_eq!(right_regular(&g, 0).unwrap(), CMatrix::identity(6, 6));
        for a in g.elements() {
            let l = left_regular(&g, a).unwrap();
            for b in g.elements() {
                let r = right_regular(&g, b).unwrap();
                assert_eq!(&l * &r, &r * &l);
            }
        }
        let z2 = cyclic_group(2).unwrap();
        for a in z2.elements() {
            let r = right_regular(&z2, a).unwrap();
            let l = left_regular(&z2, z2.inverse(a)).unwrap();
            assert_eq!(r, l.transpose());
        }
    }

    #[test]
    fn invalid_element_ids() {
        let g = cyclic_group(3).unwrap();
        assert_eq!(left_regular(&g, 3).unwrap_err(), Error::InvalidElement(3));
        assert_eq!(right_regular(&g, 7).unwrap_err(), Error::InvalidElement(7));
    }

    #[test]
    fn lincomb_layout_and_special_cases() {
        let g = Arc::new(symmetric_group(3).unwrap());
        let z = CoeffVector::indicator(g.clone(), 0).unwrap();
        assert_eq!(regular_lincomb(&z), CMatrix::identity(6, 6));

        let uniform = CoeffVector::new(g.clone(), vec![C64::from(1.0 / 6.0); 6]).unwrap();
        let m = regular_lincomb(&uniform);
        // Rank-one projector onto the uniform vector.
        assert!(max_abs_diff(&(&m * &m), &m) < 1e-15);
        assert!(m.iter().all(|x| (x - C64::from(1.0 / 6.0)).norm() < 1e-15));

        assert!(CoeffVector::new(g, vec![C64::from(0.0); 5]).is_err());
    }

    #[test]
    fn cayley_json_round_trip_and_validation() {
        let g = symmetric_group(3).unwrap();
        let back = FiniteGroup::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back.cayley_table(), g.cayley_table());
        assert!(FiniteGroup::from_json_str(r#"{"order": 2, "table": [[0,1],[0,1]]}"#).is_err());
        assert!(FiniteGroup::from_json_str(r#"{"order": 3, "table": [[0,1],[1,0]]}"#).is_err());
        // Latin square that is not associative (no group).
        let bad = r#"{"order": 5, "table": [[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}"#;
        assert!(FiniteGroup::from_json_str(bad).is_err());
    }
}

//! Exact vectors and canonical subspaces over GF(p).
//!
//! A [`Subspace`] is stored as the reduced row echelon basis of its span, so two
//! subspaces are equal exactly when their representations are equal. The derived
//! ordering compares field, ambient dimension, rank and then the RREF entries in
//! row-major order; every enumeration in the crate is sorted by it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Scales `v` so its first nonzero coordinate is 1. Returns `None` for the zero vector.
pub fn normalize(field: PrimeField, v: &[u8]) -> Option<Vec<u8>> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let s = field.inv(lead);
    Some(v.iter().map(|&x| field.mul(x, s)).collect())
}

/// Base-p integer code of a vector; lexicographic order of vectors equals numeric order of codes.
pub fn vector_code(field: PrimeField, v: &[u8]) -> usize {
    v.iter()
        .fold(0usize, |acc, &x| acc * field.order() + x as usize)
}

/// `a + c·b`, coordinate-wise.
pub fn axpy(field: PrimeField, a: &[u8], c: u8, b: &[u8]) -> Vec<u8> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| field.add(x, field.mul(c, y)))
        .collect()
}

/// Reduces `rows` to reduced row echelon form, dropping zero rows.
fn rref(field: PrimeField, ambient: usize, mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let mut rank = 0;
    for col in 0..ambient {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let s = field.inv(rows[rank][col]);
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, s);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let c = field.neg(row[col]);
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = field.add(*x, field.mul(c, y));
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

/// A linear subspace of GF(p)^ambient (equivalently a projective subspace of
/// PG(ambient − 1, p)) in canonical RREF form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    field: PrimeField,
    ambient: u8,
    rank: u8,
    entries: Vec<u8>,
}

impl Subspace {
    /// Canonical form of the span of `rows`.
    pub fn span<R: AsRef<[u8]>>(field: PrimeField, ambient: usize, rows: &[R]) -> Result<Self> {
        let mut owned = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    found: r.len(),
                });
            }
            if let Some(&bad) = r.iter().find(|&&x| x >= field.p()) {
                return Err(Error::out_of_range(
                    "coordinate",
                    bad.into(),
                    format!("0..{}", field.p()),
                ));
            }
            owned.push(r.to_vec());
        }
        Ok(Self::from_reduced(field, ambient, rref(field, ambient, owned)))
    }

    fn from_reduced(field: PrimeField, ambient: usize, rows: Vec<Vec<u8>>) -> Self {
        Subspace {
            field,
            ambient: ambient as u8,
            rank: rows.len() as u8,
            entries: rows.concat(),
        }
    }

    pub fn empty(field: PrimeField, ambient: usize) -> Self {
        Self::from_reduced(field, ambient, Vec::new())
    }

    pub fn whole(field: PrimeField, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| (0..ambient).map(|j| u8::from(i == j)).collect())
            .collect();
        Self::from_reduced(field, ambient, rows)
    }

    /// The projective point spanned by a nonzero vector.
    pub fn point(field: PrimeField, v: &[u8]) -> Result<Self> {
        let s = Self::span(field, v.len(), &[v])?;
        if s.rank == 0 {
            return Err(Error::Degenerate("zero vector spans no point".into()));
        }
        Ok(s)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient as usize
    }

    /// Vector dimension.
    #[inline]
    pub fn vdim(&self) -> usize {
        self.rank as usize
    }

    /// Projective dimension, −1 for the empty subspace.
    #[inline]
    pub fn pdim(&self) -> isize {
        self.rank as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.rank == 0
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let a = self.ambient();
        &self.entries[i * a..(i + 1) * a]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.entries.chunks(self.ambient().max(1)).take(self.vdim())
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().position(|&x| x != 0).expect("RREF rows are nonzero"))
            .collect()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                found: other.ambient(),
            });
        }
        Ok(())
    }

    /// Residue of `x` after elimination against the RREF rows; zero iff `x` lies in `self`.
    fn residue(&self, x: &[u8]) -> Vec<u8> {
        let mut r = x.to_vec();
        for (row, c) in self.rows().zip(self.pivots()) {
            if r[c] != 0 {
                let k = self.field.neg(r[c]);
                for (a, &b) in r.iter_mut().zip(row) {
                    *a = self.field.add(*a, self.field.mul(k, b));
                }
            }
        }
        r
    }

    pub fn contains_vector(&self, x: &[u8]) -> Result<bool> {
        if x.len() != self.ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                found: x.len(),
            });
        }
        Ok(self.residue(x).iter().all(|&v| v == 0))
    }

    /// Subspace inclusion `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(other.rank <= self.rank
            && other
                .rows()
                .all(|r| self.residue(r).iter().all(|&v| v == 0)))
    }

    /// The span of `self ∪ other`.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let rows: Vec<Vec<u8>> = self.rows().chain(other.rows()).map(<[u8]>::to_vec).collect();
        Ok(Self::from_reduced(
            self.field,
            self.ambient(),
            rref(self.field, self.ambient(), rows),
        ))
    }

    /// Span of `self` and one extra vector.
    pub fn extend(&self, x: &[u8]) -> Result<Subspace> {
        if x.len() != self.ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                found: x.len(),
            });
        }
        let mut rows: Vec<Vec<u8>> = self.rows().map(<[u8]>::to_vec).collect();
        rows.push(x.to_vec());
        Ok(Self::from_reduced(
            self.field,
            self.ambient(),
            rref(self.field, self.ambient(), rows),
        ))
    }

    /// `{x : r·x = 0 for every row r}` under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        let a = self.ambient();
        let pivots = self.pivots();
        let mut basis = Vec::with_capacity(a - self.vdim());
        for free in (0..a).filter(|c| !pivots.contains(c)) {
            let mut x = vec![0u8; a];
            x[free] = 1;
            for (row, &c) in self.rows().zip(&pivots) {
                x[c] = self.field.neg(row[free]);
            }
            basis.push(x);
        }
        Self::from_reduced(self.field, a, rref(self.field, a, basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(self.annihilator().join(&other.annihilator())?.annihilator())
    }

    /// Normalized vectors of all projective points of the subspace, in lexicographic order.
    pub fn points(&self) -> Vec<Vec<u8>> {
        let d = self.vdim();
        let p = self.field.order();
        let mut out = Vec::with_capacity((p.pow(d as u32) - 1) / (p - 1).max(1));
        let mut coeffs = vec![0u8; d];
        // The leading nonzero coefficient is 1, so the combination is already normalized.
        for lead in 0..d {
            coeffs.iter_mut().for_each(|c| *c = 0);
            coeffs[lead] = 1;
            let tail = d - lead - 1;
            for code in 0..p.pow(tail as u32) {
                let mut rest = code;
                for j in (lead + 1..d).rev() {
                    coeffs[j] = (rest % p) as u8;
                    rest /= p;
                }
                out.push(self.combine(&coeffs));
            }
        }
        out.sort_unstable();
        out
    }

    /// `Σ coeffs[i] · row_i`.
    pub fn combine(&self, coeffs: &[u8]) -> Vec<u8> {
        let mut x = vec![0u8; self.ambient()];
        for (row, &c) in self.rows().zip(coeffs) {
            if c != 0 {
                for (a, &b) in x.iter_mut().zip(row) {
                    *a = self.field.add(*a, self.field.mul(c, b));
                }
            }
        }
        x
    }

    /// All subspaces of `self` with vector dimension `d`, sorted.
    pub fn subspaces(&self, d: usize) -> Vec<Subspace> {
        let n = self.vdim();
        if d > n {
            return Vec::new();
        }
        let mut out: Vec<Subspace> = rref_matrices(self.field, n, d)
            .into_iter()
            .map(|m| {
                let rows: Vec<Vec<u8>> = m.iter().map(|c| self.combine(c)).collect();
                Self::from_reduced(self.field, self.ambient(), rref(self.field, self.ambient(), rows))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Subspaces of codimension one in `self`.
    pub fn hyperplanes(&self) -> Vec<Subspace> {
        if self.vdim() == 0 {
            return Vec::new();
        }
        self.subspaces(self.vdim() - 1)
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            p: self.field.p().into(),
            ambient: self.ambient(),
            rows: self.rows().map(<[u8]>::to_vec).collect(),
        }
    }

    /// Parses the canonical encoding; rows must already be in canonical RREF order.
    pub fn from_json(j: &SubspaceJson) -> Result<Subspace> {
        let field = PrimeField::new(j.p)?;
        let s = Subspace::span(field, j.ambient, &j.rows)?;
        let canonical = s.rows().map(<[u8]>::to_vec).collect::<Vec<_>>() == j.rows;
        if !canonical {
            return Err(Error::Malformed("subspace rows are not in canonical RREF form".into()));
        }
        Ok(s)
    }
}

/// Every RREF matrix of shape `rank × n` over the field (coefficient rows).
fn rref_matrices(field: PrimeField, n: usize, rank: usize) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(rank);
    choose_pivots(n, rank, 0, &mut pivots, &mut |piv| {
        // Free positions: row r, column c > piv[r], c not a pivot.
        let free: Vec<(usize, usize)> = (0..rank)
            .flat_map(|r| {
                (piv[r] + 1..n)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let p = field.order();
        let total = p.pow(free.len() as u32);
        for code in 0..total {
            let mut m = vec![vec![0u8; n]; rank];
            for (r, &c) in piv.iter().enumerate() {
                m[r][c] = 1;
            }
            let mut rest = code;
            for &(r, c) in &free {
                m[r][c] = (rest % p) as u8;
                rest /= p;
            }
            out.push(m);
        }
    });
    out
}

fn choose_pivots(
    n: usize,
    rank: usize,
    start: usize,
    acc: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if acc.len() == rank {
        visit(acc);
        return;
    }
    for c in start..n {
        acc.push(c);
        choose_pivots(n, rank, c + 1, acc, visit);
        acc.pop();
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            for x in r {
                write!(f, "{x}")?;
            }
        }
        write!(f, ">")
    }
}

/// Wire form of a subspace: `{"p":…, "ambient":…, "rows":[[…],…]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub p: u32,
    pub ambient: usize,
    pub rows: Vec<Vec<u8>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn canonical_rows_are_kept() {
        let s = Subspace::span(gf(2), 4, &[[1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        assert_eq!(s.vdim(), 2);
        assert_eq!(s.rows().collect::<Vec<_>>(), vec![&[1, 0, 0, 0][..], &[0, 1, 0, 0][..]]);
    }

    #[test]
    fn elimination_clears_above_pivots() {
        let s = Subspace::span(gf(2), 4, &[[1, 1, 0, 0], [0, 1, 0, 0]]).unwrap();
        assert_eq!(s.rows().collect::<Vec<_>>(), vec![&[1, 0, 0, 0][..], &[0, 1, 0, 0][..]]);
    }

    #[test]
    fn pivot_is_scaled_to_one() {
        let s = Subspace::span(gf(3), 4, &[[2, 1, 0, 0]]).unwrap();
        assert_eq!(s.row(0), &[1, 2, 0, 0]);
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let s = Subspace::span(gf(3), 3, &[[1, 1, 0], [2, 2, 0], [0, 0, 0]]).unwrap();
        assert_eq!(s.vdim(), 1);
        assert_eq!(s.pdim(), 0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let e = Subspace::span(gf(2), 4, &[vec![1u8, 0, 0]]).unwrap_err();
        assert_eq!(e, Error::DimensionMismatch { expected: 4, found: 3 });
    }

    #[test]
    fn empty_subspace_has_pdim_minus_one() {
        let e = Subspace::empty(gf(2), 4);
        assert_eq!(e.pdim(), -1);
        assert!(e.points().is_empty());
        assert_eq!(Subspace::span::<[u8; 4]>(gf(2), 4, &[]).unwrap(), e);
    }

    #[test]
    fn lines_through_a_common_point_meet_in_it() {
        let f = gf(2);
        let l1 = Subspace::span(f, 4, &[[1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        let l2 = Subspace::span(f, 4, &[[1, 0, 0, 0], [0, 0, 1, 0]]).unwrap();
        let m = l1.intersect(&l2).unwrap();
        assert_eq!(m, Subspace::point(f, &[1, 0, 0, 0]).unwrap());
        assert_eq!(l1.intersect(&l1).unwrap(), l1);
        assert_eq!(l1.join(&l1).unwrap(), l1);
    }

    #[test]
    fn point_counts() {
        let line = Subspace::span(gf(2), 4, &[[1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        assert_eq!(line.points().len(), 3);
        let plane = Subspace::span(gf(3), 4, &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]]).unwrap();
        assert_eq!(plane.points().len(), 13);
        assert_eq!(Subspace::whole(gf(5), 4).points().len(), 156);
    }

    #[test]
    fn hyperplanes_of_a_plane_over_gf3() {
        let plane = Subspace::whole(gf(3), 3);
        let hs = plane.hyperplanes();
        assert_eq!(hs.len(), 13);
        assert!(hs.iter().all(|h| h.vdim() == 2 && plane.contains(h).unwrap()));
    }

    #[test]
    fn json_rejects_non_canonical_rows() {
        let j = SubspaceJson { p: 2, ambient: 4, rows: vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0]] };
        assert!(Subspace::from_json(&j).is_err());
        let s = Subspace::span(gf(2), 4, &[[1, 1, 0, 0], [0, 1, 0, 0]]).unwrap();
        assert_eq!(Subspace::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let a = Subspace::whole(gf(2), 4);
        let b = Subspace::whole(gf(3), 4);
        assert!(matches!(a.intersect(&b), Err(Error::FieldMismatch { .. })));
        let c = Subspace::whole(gf(2), 6);
        assert!(matches!(a.join(&c), Err(Error::DimensionMismatch { .. })));
    }
}

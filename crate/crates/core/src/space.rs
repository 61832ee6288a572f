//! The ambient symplectic geometry: the alternating form, orthogonality and
//! total isotropy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::linalg::Subspace;

/// Largest rank accepted by [`SymplecticSpace::standard`]. Index-combinatorial
/// work on base subsets (cardinalities, selectors) stays cheap up to here.
pub const MAX_RANK: usize = 6;

/// GF(p)^{2n} with the standard form Ω(e_i, e_{n+i}) = 1 = −Ω(e_{n+i}, e_i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticSpace {
    n: usize,
    field: PrimeField,
    gram: Vec<Vec<u8>>,
}

impl SymplecticSpace {
    pub fn standard(n: usize, p: u32) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if !(2..=MAX_RANK).contains(&n) {
            return Err(Error::UnsupportedRank(n));
        }
        let mut gram = vec![vec![0u8; 2 * n]; 2 * n];
        for i in 0..n {
            gram[i][n + i] = 1;
            gram[n + i][i] = field.neg(1);
        }
        Ok(SymplecticSpace { n, field, gram })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.field.p()
    }

    /// Vector dimension 2n.
    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn gram(&self) -> &[Vec<u8>] {
        &self.gram
    }

    pub fn header(&self) -> SpaceHeader {
        SpaceHeader {
            n: self.n,
            p: self.p().into(),
            form: "standard".into(),
        }
    }

    pub fn from_header(h: &SpaceHeader) -> Result<Self> {
        if h.form != "standard" {
            return Err(Error::Malformed(format!("unknown form {:?}", h.form)));
        }
        Self::standard(h.n, h.p)
    }

    /// e_i, zero-based.
    pub fn unit(&self, i: usize) -> Vec<u8> {
        let mut v = vec![0u8; self.dim()];
        v[i] = 1;
        v
    }

    /// Raw value of Ω(x, y); both vectors must have length 2n.
    #[inline]
    pub fn form(&self, x: &[u8], y: &[u8]) -> u8 {
        debug_assert!(x.len() == self.dim() && y.len() == self.dim());
        let f = self.field;
        let n = self.n;
        let mut acc = 0u8;
        for i in 0..n {
            acc = f.add(acc, f.mul(x[i], y[n + i]));
            acc = f.sub(acc, f.mul(x[n + i], y[i]));
        }
        acc
    }

    pub fn omega(&self, x: &[u8], y: &[u8]) -> Result<FieldElement> {
        for v in [x, y] {
            if v.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: v.len(),
                });
            }
        }
        Ok(self.field.element(self.form(x, y).into()))
    }

    /// Orthogonality of the points spanned by `x` and `y`; independent of the representatives.
    #[inline]
    pub fn points_orthogonal(&self, x: &[u8], y: &[u8]) -> bool {
        self.form(x, y) == 0
    }

    fn check(&self, s: &Subspace) -> Result<()> {
        if s.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.p(),
                right: s.field().p(),
            });
        }
        if s.ambient() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.ambient(),
            });
        }
        Ok(())
    }

    /// The row `b^T G`, so that Ω(b, x) = row · x.
    fn form_row(&self, b: &[u8]) -> Vec<u8> {
        let f = self.field;
        (0..self.dim())
            .map(|j| {
                b.iter()
                    .zip(&self.gram)
                    .fold(0u8, |acc, (&bi, g)| f.add(acc, f.mul(bi, g[j])))
            })
            .collect()
    }

    /// The orthogonal complement S^⊥, computed as the kernel of x ↦ (Ω(b, x))_b.
    pub fn perp(&self, s: &Subspace) -> Result<Subspace> {
        self.check(s)?;
        let rows: Vec<Vec<u8>> = s.rows().map(|b| self.form_row(b)).collect();
        Ok(Subspace::span(self.field, self.dim(), &rows)?.annihilator())
    }

    pub fn is_totally_isotropic(&self, s: &Subspace) -> Result<bool> {
        self.check(s)?;
        let rows: Vec<&[u8]> = s.rows().collect();
        Ok(rows
            .iter()
            .enumerate()
            .all(|(i, a)| rows[i + 1..].iter().all(|b| self.form(a, b) == 0)))
    }

    /// S ⊥ U: every point of S is orthogonal to every point of U.
    pub fn orthogonal(&self, s: &Subspace, u: &Subspace) -> Result<bool> {
        self.check(s)?;
        self.check(u)?;
        Ok(s.rows().all(|a| u.rows().all(|b| self.form(a, b) == 0)))
    }
}

impl fmt::Debug for SymplecticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({}, {})", 2 * self.n - 1, self.p())
    }
}

impl fmt::Display for SymplecticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} p={}", self.n, self.p())
    }
}

/// `{"n":…, "p":…, "form":"standard"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceHeader {
    pub n: usize,
    pub p: u32,
    pub form: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gram_over_gf2_and_gf3() {
        let s = SymplecticSpace::standard(2, 2).unwrap();
        let g = s.gram();
        for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            assert_eq!(g[i][j], 1);
        }
        assert_eq!(g.iter().flatten().filter(|&&x| x != 0).count(), 4);

        let s = SymplecticSpace::standard(2, 3).unwrap();
        assert_eq!(s.gram()[0][2], 1);
        assert_eq!(s.gram()[2][0], 2);

        let s = SymplecticSpace::standard(3, 2).unwrap();
        assert_eq!(s.gram().len(), 6);
        for i in 0..3 {
            assert_eq!(s.gram()[i][i + 3], 1);
            assert_eq!(s.gram()[i + 3][i], 1);
        }
    }

    #[test]
    fn rank_one_is_rejected() {
        assert_eq!(SymplecticSpace::standard(1, 2).unwrap_err(), Error::UnsupportedRank(1));
    }

    #[test]
    fn unit_vector_orthogonality() {
        let s = SymplecticSpace::standard(3, 3).unwrap();
        assert!(s.points_orthogonal(&s.unit(0), &s.unit(1)));
        assert!(!s.points_orthogonal(&s.unit(0), &s.unit(3)));
        assert_eq!(s.omega(&s.unit(0), &s.unit(3)).unwrap().value(), 1);
        assert_eq!(s.omega(&s.unit(3), &s.unit(0)).unwrap().value(), 2);
    }

    #[test]
    fn perp_of_e1_in_w32() {
        let s = SymplecticSpace::standard(2, 2).unwrap();
        let f = s.field();
        let e1 = Subspace::point(f, &s.unit(0)).unwrap();
        let expected = Subspace::span(f, 4, &[s.unit(0), s.unit(1), s.unit(3)]).unwrap();
        assert_eq!(s.perp(&e1).unwrap(), expected);
    }

    #[test]
    fn perp_degenerate_cases() {
        let s = SymplecticSpace::standard(3, 2).unwrap();
        let f = s.field();
        let whole = Subspace::whole(f, 6);
        let empty = Subspace::empty(f, 6);
        assert_eq!(s.perp(&whole).unwrap(), empty);
        assert_eq!(s.perp(&empty).unwrap(), whole);
        let pt = Subspace::point(f, &s.unit(2)).unwrap();
        assert_eq!(s.perp(&pt).unwrap().pdim(), 4);
    }

    #[test]
    fn isotropy_examples() {
        let s = SymplecticSpace::standard(3, 2).unwrap();
        let f = s.field();
        let hyperbolic = Subspace::span(f, 6, &[s.unit(0), s.unit(3)]).unwrap();
        let iso = Subspace::span(f, 6, &[s.unit(0), s.unit(1)]).unwrap();
        assert!(!s.is_totally_isotropic(&hyperbolic).unwrap());
        assert!(s.is_totally_isotropic(&iso).unwrap());
        assert!(s.orthogonal(&iso, &Subspace::point(f, &s.unit(2)).unwrap()).unwrap());
    }
}

//! Symplectic bases: recognition, the perturbations used to exhibit extra bases,
//! transvection-generated collineations and exhaustive enumeration.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::grassmannian::Geometry;
use crate::linalg::{axpy, normalize, Subspace};
use crate::space::{SpaceHeader, SymplecticSpace};

/// Why a tuple of points is not a symplectic base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    Arity { expected: usize, found: usize },
    WrongLength { index: usize },
    ZeroVector { index: usize },
    Dependent,
    NoPartner { index: usize },
    PartnerNotUnique { index: usize, partners: Vec<usize> },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Arity { expected, found } => write!(f, "expected {expected} points, found {found}"),
            Rejection::WrongLength { index } => write!(f, "point {index} has the wrong length"),
            Rejection::ZeroVector { index } => write!(f, "point {index} is the zero vector"),
            Rejection::Dependent => write!(f, "points are linearly dependent"),
            Rejection::NoPartner { index } => write!(f, "point {index} is orthogonal to every other point"),
            Rejection::PartnerNotUnique { index, partners } => {
                write!(f, "point {index} is non-orthogonal to several points {partners:?}")
            }
        }
    }
}

impl std::error::Error for Rejection {}

/// Returns the pairing involution σ (zero-based) if the 2n points form a symplectic base.
pub fn recognize(space: &SymplecticSpace, points: &[Vec<u8>]) -> Result<Vec<usize>, Rejection> {
    let m = space.dim();
    if points.len() != m {
        return Err(Rejection::Arity {
            expected: m,
            found: points.len(),
        });
    }
    for (i, x) in points.iter().enumerate() {
        if x.len() != m {
            return Err(Rejection::WrongLength { index: i });
        }
        if x.iter().all(|&v| v == 0) {
            return Err(Rejection::ZeroVector { index: i });
        }
    }
    let span = Subspace::span(space.field(), m, points).map_err(|_| Rejection::Dependent)?;
    if span.vdim() != m {
        return Err(Rejection::Dependent);
    }
    let mut sigma = Vec::with_capacity(m);
    for (i, x) in points.iter().enumerate() {
        let partners: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|&(j, y)| j != i && !space.points_orthogonal(x, y))
            .map(|(j, _)| j)
            .collect();
        match partners.as_slice() {
            [] => return Err(Rejection::NoPartner { index: i }),
            [j] => sigma.push(*j),
            _ => return Err(Rejection::PartnerNotUnique { index: i, partners }),
        }
    }
    Ok(sigma)
}

/// 2n normalized points with their pairing σ (zero-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticBase {
    points: Vec<Vec<u8>>,
    sigma: Vec<usize>,
}

impl SymplecticBase {
    pub fn new(space: &SymplecticSpace, points: Vec<Vec<u8>>) -> Result<Self, Rejection> {
        let sigma = recognize(space, &points)?;
        let f = space.field();
        let points = points
            .iter()
            .map(|x| normalize(f, x).expect("checked nonzero"))
            .collect();
        Ok(SymplecticBase { points, sigma })
    }

    /// e_1, …, e_{2n} with σ(i) = n + i.
    pub fn standard(space: &SymplecticSpace) -> Self {
        let points = (0..space.dim()).map(|i| space.unit(i)).collect();
        let n = space.n();
        let sigma = (0..2 * n).map(|i| (i + n) % (2 * n)).collect();
        SymplecticBase { points, sigma }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points.len() / 2
    }

    pub fn points(&self) -> &[Vec<u8>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[u8] {
        &self.points[i]
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    #[inline]
    pub fn partner(&self, i: usize) -> usize {
        self.sigma[i]
    }

    /// Order-free identity: the sorted list of sorted partner pairs.
    pub fn key(&self) -> Vec<(Vec<u8>, Vec<u8>)> {
        let mut pairs: Vec<(Vec<u8>, Vec<u8>)> = (0..self.len())
            .filter(|&i| i < self.sigma[i])
            .map(|i| {
                let (a, b) = (self.points[i].clone(), self.points[self.sigma[i]].clone());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        pairs.sort();
        pairs
    }

    /// Relabels the points: the new base has point `perm[i]` of `self` at position `i`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; perm.len()];
        for (i, &j) in perm.iter().enumerate() {
            inverse[j] = i;
        }
        SymplecticBase {
            points: perm.iter().map(|&j| self.points[j].clone()).collect(),
            sigma: perm.iter().map(|&j| inverse[self.sigma[j]]).collect(),
        }
    }

    pub fn to_json(&self, space: &SymplecticSpace) -> BaseJson {
        BaseJson {
            space: space.header(),
            points: self.points.clone(),
            sigma: self.sigma.iter().map(|&s| s + 1).collect(),
        }
    }

    pub fn from_json(j: &BaseJson) -> Result<(SymplecticSpace, Self)> {
        let space = SymplecticSpace::from_header(&j.space)?;
        let base = SymplecticBase::new(&space, j.points.clone())
            .map_err(|r| Error::Malformed(format!("not a symplectic base: {r}")))?;
        let sigma: Vec<usize> = j.sigma.iter().map(|&s| s.wrapping_sub(1)).collect();
        if sigma != base.sigma {
            return Err(Error::Malformed("sigma does not match the point pairing".into()));
        }
        Ok((space, base))
    }

    /// (B ∖ {p_i}) ∪ {p_i + c·p_σ(i)}, same pairing.
    pub fn perturb_one(&self, space: &SymplecticSpace, i: usize, c: FieldElement) -> Result<Self> {
        self.check_index(i)?;
        if c.is_zero() {
            return Err(Error::Degenerate("perturbation coefficient is zero".into()));
        }
        let f = space.field();
        let moved = axpy(f, &self.points[i], c.value(), &self.points[self.sigma[i]]);
        let mut points = self.points.clone();
        points[i] = moved;
        self.rebuild(space, points)
    }

    /// Replaces p_i by p'_i = p_i + c·p_j and p_σ(j) by the unique point of the line
    /// p_σ(i) p_σ(j) orthogonal to p'_i. Requires j ∉ {i, σ(i)}.
    pub fn perturb_pair(&self, space: &SymplecticSpace, i: usize, j: usize, c: FieldElement) -> Result<Self> {
        self.check_index(i)?;
        self.check_index(j)?;
        if j == i || j == self.sigma[i] {
            return Err(Error::out_of_range("j", j as i64, "j ∉ {i, σ(i)}"));
        }
        if c.is_zero() {
            return Err(Error::Degenerate("perturbation coefficient is zero".into()));
        }
        let f = space.field();
        let (si, sj) = (self.sigma[i], self.sigma[j]);
        let xi = &self.points[i];
        let xj = &self.points[j];
        let omega_i = space.form(xi, &self.points[si]);
        let omega_j = space.form(xj, &self.points[sj]);
        // Ω(x_i + c x_j, x_σj + λ x_σi) = λ Ω_i + c Ω_j = 0
        let lambda = f.neg(f.mul(f.mul(c.value(), omega_j), f.inv(omega_i)));
        let mut points = self.points.clone();
        points[i] = axpy(f, xi, c.value(), xj);
        points[sj] = axpy(f, &self.points[sj], lambda, &self.points[si]);
        self.rebuild(space, points)
    }

    fn rebuild(&self, space: &SymplecticSpace, points: Vec<Vec<u8>>) -> Result<Self> {
        let base = SymplecticBase::new(space, points)
            .map_err(|r| Error::Defect(format!("perturbation produced a non-base: {r}")))?;
        if base.sigma != self.sigma {
            return Err(Error::Defect("perturbation changed the pairing".into()));
        }
        Ok(base)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::out_of_range("index", i as i64, format!("0..{}", self.len())));
        }
        Ok(())
    }
}

/// `{"space":header, "points":[[…]×2n], "sigma":[…×2n]}`; sigma is one-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseJson {
    pub space: SpaceHeader,
    pub points: Vec<Vec<u8>>,
    pub sigma: Vec<usize>,
}

/// A linear automorphism of the form, stored as the images of the unit vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collineation {
    images: Vec<Vec<u8>>,
}

impl Collineation {
    pub fn identity(space: &SymplecticSpace) -> Self {
        Collineation {
            images: (0..space.dim()).map(|i| space.unit(i)).collect(),
        }
    }

    /// x ↦ x + c·Ω(x, v)·v
    pub fn transvection(space: &SymplecticSpace, v: &[u8], c: u8) -> Self {
        let f = space.field();
        let images = (0..space.dim())
            .map(|j| {
                let e = space.unit(j);
                let t = f.mul(c, space.form(&e, v));
                axpy(f, &e, t, v)
            })
            .collect();
        Collineation { images }
    }

    /// Product of the given transvections, applied left to right.
    pub fn from_transvections(space: &SymplecticSpace, factors: &[(Vec<u8>, u8)]) -> Self {
        factors.iter().fold(Self::identity(space), |acc, (v, c)| {
            Self::transvection(space, v, *c).compose(space, &acc)
        })
    }

    pub fn apply(&self, space: &SymplecticSpace, x: &[u8]) -> Vec<u8> {
        let f = space.field();
        let mut y = vec![0u8; space.dim()];
        for (img, &c) in self.images.iter().zip(x) {
            if c != 0 {
                for (a, &b) in y.iter_mut().zip(img) {
                    *a = f.add(*a, f.mul(c, b));
                }
            }
        }
        y
    }

    /// `self ∘ other`.
    pub fn compose(&self, space: &SymplecticSpace, other: &Collineation) -> Collineation {
        Collineation {
            images: other.images.iter().map(|x| self.apply(space, x)).collect(),
        }
    }

    pub fn preserves_form(&self, space: &SymplecticSpace) -> bool {
        let m = space.dim();
        (0..m).all(|i| {
            (0..m).all(|j| space.form(&self.images[i], &self.images[j]) == space.form(&space.unit(i), &space.unit(j)))
        })
    }

    pub fn map_base(&self, space: &SymplecticSpace, b: &SymplecticBase) -> SymplecticBase {
        let f = space.field();
        SymplecticBase {
            points: b
                .points
                .iter()
                .map(|x| normalize(f, &self.apply(space, x)).expect("invertible"))
                .collect(),
            sigma: b.sigma.clone(),
        }
    }

    pub fn to_point_map(&self, geo: &Geometry) -> PointMap {
        let space = geo.space();
        let table = geo
            .points()
            .elements()
            .iter()
            .map(|pt| geo.point_index(&self.apply(space, pt.row(0))))
            .collect();
        PointMap {
            source: space.clone(),
            target: space.clone(),
            table,
        }
    }
}

/// Number of transvection factors in a random collineation.
pub fn random_word_length(space: &SymplecticSpace) -> usize {
    8 * space.n()
}

/// A product of random transvections, deterministic per seed.
pub fn random_collineation(space: &SymplecticSpace, seed: u64) -> Collineation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = space.field();
    let factors: Vec<(Vec<u8>, u8)> = (0..random_word_length(space))
        .map(|_| {
            let v = loop {
                let v: Vec<u8> = (0..space.dim()).map(|_| rng.gen_range(0..f.p())).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            (v, rng.gen_range(1..f.p()))
        })
        .collect();
    Collineation::from_transvections(space, &factors)
}

/// The image of the standard base under [`random_collineation`].
pub fn random_base(space: &SymplecticSpace, seed: u64) -> SymplecticBase {
    random_collineation(space, seed).map_base(space, &SymplecticBase::standard(space))
}

/// A map between the point sets of two spaces, as a table over G_0 indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    source: SymplecticSpace,
    target: SymplecticSpace,
    table: Vec<usize>,
}

impl PointMap {
    pub fn new(source: &Geometry, target: &Geometry, table: Vec<usize>) -> Result<Self> {
        if table.len() != source.points().len() {
            return Err(Error::DimensionMismatch {
                expected: source.points().len(),
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&t| t >= target.points().len()) {
            return Err(Error::out_of_range("point index", bad as i64, format!("0..{}", target.points().len())));
        }
        Ok(PointMap {
            source: source.space().clone(),
            target: target.space().clone(),
            table,
        })
    }

    pub fn identity(geo: &Geometry) -> Self {
        PointMap {
            source: geo.space().clone(),
            target: geo.space().clone(),
            table: (0..geo.points().len()).collect(),
        }
    }

    pub fn source(&self) -> &SymplecticSpace {
        &self.source
    }

    pub fn target(&self) -> &SymplecticSpace {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.table.len());
        self.table.iter().all(|t| seen.insert(*t))
    }

    pub fn is_bijective(&self, target: &Geometry) -> bool {
        self.is_injective() && self.table.len() == target.points().len()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PointMap) -> Result<PointMap> {
        if other.target != self.source {
            return Err(Error::SpaceMismatch("composition of incompatible maps".into()));
        }
        Ok(PointMap {
            source: other.source.clone(),
            target: self.target.clone(),
            table: other.table.iter().map(|&i| self.table[i]).collect(),
        })
    }

    /// First pair (p, q) with p ⊥ q ⇎ h(p) ⊥ h(q), if any.
    pub fn orthogonality_violation(&self, source: &Geometry, target: &Geometry) -> Option<(usize, usize)> {
        let sp = source.points();
        let tp = target.points();
        let m = sp.len();
        (0..m).into_par_iter().find_map_first(|a| {
            let x = sp.get(a).row(0);
            let hx = tp.get(self.table[a]).row(0);
            (a + 1..m).find_map(|b| {
                let before = source.space().points_orthogonal(x, sp.get(b).row(0));
                let after = target.space().points_orthogonal(hx, tp.get(self.table[b]).row(0));
                (before != after).then_some((a, b))
            })
        })
    }

    /// Image of a base as a point tuple (not necessarily a base).
    pub fn image_points(&self, source: &Geometry, target: &Geometry, b: &SymplecticBase) -> Vec<Vec<u8>> {
        b.points()
            .iter()
            .map(|x| target.points().get(self.table[source.point_index(x)]).row(0).to_vec())
            .collect()
    }

    pub fn map_base(&self, source: &Geometry, target: &Geometry, b: &SymplecticBase) -> Result<SymplecticBase, Rejection> {
        SymplecticBase::new(target.space(), self.image_points(source, target, b))
    }

    pub fn to_json(&self, source: &Geometry, target: &Geometry) -> PointMapJson {
        PointMapJson {
            space: self.source.header(),
            target_space: self.target.header(),
            pairs: self
                .table
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    [
                        source.points().get(i).row(0).to_vec(),
                        target.points().get(t).row(0).to_vec(),
                    ]
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PointMapJson, source: &Geometry, target: &Geometry) -> Result<Self> {
        if j.space != source.space().header() || j.target_space != target.space().header() {
            return Err(Error::SpaceMismatch("point map headers do not match the geometries".into()));
        }
        let m = source.points().len();
        let mut table = vec![usize::MAX; m];
        for [x, y] in &j.pairs {
            let xs = Subspace::point(source.space().field(), x)?;
            let ys = Subspace::point(target.space().field(), y)?;
            let a = source
                .points()
                .index_of(&xs)
                .ok_or_else(|| Error::Malformed(format!("{x:?} is not a point")))?;
            let b = target
                .points()
                .index_of(&ys)
                .ok_or_else(|| Error::Malformed(format!("{y:?} is not a point")))?;
            if table[a] != usize::MAX {
                return Err(Error::Malformed(format!("point {x:?} mapped twice")));
            }
            table[a] = b;
        }
        if table.contains(&usize::MAX) {
            return Err(Error::Malformed("point map is not total".into()));
        }
        PointMap::new(source, target, table)
    }
}

/// `{"space":header, "target_space":header, "pairs":[[point, point], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMapJson {
    pub space: SpaceHeader,
    pub target_space: SpaceHeader,
    pub pairs: Vec<[Vec<u8>; 2]>,
}

/// Whether exhaustive base enumeration is allowed for this space.
pub fn enumeration_feasible(space: &SymplecticSpace) -> bool {
    matches!((space.n(), space.p()), (2, 2) | (2, 3) | (3, 2))
}

/// Every symplectic base exactly once, as sets of partner pairs.
///
/// Backtracking over pairs (a_t, b_t) of point indices with a_1 < … < a_n and
/// a_t < b_t; each new pair lies in the perp of the pairs already chosen. Output
/// bases are ordered a_1..a_n, b_1..b_n so σ(i) = n + i.
pub fn enumerate_all_bases(space: &SymplecticSpace) -> Result<Vec<SymplecticBase>> {
    if !enumeration_feasible(space) {
        return Err(Error::Infeasible {
            n: space.n(),
            p: space.p(),
            what: "exhaustive base enumeration",
        });
    }
    let f = space.field();
    let points = Subspace::whole(f, space.dim()).points();
    let m = points.len();
    assert!(m <= 128);
    let perp: Vec<u128> = points
        .iter()
        .map(|x| {
            points
                .iter()
                .enumerate()
                .filter(|(_, y)| space.points_orthogonal(x, y))
                .fold(0u128, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let all: u128 = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let n = space.n();

    let roots: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
        .filter(|&(a, b)| perp[a] >> b & 1 == 0)
        .collect();
    let mut found: Vec<Vec<(usize, usize)>> = roots
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let mut out = Vec::new();
            let mut stack = vec![(a, b)];
            extend_pairs(&perp, all & perp[a] & perp[b], n, &mut stack, &mut out);
            out
        })
        .collect();
    found.sort();
    Ok(found
        .into_iter()
        .map(|pairs| {
            let pts = pairs
                .iter()
                .map(|&(a, _)| points[a].clone())
                .chain(pairs.iter().map(|&(_, b)| points[b].clone()))
                .collect();
            SymplecticBase {
                points: pts,
                sigma: (0..2 * n).map(|i| (i + n) % (2 * n)).collect(),
            }
        })
        .collect())
}

fn extend_pairs(
    perp: &[u128],
    allowed: u128,
    n: usize,
    stack: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if stack.len() == n {
        out.push(stack.clone());
        return;
    }
    let last_a = stack.last().expect("non-empty").0;
    let mut cand_a = allowed & !((1u128 << (last_a + 1)) - 1);
    while cand_a != 0 {
        let a = cand_a.trailing_zeros() as usize;
        cand_a &= cand_a - 1;
        // b must be non-orthogonal to a, allowed, and larger than a.
        let mut cand_b = allowed & !perp[a] & !((1u128 << (a + 1)) - 1);
        while cand_b != 0 {
            let b = cand_b.trailing_zeros() as usize;
            cand_b &= cand_b - 1;
            stack.push((a, b));
            extend_pairs(perp, allowed & perp[a] & perp[b], n, stack, out);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize, p: u32) -> SymplecticSpace {
        SymplecticSpace::standard(n, p).unwrap()
    }

    #[test]
    fn standard_base_pairs_i_with_n_plus_i() {
        for (n, p) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5)] {
            let sp = space(n, p);
            let b = SymplecticBase::standard(&sp);
            let sigma = recognize(&sp, b.points()).unwrap();
            assert_eq!(sigma, (0..2 * n).map(|i| (i + n) % (2 * n)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn replacing_e4_by_e1_plus_e3_is_rejected() {
        let sp = space(2, 2);
        let pts = vec![sp.unit(0), sp.unit(1), sp.unit(2), vec![1, 0, 1, 0]];
        // e1+e3 lies in the span of e1, e3: the tuple is dependent before any pairing is examined.
        assert_eq!(recognize(&sp, &pts), Err(Rejection::Dependent));
        // Independent variant with an ambiguous partner: e1 is non-orthogonal to e3 and e3+e4.
        let pts = vec![sp.unit(0), sp.unit(1), sp.unit(2), vec![0, 0, 1, 1]];
        assert!(matches!(recognize(&sp, &pts), Err(Rejection::PartnerNotUnique { .. })));
    }

    #[test]
    fn arity_and_dependence() {
        let sp = space(2, 3);
        assert!(matches!(recognize(&sp, &[sp.unit(0)]), Err(Rejection::Arity { expected: 4, found: 1 })));
        let pts = vec![sp.unit(0), sp.unit(0), sp.unit(2), sp.unit(3)];
        assert_eq!(recognize(&sp, &pts), Err(Rejection::Dependent));
    }

    #[test]
    fn perturb_one_over_gf2_and_gf3() {
        let sp = space(2, 2);
        let b = SymplecticBase::standard(&sp);
        let b2 = b.perturb_one(&sp, 0, sp.field().element(1)).unwrap();
        assert_eq!(b2.point(0), &[1, 0, 1, 0]);
        assert_eq!(b2.sigma(), b.sigma());

        let sp = space(2, 3);
        let b = SymplecticBase::standard(&sp);
        let x = b.perturb_one(&sp, 1, sp.field().element(1)).unwrap();
        let y = b.perturb_one(&sp, 1, sp.field().element(2)).unwrap();
        assert_ne!(x.key(), y.key());
        assert!(matches!(b.perturb_one(&sp, 1, sp.field().element(0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn perturb_pair_solves_for_the_orthogonal_point() {
        let sp = space(3, 2);
        let b = SymplecticBase::standard(&sp);
        let b2 = b.perturb_pair(&sp, 0, 1, sp.field().element(1)).unwrap();
        assert_eq!(b2.point(0), &[1, 1, 0, 0, 0, 0]);
        assert_eq!(b2.point(4), &[0, 0, 0, 1, 1, 0]);
        assert_eq!(b2.sigma(), b.sigma());
        assert!(b.perturb_pair(&sp, 0, 3, sp.field().element(1)).is_err());
        assert!(b.perturb_pair(&sp, 0, 0, sp.field().element(1)).is_err());
    }

    #[test]
    fn perturbations_always_recognized_exhaustively() {
        for (n, p) in [(2, 2), (2, 3), (3, 2)] {
            let sp = space(n, p);
            let b = random_base(&sp, 7);
            for c in sp.field().nonzero() {
                let c = sp.field().element(c.into());
                for i in 0..2 * n {
                    assert!(b.perturb_one(&sp, i, c).is_ok());
                    for j in 0..2 * n {
                        if j != i && j != b.partner(i) {
                            let r = b.perturb_pair(&sp, i, j, c).unwrap();
                            assert!(recognize(&sp, r.points()).is_ok());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_word_is_identity() {
        let sp = space(3, 3);
        let id = Collineation::from_transvections(&sp, &[]);
        assert_eq!(id, Collineation::identity(&sp));
        let geo = Geometry::new(&space(2, 3));
        let h = Collineation::identity(geo.space()).to_point_map(&geo);
        assert_eq!(h, PointMap::identity(&geo));
    }

    #[test]
    fn transvections_preserve_the_form() {
        let sp = space(3, 3);
        let t = Collineation::transvection(&sp, &[1, 2, 0, 1, 0, 2], 2);
        assert!(t.preserves_form(&sp));
        for seed in 0..20 {
            assert!(random_collineation(&sp, seed).preserves_form(&sp));
            assert!(recognize(&sp, random_base(&sp, seed).points()).is_ok());
        }
    }

    #[test]
    fn random_collineation_is_deterministic() {
        let sp = space(3, 2);
        assert_eq!(random_collineation(&sp, 42), random_collineation(&sp, 42));
        assert_ne!(random_collineation(&sp, 42), random_collineation(&sp, 43));
    }

    #[test]
    fn base_json_round_trip() {
        let sp = space(3, 3);
        let b = random_base(&sp, 3);
        let j = b.to_json(&sp);
        let (sp2, b2) = SymplecticBase::from_json(&j).unwrap();
        assert_eq!(sp2, sp);
        assert_eq!(b2, b);
        let mut bad = j.clone();
        bad.sigma.swap(0, 1);
        assert!(SymplecticBase::from_json(&bad).is_err());
    }

    #[test]
    fn enumeration_is_gated() {
        assert!(matches!(enumerate_all_bases(&space(3, 3)), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn enumerated_bases_are_valid_and_contain_the_standard_base_once() {
        let sp = space(2, 3);
        let all = enumerate_all_bases(&sp).unwrap();
        let std_key = SymplecticBase::standard(&sp).key();
        assert_eq!(all.iter().filter(|b| b.key() == std_key).count(), 1);
        for b in &all {
            assert!(recognize(&sp, b.points()).is_ok());
        }
    }

    #[test]
    fn relabel_keeps_the_key() {
        let sp = space(3, 2);
        let b = random_base(&sp, 11);
        let r = b.relabel(&[3, 1, 2, 0, 4, 5]);
        assert_eq!(r.key(), b.key());
        assert_eq!(recognize(&sp, r.points()).unwrap(), r.sigma());
    }
}

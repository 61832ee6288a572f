//! Base subsets of G_k and their combinatorics: selectors B(±i,…), the subspaces
//! S_i(R), the two families of maximal inexact subsets, complement subsets and the
//! counting statements built on them.
//!
//! Indices are zero-based throughout; σ is the pairing of the underlying base.

use std::collections::BTreeSet;
use std::fmt;

use crate::bases::{recognize, SymplecticBase};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::space::SymplecticSpace;

/// A subset of the members of one base subset, as a bit mask over member positions.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemberSet(u128);

impl MemberSet {
    pub const CAPACITY: usize = 128;

    pub fn empty() -> Self {
        MemberSet(0)
    }

    pub fn full(m: usize) -> Self {
        assert!(m <= Self::CAPACITY);
        if m == 128 {
            MemberSet(u128::MAX)
        } else {
            MemberSet((1u128 << m) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> Self {
        MemberSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        MemberSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        MemberSet(self.0 | 1 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: MemberSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: MemberSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: MemberSet) -> Self {
        MemberSet(self.0 | other.0)
    }

    pub fn intersection(self, other: MemberSet) -> Self {
        MemberSet(self.0 & other.0)
    }

    pub fn difference(self, other: MemberSet) -> Self {
        MemberSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            (bits != 0).then(|| {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                i
            })
        })
    }
}

impl fmt::Debug for MemberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// B(+i_1, …, +i_s, −j_1, …, −j_u).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Selector {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

impl Selector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn plus(mut self, i: usize) -> Self {
        self.plus.push(i);
        self
    }

    pub fn minus(mut self, j: usize) -> Self {
        self.minus.push(j);
        self
    }
}

/// One element of a base subset: the index set I (sorted) and the span of {p_i : i ∈ I}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub indices: Vec<usize>,
    pub subspace: Subspace,
}

impl Member {
    pub fn has(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// The two families of maximal inexact subsets: B(−i) and R_ij.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InexactKind {
    First { i: usize },
    Second { i: usize, j: usize },
}

impl InexactKind {
    pub fn type_number(self) -> u8 {
        match self {
            InexactKind::First { .. } => 1,
            InexactKind::Second { .. } => 2,
        }
    }
}

impl fmt::Display for InexactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InexactKind::First { i } => write!(f, "B(-{})", i + 1),
            InexactKind::Second { i, j } => write!(f, "R({},{})", i + 1, j + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classified {
    pub kind: InexactKind,
    pub members: MemberSet,
}

/// A complement subset with the label of the maximal inexact subset it complements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Complement {
    pub kind: InexactKind,
    pub members: MemberSet,
}

/// Counts of family entries disjoint from a complement subset: once per label
/// (i for the first type, (i, j) for the second) and once per distinct member set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degree {
    pub labelled: usize,
    pub distinct: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdjacencyCount {
    /// Base points common to both members, i.e. pdim(S ∩ U) + 1.
    pub common_points: usize,
    pub distinct: usize,
    pub labelled: usize,
}

/// All pdim-k totally isotropic subspaces spanned by points of one symplectic base.
#[derive(Clone, Debug)]
pub struct BaseSubset {
    base: SymplecticBase,
    n: usize,
    k: usize,
    members: Vec<Member>,
}

/// 2^{k+1}·C(n, k+1).
pub fn base_subset_size(n: usize, k: usize) -> u128 {
    (1u128 << (k + 1)) * binomial(n, k + 1)
}

/// c₁(k) = |B(−i)| = |B| − 2^k·C(n−1, k).
pub fn first_type_size(n: usize, k: usize) -> u128 {
    base_subset_size(n, k) - (1u128 << k) * binomial(n - 1, k)
}

/// c₂(k) = |R_ij| = |B| − (2^{k+1}·C(n−1, k) − 3·2^{k−1}·C(n−2, k−1)), for k ≥ 1.
pub fn second_type_size(n: usize, k: usize) -> u128 {
    assert!(k >= 1 && n >= 2);
    let complement = (1u128 << (k + 1)) * binomial(n - 1, k) - 3 * (1u128 << (k - 1)) * binomial(n - 2, k - 1);
    base_subset_size(n, k) - complement
}

pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Admissible index sets of size k+1 (I ∩ σ(I) = ∅), in lexicographic order.
pub fn admissible_index_sets(sigma: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(sigma: &[usize], size: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == size {
            out.push(acc.clone());
            return;
        }
        for i in start..sigma.len() {
            if acc.contains(&sigma[i]) {
                continue;
            }
            acc.push(i);
            rec(sigma, size, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(sigma, k + 1, 0, &mut Vec::new(), &mut out);
    out
}

impl BaseSubset {
    pub fn generate(space: &SymplecticSpace, base: &SymplecticBase, k: usize) -> Result<Self> {
        let n = space.n();
        if k >= n {
            return Err(Error::out_of_range("k", k as i64, format!("0..={}", n - 1)));
        }
        if base.len() != space.dim() {
            return Err(Error::Arity {
                expected: space.dim(),
                found: base.len(),
            });
        }
        if base_subset_size(n, k) > MemberSet::CAPACITY as u128 {
            return Err(Error::out_of_range(
                "base subset size",
                base_subset_size(n, k) as i64,
                format!("at most {}", MemberSet::CAPACITY),
            ));
        }
        let members = admissible_index_sets(base.sigma(), k)
            .into_iter()
            .map(|indices| {
                let rows: Vec<&[u8]> = indices.iter().map(|&i| base.point(i)).collect();
                let subspace = Subspace::span(space.field(), space.dim(), &rows)?;
                Ok(Member { indices, subspace })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BaseSubset {
            base: base.clone(),
            n,
            k,
            members,
        })
    }

    pub fn base(&self) -> &SymplecticBase {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, pos: usize) -> &Member {
        &self.members[pos]
    }

    pub fn full(&self) -> MemberSet {
        MemberSet::full(self.members.len())
    }

    pub fn sigma(&self, i: usize) -> usize {
        self.base.partner(i)
    }

    pub fn position_of(&self, s: &Subspace) -> Option<usize> {
        self.members.iter().position(|m| &m.subspace == s)
    }

    pub fn subspaces(&self, r: MemberSet) -> Vec<&Subspace> {
        r.iter().map(|p| &self.members[p].subspace).collect()
    }

    fn mask(&self, pred: impl Fn(&Member) -> bool) -> MemberSet {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| pred(m))
            .fold(MemberSet::empty(), |acc, (p, _)| acc.with(p))
    }

    /// Members containing every p_i, i ∈ plus, and no p_j, j ∈ minus.
    pub fn select(&self, sel: &Selector) -> MemberSet {
        self.mask(|m| sel.plus.iter().all(|&i| m.has(i)) && sel.minus.iter().all(|&j| !m.has(j)))
    }

    pub fn plus(&self, i: usize) -> MemberSet {
        self.select(&Selector::new().plus(i))
    }

    pub fn minus(&self, i: usize) -> MemberSet {
        self.select(&Selector::new().minus(i))
    }

    /// B(S): members contained in S.
    pub fn members_in(&self, s: &Subspace) -> MemberSet {
        self.mask(|m| s.contains(&m.subspace).unwrap_or(false))
    }

    /// S_i(R): intersection of the members of R containing p_i; empty if there are none.
    pub fn s_of(&self, r: MemberSet, i: usize) -> Subspace {
        let mut acc: Option<Subspace> = None;
        for p in r.iter() {
            let m = &self.members[p];
            if m.has(i) {
                acc = Some(match acc {
                    None => m.subspace.clone(),
                    Some(a) => a.intersect(&m.subspace).expect("same ambient space"),
                });
            }
        }
        acc.unwrap_or_else(|| {
            let s = &self.members[0].subspace;
            Subspace::empty(s.field(), s.ambient())
        })
    }

    fn point_subspace(&self, i: usize) -> Subspace {
        let s = &self.members[0].subspace;
        Subspace::point(s.field(), self.base.point(i)).expect("base points are nonzero")
    }

    /// S_i(R) = p_i for every i: the sufficient condition for exactness.
    pub fn all_points_isolated(&self, r: MemberSet) -> bool {
        (0..2 * self.n).all(|i| self.s_of(r, i) == self.point_subspace(i))
    }

    /// Some (i, j) with j ∉ {i, σ(i)}, p_j ∈ S_i(R) and p_σ(i) ∈ S_σ(j)(R).
    pub fn lemma1_condition(&self, r: MemberSet) -> Option<(usize, usize)> {
        let m = 2 * self.n;
        let s: Vec<Subspace> = (0..m).map(|i| self.s_of(r, i)).collect();
        (0..m).find_map(|i| {
            (0..m)
                .filter(|&j| j != i && j != self.sigma(i))
                .find(|&j| {
                    s[i].contains_vector(self.base.point(j)).unwrap_or(false)
                        && s[self.sigma(j)]
                            .contains_vector(self.base.point(self.sigma(i)))
                            .unwrap_or(false)
                })
                .map(|j| (i, j))
        })
    }

    /// B(−i).
    pub fn type1(&self, i: usize) -> MemberSet {
        self.minus(i)
    }

    /// R_ij = B(+i,+j) ∪ B(+σ(i),+σ(j)) ∪ B(−i,−σ(j)).
    pub fn type2(&self, i: usize, j: usize) -> Result<MemberSet> {
        self.check_pair(i, j)?;
        let (si, sj) = (self.sigma(i), self.sigma(j));
        Ok(self
            .select(&Selector::new().plus(i).plus(j))
            .union(self.select(&Selector::new().plus(si).plus(sj)))
            .union(self.select(&Selector::new().minus(i).minus(sj))))
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let m = 2 * self.n;
        if i >= m || j >= m {
            return Err(Error::out_of_range("index", i.max(j) as i64, format!("0..{m}")));
        }
        if j == i || j == self.sigma(i) {
            return Err(Error::out_of_range("j", j as i64, "j ∉ {i, σ(i)}"));
        }
        Ok(())
    }

    /// All admissible second-type labels (i, j), in lexicographic order.
    pub fn pair_labels(&self) -> Vec<(usize, usize)> {
        let m = 2 * self.n;
        (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|&(i, j)| j != i && j != self.sigma(i))
            .collect()
    }

    /// {B(−i)} (only for k < n−1) ∪ {R_ij}, deduplicated by member set; each set keeps
    /// its lexicographically smallest label, first-type labels before second-type ones.
    pub fn classify_maximal_inexact(&self) -> Vec<Classified> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        if self.k + 1 < self.n {
            for i in 0..2 * self.n {
                let members = self.type1(i);
                if seen.insert(members) {
                    out.push(Classified {
                        kind: InexactKind::First { i },
                        members,
                    });
                }
            }
        }
        for (i, j) in self.pair_labels() {
            let members = self.type2(i, j).expect("admissible label");
            if seen.insert(members) {
                out.push(Classified {
                    kind: InexactKind::Second { i, j },
                    members,
                });
            }
        }
        out
    }

    /// Number of distinct (i, j) labels collapsing onto each stored R_ij.
    pub fn second_type_label_count(&self) -> usize {
        self.pair_labels().len()
    }

    /// Every labelled complement subset: B(+i) (k < n−1) and
    /// B(+i,−j) ∪ B(+σ(j),−σ(i)) for each admissible (i, j). Not deduplicated.
    pub fn complement_family(&self) -> Vec<Complement> {
        let mut out = Vec::new();
        if self.k + 1 < self.n {
            for i in 0..2 * self.n {
                out.push(Complement {
                    kind: InexactKind::First { i },
                    members: self.plus(i),
                });
            }
        }
        for (i, j) in self.pair_labels() {
            out.push(Complement {
                kind: InexactKind::Second { i, j },
                members: self.second_complement(i, j),
            });
        }
        out
    }

    /// B(+i,−j) ∪ B(+σ(j),−σ(i)).
    pub fn second_complement(&self, i: usize, j: usize) -> MemberSet {
        let (si, sj) = (self.sigma(i), self.sigma(j));
        self.select(&Selector::new().plus(i).minus(j))
            .union(self.select(&Selector::new().plus(sj).minus(si)))
    }

    /// For k = n−1: complement subsets containing both members at positions `s` and `u`.
    pub fn adjacency_count(&self, s: usize, u: usize) -> Result<AdjacencyCount> {
        if self.k + 1 != self.n {
            return Err(Error::out_of_range("k", self.k as i64, format!("k = n−1 = {}", self.n - 1)));
        }
        if s == u {
            return Err(Error::Degenerate("adjacency count needs two distinct members".into()));
        }
        let both = MemberSet::singleton(s).with(u);
        let containing: Vec<MemberSet> = self
            .complement_family()
            .into_iter()
            .map(|c| c.members)
            .filter(|c| both.is_subset(*c))
            .collect();
        let distinct = containing.iter().collect::<BTreeSet<_>>().len();
        let common_points = self.members[s]
            .indices
            .iter()
            .filter(|i| self.members[u].has(**i))
            .count();
        Ok(AdjacencyCount {
            common_points,
            distinct,
            labelled: containing.len(),
        })
    }
}

/// Entries of `family` disjoint from `c`.
pub fn disjointness_degree(family: &[Complement], c: MemberSet) -> Degree {
    let disjoint: Vec<MemberSet> = family
        .iter()
        .map(|x| x.members)
        .filter(|m| m.is_disjoint(c))
        .collect();
    Degree {
        labelled: disjoint.len(),
        distinct: disjoint.iter().collect::<BTreeSet<_>>().len(),
    }
}

/// Recovers the symplectic base whose base subset of G_k is exactly `members`, if any.
///
/// A base point is characterised as a point x of some member for which the
/// intersection of all members through x is x itself.
pub fn identify_base_subset(space: &SymplecticSpace, k: usize, members: &[Subspace]) -> Option<SymplecticBase> {
    let mut candidates: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    for s in members {
        for x in s.points() {
            if !seen.insert(x.clone()) {
                continue;
            }
            let through = members.iter().filter(|t| t.contains_vector(&x).unwrap_or(false));
            let meet = through
                .cloned()
                .reduce(|a, b| a.intersect(&b).expect("same space"))
                .expect("x lies in s");
            if meet.vdim() == 1 {
                candidates.insert(x);
            }
        }
    }
    let points: Vec<Vec<u8>> = candidates.into_iter().collect();
    recognize(space, &points).ok()?;
    let base = SymplecticBase::new(space, points).ok()?;
    let bs = BaseSubset::generate(space, &base, k).ok()?;
    let mut want: Vec<&Subspace> = members.iter().collect();
    let mut have: Vec<&Subspace> = bs.members.iter().map(|m| &m.subspace).collect();
    want.sort();
    want.dedup();
    have.sort();
    (want.len() == members.len() && want == have).then_some(base)
}

/// A symplectic base whose base subset of G_k contains both S and U.
///
/// Splits S and U into W = S∩U, the radicals S∩U^⊥ and U∩S^⊥, and dual
/// complements paired by Ω; the resulting isotropic vectors are then completed to
/// hyperbolic pairs inside the perp of the already-paired part.
pub fn common_base_subset(space: &SymplecticSpace, s: &Subspace, u: &Subspace) -> Result<SymplecticBase> {
    for x in [s, u] {
        if !space.is_totally_isotropic(x)? {
            return Err(Error::NotIsotropic);
        }
    }
    if s.vdim() != u.vdim() || s.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: s.vdim(),
            found: u.vdim(),
        });
    }
    let f = space.field();
    let dim = space.dim();
    let w = s.intersect(u)?;
    let s0 = s.intersect(&space.perp(u)?)?;
    let u0 = u.intersect(&space.perp(s)?)?;
    let mut s1 = extend_basis(&s0, s);
    let mut u1 = extend_basis(&u0, u);
    if s1.len() != u1.len() {
        return Err(Error::Defect("radical complements have different dimensions".into()));
    }

    // Dualize S1 against U1: Ω(s_a, u_b) = δ_ab.
    let mut hyperbolic: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    while !s1.is_empty() {
        let sv = s1.remove(0);
        let pos = u1
            .iter()
            .position(|y| space.form(&sv, y) != 0)
            .ok_or_else(|| Error::Defect("pairing between S and U is degenerate".into()))?;
        let uv = u1.remove(pos);
        let scale = f.inv(space.form(&sv, &uv));
        let uv: Vec<u8> = uv.iter().map(|&x| f.mul(x, scale)).collect();
        for x in s1.iter_mut() {
            let t = f.neg(space.form(x, &uv));
            *x = crate::linalg::axpy(f, x, t, &sv);
        }
        for y in u1.iter_mut() {
            let t = f.neg(space.form(&sv, y));
            *y = crate::linalg::axpy(f, y, t, &uv);
        }
        hyperbolic.push((sv, uv));
    }

    let mut isotropic: Vec<Vec<u8>> = w.rows().map(<[u8]>::to_vec).collect();
    isotropic.extend(extend_basis(&w, &s0));
    isotropic.extend(extend_basis(&w, &u0));

    let paired: Vec<Vec<u8>> = hyperbolic
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    let mut ambient = space.perp(&Subspace::span(f, dim, &paired)?)?;
    while let Some(t) = isotropic.pop() {
        let t_sub = Subspace::point(f, &t)?;
        let rest = Subspace::span(f, dim, &isotropic)?;
        let room = ambient.intersect(&space.perp(&rest)?)?;
        let y = room
            .rows()
            .find(|y| space.form(&t, y) != 0)
            .map(<[u8]>::to_vec)
            .ok_or_else(|| Error::Defect("no hyperbolic partner for an isotropic vector".into()))?;
        let pair = t_sub.extend(&y)?;
        ambient = ambient.intersect(&space.perp(&pair)?)?;
        hyperbolic.push((t, y));
    }
    while !ambient.is_empty() {
        let t = ambient.row(0).to_vec();
        let y = ambient
            .rows()
            .find(|y| space.form(&t, y) != 0)
            .map(<[u8]>::to_vec)
            .ok_or_else(|| Error::Defect("perp of the paired part is degenerate".into()))?;
        let pair = Subspace::span(f, dim, &[t.clone(), y.clone()])?;
        ambient = ambient.intersect(&space.perp(&pair)?)?;
        hyperbolic.push((t, y));
    }

    let points: Vec<Vec<u8>> = hyperbolic
        .iter()
        .map(|(a, _)| a.clone())
        .chain(hyperbolic.iter().map(|(_, b)| b.clone()))
        .collect();
    let base = SymplecticBase::new(space, points)
        .map_err(|r| Error::Defect(format!("completion is not a symplectic base: {r}")))?;
    let k = s.vdim() - 1;
    let bs = BaseSubset::generate(space, &base, k)?;
    if bs.position_of(s).is_none() || bs.position_of(u).is_none() {
        return Err(Error::Defect("completed base does not span both subspaces".into()));
    }
    Ok(base)
}

/// Vectors from `sup`'s basis completing a basis of `sub` to one of `sup`.
fn extend_basis(sub: &Subspace, sup: &Subspace) -> Vec<Vec<u8>> {
    let mut acc = sub.clone();
    let mut out = Vec::new();
    for r in sup.rows() {
        if !acc.contains_vector(r).expect("same ambient") {
            acc = acc.extend(r).expect("same ambient");
            out.push(r.to_vec());
        }
    }
    out
}

//! Brute-force exactness oracle: every symplectic base of a small space, its base
//! subsets as sorted index lists into G_k, and the inexactness questions answered
//! by direct containment scans.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::base_subset::{BaseSubset, InexactKind, MemberSet};
use crate::bases::{enumerate_all_bases, SymplecticBase};
use crate::error::{Error, Result};
use crate::grassmannian::Geometry;
use crate::space::SymplecticSpace;

/// Witness lists stop after this many base subsets; exactness needs only one-vs-many.
pub const WITNESS_CAP: usize = 2;

/// All symplectic bases of one space together with their base subsets at every level.
pub struct BaseCatalog {
    space: SymplecticSpace,
    bases: Vec<SymplecticBase>,
    subsets: Vec<Vec<Vec<u32>>>,
}

/// Positions of the members of `bs` in G_k.
pub fn member_indices(geo: &Geometry, bs: &BaseSubset) -> Vec<u32> {
    let g = geo.level(bs.k());
    bs.members()
        .iter()
        .map(|m| g.index_of(&m.subspace).expect("members are totally isotropic") as u32)
        .collect()
}

impl BaseCatalog {
    pub fn build(geo: &Geometry) -> Result<Self> {
        let space = geo.space().clone();
        let bases = enumerate_all_bases(&space)?;
        let subsets = (0..space.n())
            .map(|k| {
                bases
                    .par_iter()
                    .map(|b| {
                        let bs = BaseSubset::generate(&space, b, k).expect("k in range");
                        let mut idx = member_indices(geo, &bs);
                        idx.sort_unstable();
                        idx
                    })
                    .collect()
            })
            .collect();
        Ok(BaseCatalog { space, bases, subsets })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[SymplecticBase] {
        &self.bases
    }

    /// Sorted G_k indices of the base subset of base `b`.
    pub fn subset(&self, k: usize, b: usize) -> &[u32] {
        &self.subsets[k][b]
    }

    /// Bases whose base subset at level k contains all of `targets`, at most `cap` of them.
    pub fn containing(&self, k: usize, targets: &[u32], cap: usize) -> Vec<usize> {
        let hits: Vec<usize> = self.subsets[k]
            .par_iter()
            .enumerate()
            .filter(|(_, s)| targets.iter().all(|t| s.binary_search(t).is_ok()))
            .map(|(b, _)| b)
            .collect();
        hits.into_iter().take(cap).collect()
    }

    /// Distinct base subsets at level k.
    pub fn distinct_subsets(&self, k: usize) -> usize {
        self.subsets[k].iter().collect::<BTreeSet<_>>().len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InexactReport {
    pub subset: MemberSet,
    pub exact: bool,
    /// Catalog indices of base subsets containing the subset, capped at [`WITNESS_CAP`].
    pub witnesses: Vec<usize>,
    /// Set when the subset is one of the two formula families of maximal inexact subsets.
    pub kind: Option<InexactKind>,
}

/// Decides exactness of `r ⊆ bs` by scanning every base subset of the catalog.
pub fn is_exact_oracle(catalog: &BaseCatalog, geo: &Geometry, bs: &BaseSubset, r: MemberSet) -> Result<InexactReport> {
    if catalog.space() != geo.space() {
        return Err(Error::SpaceMismatch("catalog and geometry differ".into()));
    }
    let idx = member_indices(geo, bs);
    let targets: Vec<u32> = r.iter().map(|p| idx[p]).collect();
    let witnesses = catalog.containing(bs.k(), &targets, WITNESS_CAP);
    let kind = bs
        .classify_maximal_inexact()
        .into_iter()
        .find(|c| c.members == r)
        .map(|c| c.kind);
    Ok(InexactReport {
        subset: r,
        exact: witnesses.len() == 1,
        witnesses,
        kind,
    })
}

/// Exactness for subsets of one fixed base subset, precomputed as the family of its
/// intersections with every other base subset: R is inexact iff it lies inside one.
#[derive(Clone, Debug)]
pub struct LocalOracle {
    size: usize,
    overlaps: Vec<MemberSet>,
}

impl LocalOracle {
    pub fn new(catalog: &BaseCatalog, geo: &Geometry, bs: &BaseSubset) -> Result<Self> {
        if bs.len() > MemberSet::CAPACITY {
            return Err(Error::out_of_range("base subset size", bs.len() as i64, "at most 128"));
        }
        let idx = member_indices(geo, bs);
        let full = bs.full();
        let masks: BTreeSet<MemberSet> = (0..catalog.len())
            .into_par_iter()
            .map(|b| {
                let other = catalog.subset(bs.k(), b);
                idx.iter()
                    .enumerate()
                    .filter(|(_, t)| other.binary_search(t).is_ok())
                    .fold(MemberSet::empty(), |acc, (p, _)| acc.with(p))
            })
            .filter(|m| *m != full)
            .collect();
        let all: Vec<MemberSet> = masks.into_iter().collect();
        let overlaps = all
            .iter()
            .copied()
            .filter(|m| !all.iter().any(|o| o != m && m.is_subset(*o)))
            .collect();
        Ok(LocalOracle { size: bs.len(), overlaps })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Inclusion-maximal intersections with other base subsets.
    pub fn overlaps(&self) -> &[MemberSet] {
        &self.overlaps
    }

    pub fn is_inexact(&self, r: MemberSet) -> bool {
        self.overlaps.iter().any(|o| r.is_subset(*o))
    }

    /// Every maximal inexact subset, by scanning all 2^m subsets.
    pub fn maximal_inexact(&self) -> Result<Vec<MemberSet>> {
        let m = self.size;
        if m > 24 {
            return Err(Error::out_of_range("subset scan size", m as i64, "at most 24 members"));
        }
        let mut out: Vec<MemberSet> = (0..1u128 << m)
            .into_par_iter()
            .map(MemberSet::from_bits)
            .filter(|&r| {
                self.is_inexact(r)
                    && (0..m)
                        .filter(|&u| !r.contains(u))
                        .all(|u| !self.is_inexact(r.with(u)))
            })
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Outcome of testing "S_i(R) = p_i for all i ⟹ R exact" over every subset R.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SufficiencyScan {
    pub subsets: usize,
    pub isolated: usize,
    /// Subsets meeting the condition that are nevertheless inexact.
    pub violations: Vec<MemberSet>,
    /// An exact subset violating the condition, if any: the converse fails.
    pub converse_witness: Option<MemberSet>,
}

pub fn sufficiency_scan(bs: &BaseSubset, oracle: &LocalOracle) -> SufficiencyScan {
    let m = bs.len();
    let rows: Vec<(MemberSet, bool, bool)> = (0..1u128 << m)
        .into_par_iter()
        .map(MemberSet::from_bits)
        .map(|r| (r, bs.all_points_isolated(r), oracle.is_inexact(r)))
        .collect();
    let mut scan = SufficiencyScan {
        subsets: rows.len(),
        ..Default::default()
    };
    for (r, isolated, inexact) in rows {
        if isolated {
            scan.isolated += 1;
            if inexact {
                scan.violations.push(r);
            }
        } else if !inexact && scan.converse_witness.is_none() {
            scan.converse_witness = Some(r);
        }
    }
    scan
}

/// Subsets carrying an inexactness certificate (i, j) that the oracle finds exact.
pub fn certificate_scan(bs: &BaseSubset, oracle: &LocalOracle) -> (usize, Vec<MemberSet>) {
    let m = bs.len();
    let flagged: Vec<(MemberSet, bool)> = (0..1u128 << m)
        .into_par_iter()
        .map(MemberSet::from_bits)
        .filter(|&r| bs.lemma1_condition(r).is_some())
        .map(|r| (r, oracle.is_inexact(r)))
        .collect();
    let bad = flagged.iter().filter(|(_, i)| !i).map(|(r, _)| *r).collect();
    (flagged.len(), bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(n: usize, p: u32, k: usize) -> (Geometry, BaseCatalog, BaseSubset) {
        let sp = SymplecticSpace::standard(n, p).unwrap();
        let geo = Geometry::new(&sp);
        let cat = BaseCatalog::build(&geo).unwrap();
        let bs = BaseSubset::generate(&sp, &SymplecticBase::standard(&sp), k).unwrap();
        (geo, cat, bs)
    }

    #[test]
    fn whole_base_subset_is_exact() {
        let (geo, cat, bs) = fixture(2, 2, 1);
        let rep = is_exact_oracle(&cat, &geo, &bs, bs.full()).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.witnesses.len(), 1);
        assert_eq!(cat.distinct_subsets(1), cat.len());
    }

    #[test]
    fn minus_i_is_inexact() {
        let (geo, cat, bs) = fixture(2, 3, 0);
        let rep = is_exact_oracle(&cat, &geo, &bs, bs.type1(0)).unwrap();
        assert!(!rep.exact);
        assert_eq!(rep.witnesses.len(), WITNESS_CAP);
    }

    #[test]
    fn local_oracle_agrees_with_catalog_scan() {
        let (geo, cat, bs) = fixture(2, 2, 1);
        let local = LocalOracle::new(&cat, &geo, &bs).unwrap();
        for bits in 0..1u128 << bs.len() {
            let r = MemberSet::from_bits(bits);
            let rep = is_exact_oracle(&cat, &geo, &bs, r).unwrap();
            assert_eq!(rep.exact, !local.is_inexact(r), "{r:?}");
        }
    }

    #[test]
    fn infeasible_catalog() {
        let sp = SymplecticSpace::standard(3, 3).unwrap();
        assert!(matches!(
            BaseCatalog::build(&Geometry::new(&sp)),
            Err(Error::Infeasible { .. })
        ));
    }
}

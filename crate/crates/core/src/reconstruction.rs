//! Maps between isotropic Grassmannians: the maps induced by point embeddings, the
//! checks a base-subset-preserving map must pass, and the descent recovering the
//! point embedding one level at a time.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base_subset::{identify_base_subset, BaseSubset, MemberSet};
use crate::bases::{random_base, PointMap, SymplecticBase};
use crate::error::{Error, Result};
use crate::grassmannian::Geometry;
use crate::linalg::Subspace;
use crate::oracle::{BaseCatalog, LocalOracle};
use crate::space::{SpaceHeader, SymplecticSpace};

/// Space header plus the level k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelHeader {
    #[serde(flatten)]
    pub space: SpaceHeader,
    pub k: usize,
}

/// `{"source":…, "target":…, "table":[[src, dst], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub source: LevelHeader,
    pub target: LevelHeader,
    pub table: Vec<[usize; 2]>,
}

/// A table G_k → G'_k over the canonical orderings of both Grassmannians.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannianMap {
    source: SymplecticSpace,
    target: SymplecticSpace,
    k: usize,
    table: Vec<usize>,
}

impl GrassmannianMap {
    pub fn new(source: &Geometry, target: &Geometry, k: usize, table: Vec<usize>) -> Result<Self> {
        let (s, t) = (source.space(), target.space());
        if (s.n(), s.p()) != (t.n(), t.p()) {
            return Err(Error::SpaceMismatch(format!("source {s} and target {t} must share n and p")));
        }
        if k >= s.n() {
            return Err(Error::out_of_range("k", k as i64, format!("0..={}", s.n() - 1)));
        }
        let (m, m2) = (source.level(k).len(), target.level(k).len());
        if table.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&d| d >= m2) {
            return Err(Error::out_of_range("target index", bad as i64, format!("0..{m2}")));
        }
        Ok(GrassmannianMap {
            source: s.clone(),
            target: t.clone(),
            k,
            table,
        })
    }

    pub fn identity(geo: &Geometry, k: usize) -> Result<Self> {
        Self::new(geo, geo, k, (0..geo.level(k).len()).collect())
    }

    pub fn source(&self) -> &SymplecticSpace {
        &self.source
    }

    pub fn target(&self) -> &SymplecticSpace {
        &self.target
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.table.len());
        self.table.iter().all(|d| seen.insert(*d))
    }

    pub fn is_bijective(&self, target: &Geometry) -> bool {
        self.is_injective() && self.table.len() == target.level(self.k).len()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GrassmannianMap) -> Result<GrassmannianMap> {
        if other.target != self.source || other.k != self.k {
            return Err(Error::SpaceMismatch("composition of incompatible maps".into()));
        }
        Ok(GrassmannianMap {
            source: other.source.clone(),
            target: self.target.clone(),
            k: self.k,
            table: other.table.iter().map(|&i| self.table[i]).collect(),
        })
    }

    /// A copy with the images of `a` and `b` exchanged.
    pub fn with_swapped(&self, a: usize, b: usize) -> GrassmannianMap {
        let mut out = self.clone();
        out.table.swap(a, b);
        out
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            source: LevelHeader {
                space: self.source.header(),
                k: self.k,
            },
            target: LevelHeader {
                space: self.target.header(),
                k: self.k,
            },
            table: self.table.iter().enumerate().map(|(s, &d)| [s, d]).collect(),
        }
    }

    pub fn from_json(j: &MapJson, source: &Geometry, target: &Geometry) -> Result<Self> {
        if j.source.space != source.space().header() || j.target.space != target.space().header() {
            return Err(Error::SpaceMismatch("map headers do not match the geometries".into()));
        }
        if j.source.k != j.target.k {
            return Err(Error::Malformed("source and target levels differ".into()));
        }
        let k = j.source.k;
        if k >= source.space().n() {
            return Err(Error::out_of_range("k", k as i64, format!("0..={}", source.space().n() - 1)));
        }
        let m = source.level(k).len();
        let mut table = vec![usize::MAX; m];
        for &[s, d] in &j.table {
            if s >= m {
                return Err(Error::out_of_range("source index", s as i64, format!("0..{m}")));
            }
            if table[s] != usize::MAX {
                return Err(Error::Malformed(format!("source index {s} listed twice")));
            }
            table[s] = d;
        }
        if table.contains(&usize::MAX) {
            return Err(Error::Malformed(format!("table covers {} of {m} elements", j.table.len())));
        }
        Self::new(source, target, k, table)
    }
}

/// One named check with an optional witness of failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: Option<Value>,
}

impl Check {
    pub fn ok(name: &str) -> Self {
        Check {
            name: name.into(),
            pass: true,
            witness: None,
        }
    }

    pub fn failed(name: &str, witness: Value) -> Self {
        Check {
            name: name.into(),
            pass: false,
            witness: Some(witness),
        }
    }

    fn from_witness(name: &str, witness: Option<Value>) -> Self {
        match witness {
            None => Check::ok(name),
            Some(w) => Check::failed(name, w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub levels: Vec<LevelRecord>,
    pub pass: bool,
}

impl Certificate {
    fn push(&mut self, level: usize, checks: Vec<Check>) -> bool {
        let pass = checks.iter().all(|c| c.pass);
        self.levels.push(LevelRecord { level, checks, pass });
        pass
    }

    /// The first failing check with its level.
    pub fn first_failure(&self) -> Option<(usize, &Check)> {
        self.levels
            .iter()
            .find_map(|l| l.checks.iter().find(|c| !c.pass).map(|c| (l.level, c)))
    }
}

/// The standard base followed by `count − 1` seeded random bases.
pub fn sample_bases(space: &SymplecticSpace, count: usize, seed: u64) -> Vec<SymplecticBase> {
    std::iter::once(SymplecticBase::standard(space))
        .chain((1..count as u64).map(|i| random_base(space, seed.wrapping_add(i))))
        .take(count)
        .collect()
}

fn subspace_json(s: &Subspace) -> Value {
    serde_json::to_value(s.to_json()).expect("serializable")
}

/// Symplectic-embedding check for a point map: injective, orthogonality preserved in
/// both directions on all point pairs, and the sampled bases sent to symplectic bases.
pub fn embedding_violation(h: &PointMap, source: &Geometry, target: &Geometry, bases: &[SymplecticBase]) -> Option<String> {
    if !h.is_injective() {
        return Some("the point map is not injective".into());
    }
    if let Some((a, b)) = h.orthogonality_violation(source, target) {
        let (x, y) = (source.points().get(a).row(0), source.points().get(b).row(0));
        return Some(format!("orthogonality of {x:?} and {y:?} is not preserved"));
    }
    bases.iter().find_map(|b| {
        h.map_base(source, target, b)
            .err()
            .map(|r| format!("image of base {:?} rejected: {r}", b.points()))
    })
}

/// (h)_k: S ↦ span of h(S).
pub fn induce(h: &PointMap, source: &Geometry, target: &Geometry, k: usize) -> Result<GrassmannianMap> {
    if h.source() != source.space() || h.target() != target.space() {
        return Err(Error::SpaceMismatch("point map and geometries differ".into()));
    }
    if k >= source.space().n() {
        return Err(Error::out_of_range("k", k as i64, format!("0..={}", source.space().n() - 1)));
    }
    let bases = sample_bases(source.space(), 8, 0);
    if let Some(w) = embedding_violation(h, source, target, &bases) {
        return Err(Error::NotEmbedding(w));
    }
    let tgt = target.level(k);
    let table = source
        .level(k)
        .elements()
        .par_iter()
        .map(|s| {
            let image = image_of(h, source, target, s)?;
            tgt.index_of(&image)
                .filter(|_| image.vdim() == k + 1)
                .ok_or_else(|| Error::NotEmbedding(format!("image of {s:?} is {image:?}, not in G_{k}")))
        })
        .collect::<Result<Vec<_>>>()?;
    GrassmannianMap::new(source, target, k, table)
}

fn image_of(h: &PointMap, source: &Geometry, target: &Geometry, s: &Subspace) -> Result<Subspace> {
    let rows: Vec<&[u8]> = source
        .point_indices(s)
        .into_iter()
        .map(|i| target.points().get(h.apply(i)).row(0))
        .collect();
    Subspace::span(target.space().field(), target.space().dim(), &rows)
}

fn image_members(f: &GrassmannianMap, source: &Geometry, target: &Geometry, bs: &BaseSubset) -> Vec<Subspace> {
    let (src, tgt) = (source.level(f.k), target.level(f.k));
    bs.members()
        .iter()
        .map(|m| tgt.get(f.apply(src.index_of(&m.subspace).expect("member of G_k"))).clone())
        .collect()
}

/// Result of checking base-subset preservation on a list of bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseVerdict {
    pub checked: usize,
    /// Positions in the checked list of bases whose base subset is not sent to a base subset.
    pub counterexamples: Vec<usize>,
}

impl BaseVerdict {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub fn preserves_base_subsets(f: &GrassmannianMap, source: &Geometry, target: &Geometry, bases: &[SymplecticBase]) -> BaseVerdict {
    let counterexamples = bases
        .par_iter()
        .enumerate()
        .filter(|(_, b)| {
            let bs = BaseSubset::generate(source.space(), b, f.k).expect("k in range");
            let image = image_members(f, source, target, &bs);
            identify_base_subset(target.space(), f.k, &image).is_none()
        })
        .map(|(i, _)| i)
        .collect();
    BaseVerdict {
        checked: bases.len(),
        counterexamples,
    }
}

/// Which pairs of G_k the adjacency-transfer scan covers.
#[derive(Clone, Copy, Debug)]
pub enum PairScope<'a> {
    All,
    WithinBaseSubsets(&'a [SymplecticBase]),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MainLemmaVerdict {
    pub pairs: usize,
    pub ortho_checked: bool,
    pub adjacency: Vec<(usize, usize)>,
    pub ortho: Vec<(usize, usize)>,
}

impl MainLemmaVerdict {
    pub fn pass(&self) -> bool {
        self.adjacency.is_empty() && self.ortho.is_empty()
    }
}

/// Adjacency and (for k < n−1) ortho-adjacency preserved in both directions.
pub fn check_main_lemma(f: &GrassmannianMap, source: &Geometry, target: &Geometry, scope: PairScope) -> MainLemmaVerdict {
    let k = f.k;
    let pairs: Vec<(usize, usize)> = match scope {
        PairScope::All => {
            let m = source.level(k).len();
            (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect()
        }
        PairScope::WithinBaseSubsets(bases) => {
            let mut set = BTreeSet::new();
            for b in bases {
                let bs = BaseSubset::generate(source.space(), b, k).expect("k in range");
                let idx = crate::oracle::member_indices(source, &bs);
                for (x, &a) in idx.iter().enumerate() {
                    for &c in &idx[x + 1..] {
                        set.insert((a.min(c) as usize, a.max(c) as usize));
                    }
                }
            }
            set.into_iter().collect()
        }
    };
    let ortho_checked = k + 1 < source.space().n();
    let flagged: Vec<(usize, usize, bool, bool)> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let (fa, fb) = (f.apply(a), f.apply(b));
            let adj = source.adjacent_idx(k, a, b) != target.adjacent_idx(k, fa, fb);
            let ortho = ortho_checked && source.ortho_adjacent_idx(k, a, b) != target.ortho_adjacent_idx(k, fa, fb);
            (adj || ortho).then_some((a, b, adj, ortho))
        })
        .collect();
    MainLemmaVerdict {
        pairs: pairs.len(),
        ortho_checked,
        adjacency: flagged.iter().filter(|x| x.2).map(|x| (x.0, x.1)).collect(),
        ortho: flagged.iter().filter(|x| x.3).map(|x| (x.0, x.1)).collect(),
    }
}

fn members_json(r: MemberSet) -> Value {
    json!(r.iter().collect::<Vec<_>>())
}

/// For the restriction of f to one base subset B → B': inexactness, maximality and
/// type of maximal inexact subsets are preserved both ways, and (k < n−1) the
/// hyperplanes spanned by base points induce a bijection on the (k+1)-subspaces
/// spanned by base points with f(B(N)) = B'(g(N)).
pub fn transported_inexactness_check(
    f: &GrassmannianMap,
    source: &Geometry,
    target: &Geometry,
    source_catalog: &BaseCatalog,
    target_catalog: &BaseCatalog,
    base: &SymplecticBase,
) -> Result<Vec<Check>> {
    let k = f.k;
    let (sp, tp) = (source.space(), target.space());
    let bs = BaseSubset::generate(sp, base, k)?;
    let image = image_members(f, source, target, &bs);
    let Some(base2) = identify_base_subset(tp, k, &image) else {
        let w = json!({ "base": base.to_json(sp) });
        return Ok(vec![Check::failed("image-is-base-subset", w)]);
    };
    let bs2 = BaseSubset::generate(tp, &base2, k)?;
    let pi: Vec<usize> = image
        .iter()
        .map(|s| bs2.position_of(s).expect("identified base subset"))
        .collect();
    let push = |r: MemberSet| r.iter().fold(MemberSet::empty(), |acc, p| acc.with(pi[p]));
    let mut checks = vec![Check::ok("image-is-base-subset")];

    let lo = LocalOracle::new(source_catalog, source, &bs)?;
    let lo2 = LocalOracle::new(target_catalog, target, &bs2)?;
    let broken = (0..1u128 << bs.len())
        .into_par_iter()
        .map(MemberSet::from_bits)
        .find_first(|&r| lo.is_inexact(r) != lo2.is_inexact(push(r)));
    checks.push(Check::from_witness("inexactness-transported", broken.map(members_json)));

    let max: Vec<MemberSet> = lo.maximal_inexact()?;
    let max2: BTreeSet<MemberSet> = lo2.maximal_inexact()?.into_iter().collect();
    let pushed: BTreeSet<MemberSet> = max.iter().map(|&r| push(r)).collect();
    let missing = pushed.symmetric_difference(&max2).next().copied();
    checks.push(Check::from_witness("maximality-transported", missing.map(members_json)));

    let kind_of = |b: &BaseSubset, r: MemberSet| {
        b.classify_maximal_inexact()
            .into_iter()
            .find(|c| c.members == r)
            .map(|c| c.kind.type_number())
    };
    let mistyped = max.iter().find(|&&r| {
        let full = bs.full();
        kind_of(&bs, r) != kind_of(&bs2, push(r)) || push(full.difference(r)) != bs2.full().difference(push(r))
    });
    checks.push(Check::from_witness("types-transported", mistyped.map(|&r| members_json(r))));

    if k + 1 < sp.n() {
        checks.extend(span_bijection_checks(&bs, &bs2, &push));
    }
    Ok(checks)
}

fn span_bijection_checks(bs: &BaseSubset, bs2: &BaseSubset, push: &dyn Fn(MemberSet) -> MemberSet) -> Vec<Check> {
    let m = 2 * bs.n();
    let hyper: Vec<Option<usize>> = (0..m)
        .map(|i| (0..m).find(|&j| bs2.type1(j) == push(bs.type1(i))))
        .collect();
    let distinct: BTreeSet<usize> = hyper.iter().flatten().copied().collect();
    if hyper.contains(&None) || distinct.len() != m {
        let w = json!(hyper);
        return vec![Check::failed("hyperplane-bijection", w)];
    }
    let hyper: Vec<usize> = hyper.into_iter().flatten().collect();
    let point_span = |b: &BaseSubset, idx: &[usize]| {
        let rows: Vec<&[u8]> = idx.iter().map(|&i| b.base().point(i)).collect();
        let s = &b.member(0).subspace;
        Subspace::span(s.field(), s.ambient(), &rows).expect("same space")
    };
    let size = bs.k() + 2;
    let mut images = BTreeSet::new();
    let mut failure = None;
    for set in index_subsets(m, size) {
        let n_sub = point_span(bs, &set);
        let g = (0..m)
            .filter(|j| !set.contains(j))
            .map(|j| {
                let others: Vec<usize> = (0..m).filter(|&x| x != hyper[j]).collect();
                point_span(bs2, &others)
            })
            .reduce(|a, b| a.intersect(&b).expect("same space"))
            .expect("at least one hyperplane");
        images.insert(g.clone());
        if g.vdim() != size || push(bs.members_in(&n_sub)) != bs2.members_in(&g) {
            failure.get_or_insert_with(|| json!({ "indices": set, "image": subspace_json(&g) }));
        }
    }
    let mut checks = vec![Check::ok("hyperplane-bijection")];
    checks.push(Check::from_witness("span-correspondence", failure));
    let total = index_subsets(m, size).len();
    checks.push(if images.len() == total {
        Check::ok("span-bijection")
    } else {
        Check::failed("span-bijection", json!({ "images": images.len(), "expected": total }))
    });
    checks
}

fn index_subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m)
        .filter(|b| b.count_ones() as usize == size)
        .map(|b| (0..m).filter(|i| b >> i & 1 == 1).collect())
        .collect()
}

/// One descent step: the level-(k−1) map g with the checks certifying it.
#[derive(Clone, Debug)]
pub struct Descent {
    pub map: Option<GrassmannianMap>,
    pub checks: Vec<Check>,
}

/// g(M) := ⋂ f(star(M)) for each M ∈ G_{k−1}, requiring pdim k−1, total isotropy
/// and f(star(M)) ⊆ star(g(M)).
pub fn descend(f: &GrassmannianMap, source: &Geometry, target: &Geometry) -> Result<Descent> {
    let k = f.k;
    if k == 0 {
        return Err(Error::out_of_range("k", 0, "k ≥ 1 for descent"));
    }
    let (tgt_k, tgt_low) = (target.level(k), target.level(k - 1));
    let tp = target.space();
    let stars = source.stars(k);
    enum Step {
        Ok(usize),
        Dimension(usize, isize),
        Isotropy(usize),
        Containment(usize, usize),
    }
    let steps: Vec<Step> = stars
        .par_iter()
        .enumerate()
        .map(|(m, star)| {
            let images: Vec<&Subspace> = star.iter().map(|&u| tgt_k.get(f.apply(u as usize))).collect();
            let g = images
                .iter()
                .skip(1)
                .fold(images[0].clone(), |acc, s| acc.intersect(s).expect("same space"));
            if g.vdim() != k {
                return Step::Dimension(m, g.pdim());
            }
            let Some(gi) = tgt_low.index_of(&g) else {
                return Step::Isotropy(m);
            };
            let perp = tp.perp(&g).expect("same space");
            match star.iter().find(|&&u| !perp.contains(tgt_k.get(f.apply(u as usize))).expect("same space")) {
                Some(&u) => Step::Containment(m, u as usize),
                None => Step::Ok(gi),
            }
        })
        .collect();
    let low = source.level(k - 1);
    let mut dim = None;
    let mut iso = None;
    let mut cont = None;
    let mut table = Vec::with_capacity(steps.len());
    for step in steps {
        match step {
            Step::Ok(gi) => table.push(gi),
            Step::Dimension(m, d) => {
                dim.get_or_insert_with(|| json!({ "subspace": subspace_json(low.get(m)), "intersection_pdim": d }));
            }
            Step::Isotropy(m) => {
                iso.get_or_insert_with(|| json!({ "subspace": subspace_json(low.get(m)) }));
            }
            Step::Containment(m, u) => {
                cont.get_or_insert_with(|| {
                    json!({ "subspace": subspace_json(low.get(m)), "star_element": subspace_json(source.level(k).get(u)) })
                });
            }
        }
    }
    let checks = vec![
        Check::from_witness("descent-dimension", dim),
        Check::from_witness("descent-isotropic", iso),
        Check::from_witness("star-containment", cont),
    ];
    let map = if checks.iter().all(|c| c.pass) {
        Some(GrassmannianMap::new(source, target, k - 1, table)?)
    } else {
        None
    };
    Ok(Descent { map, checks })
}

/// f(S) = span(g(M) ∪ g(N)) for two distinct hyperplanes M, N of every S ∈ G_k.
fn composition_check(f: &GrassmannianMap, g: &GrassmannianMap, source: &Geometry, target: &Geometry) -> Check {
    let k = f.k;
    let (tk, tl) = (target.level(k), target.level(k - 1));
    let bad = source.faces(k).par_iter().enumerate().find_map_first(|(s, faces)| {
        let a = tl.get(g.apply(faces[0] as usize));
        let b = tl.get(g.apply(faces[1] as usize));
        let joined = a.join(b).expect("same space");
        (&joined != tk.get(f.apply(s))).then_some(s)
    });
    Check::from_witness("composition", bad.map(|s| json!({ "subspace": subspace_json(source.level(k).get(s)) })))
}

fn base_check(f: &GrassmannianMap, source: &Geometry, target: &Geometry, bases: &[SymplecticBase]) -> Check {
    let v = preserves_base_subsets(f, source, target, bases);
    Check::from_witness(
        "preserves-base-subsets",
        v.counterexamples
            .first()
            .map(|&i| serde_json::to_value(bases[i].to_json(source.space())).expect("serializable")),
    )
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub point_map: Option<PointMap>,
    pub certificate: Certificate,
}

/// Descends `f` to the point level, certifying every step, and checks that the
/// recovered point map is a symplectic embedding inducing `f`.
pub fn reconstruct(f: &GrassmannianMap, source: &Geometry, target: &Geometry, bases: &[SymplecticBase]) -> Result<Reconstruction> {
    if f.source() != source.space() || f.target() != target.space() {
        return Err(Error::SpaceMismatch("map and geometries differ".into()));
    }
    let mut cert = Certificate::default();
    let injective = if f.is_injective() {
        Check::ok("injective")
    } else {
        Check::failed("injective", json!({ "level": f.k }))
    };
    let fail = |cert: Certificate| Ok(Reconstruction { point_map: None, certificate: cert });
    if !cert.push(f.k, vec![injective, base_check(f, source, target, bases)]) {
        return fail(cert);
    }
    let mut cur = f.clone();
    while cur.k > 0 {
        let step = descend(&cur, source, target)?;
        let mut checks = step.checks;
        let Some(g) = step.map else {
            cert.push(cur.k - 1, checks);
            return fail(cert);
        };
        checks.push(composition_check(&cur, &g, source, target));
        checks.push(base_check(&g, source, target, bases));
        if !cert.push(g.k, checks) {
            return fail(cert);
        }
        cur = g;
    }
    let h = PointMap::new(source, target, cur.table)?;
    let mut checks = Vec::new();
    checks.push(Check::from_witness(
        "symplectic-embedding",
        embedding_violation(&h, source, target, bases).map(Value::String),
    ));
    let round_trip = match induce(&h, source, target, f.k) {
        Ok(again) if &again == f => Check::ok("round-trip"),
        Ok(again) => {
            let s = (0..f.table.len()).find(|&s| again.apply(s) != f.apply(s)).expect("tables differ");
            Check::failed("round-trip", json!({ "index": s }))
        }
        Err(e) => Check::failed("round-trip", Value::String(e.to_string())),
    };
    checks.push(round_trip);
    if f.is_bijective(target) {
        checks.push(Check::from_witness(
            "collineation",
            (!h.is_bijective(target)).then(|| Value::String("surjective map with non-bijective point map".into())),
        ));
    }
    let ok = cert.push(0, checks);
    cert.pass = ok;
    Ok(Reconstruction {
        point_map: ok.then_some(h),
        certificate: cert,
    })
}

/// Exchanges the images of the first element of G_k and the first element not
/// adjacent to it (k ≥ 1). Returns the corrupted map and the swapped pair.
pub fn corrupt(f: &GrassmannianMap, source: &Geometry) -> Option<(GrassmannianMap, (usize, usize))> {
    let k = f.k;
    if k == 0 {
        return None;
    }
    let m = source.level(k).len();
    let a = 0;
    let b = (1..m).find(|&b| !source.adjacent_idx(k, a, b))?;
    Some((f.with_swapped(a, b), (a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::random_collineation;

    #[test]
    fn identity_induces_identity() {
        let sp = SymplecticSpace::standard(2, 2).unwrap();
        let geo = Geometry::new(&sp);
        let h = PointMap::identity(&geo);
        for k in 0..2 {
            assert_eq!(induce(&h, &geo, &geo, k).unwrap(), GrassmannianMap::identity(&geo, k).unwrap());
        }
    }

    #[test]
    fn descent_inverts_induction() {
        let sp = SymplecticSpace::standard(3, 2).unwrap();
        let geo = Geometry::new(&sp);
        let h = random_collineation(&sp, 3).to_point_map(&geo);
        let f2 = induce(&h, &geo, &geo, 2).unwrap();
        let g = descend(&f2, &geo, &geo).unwrap();
        assert_eq!(g.map.unwrap(), induce(&h, &geo, &geo, 1).unwrap());
        let rec = reconstruct(&f2, &geo, &geo, &sample_bases(&sp, 4, 1)).unwrap();
        assert!(rec.certificate.pass, "{:?}", rec.certificate.first_failure());
        assert_eq!(rec.point_map.unwrap(), h);
    }

    #[test]
    fn corrupted_map_is_caught() {
        let sp = SymplecticSpace::standard(2, 2).unwrap();
        let geo = Geometry::new(&sp);
        let f = GrassmannianMap::identity(&geo, 1).unwrap();
        let (bad, _) = corrupt(&f, &geo).unwrap();
        let rec = reconstruct(&bad, &geo, &geo, &sample_bases(&sp, 4, 0)).unwrap();
        assert!(!rec.certificate.pass);
        assert!(rec.certificate.first_failure().unwrap().1.witness.is_some());
    }

    #[test]
    fn map_json_roundtrip_and_rejections() {
        let sp = SymplecticSpace::standard(2, 3).unwrap();
        let geo = Geometry::new(&sp);
        let f = induce(&random_collineation(&sp, 9).to_point_map(&geo), &geo, &geo, 1).unwrap();
        let j = f.to_json();
        assert_eq!(GrassmannianMap::from_json(&j, &geo, &geo).unwrap(), f);
        let mut short = j.clone();
        short.table.pop();
        assert!(GrassmannianMap::from_json(&short, &geo, &geo).is_err());
        let other = Geometry::new(&SymplecticSpace::standard(2, 2).unwrap());
        assert!(matches!(
            GrassmannianMap::new(&geo, &other, 1, (0..40).map(|i| i % 15).collect()),
            Err(Error::SpaceMismatch(_))
        ));
    }
}

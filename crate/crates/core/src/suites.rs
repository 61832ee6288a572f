//! Verification suites run by the `verify` command and their JSON/CSV reports.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base_subset::{
    base_subset_size, binomial, common_base_subset, disjointness_degree, first_type_size, second_type_size, BaseSubset,
    MemberSet, Selector,
};
use crate::bases::{enumerate_all_bases, enumeration_feasible, random_base, random_collineation, PointMap, SymplecticBase};
use crate::error::{Error, Result};
use crate::grassmannian::{maximal_a_subsets_bruteforce, Geometry};
use crate::linalg::Subspace;
use crate::oracle::{certificate_scan, sufficiency_scan, BaseCatalog, LocalOracle};
use crate::reconstruction::{
    check_main_lemma, corrupt, induce, preserves_base_subsets, reconstruct, sample_bases, transported_inexactness_check,
    GrassmannianMap, PairScope,
};
use crate::space::{SpaceHeader, SymplecticSpace};

/// The (n, p) grid accepted by the command line.
pub const GRID_N: [usize; 2] = [2, 3];
pub const GRID_P: [u32; 3] = [2, 3, 5];

pub fn in_grid(n: usize, p: u32) -> bool {
    GRID_N.contains(&n) && GRID_P.contains(&p)
}

macro_rules! suites {
    ($($variant:ident => $name:literal, $anchor:literal;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Suite { $($variant,)* All }

        impl Suite {
            pub const EACH: &'static [Suite] = &[$(Suite::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(Suite::$variant => $name,)* Suite::All => "all" }
            }

            pub fn anchor(self) -> &'static str {
                match self { $(Suite::$variant => $anchor,)* Suite::All => "every suite" }
            }
        }
    };
}

suites! {
    BaseSubsetSize => "base-subset-size", "a base subset of G_k has 2^{k+1}·C(n,k+1) members";
    CommonBaseSubset => "common-base-subset", "any two elements of G_k lie in a common base subset";
    InexactnessCertificate => "inexactness-certificate", "p_j ∈ S_i(R) and p_σ(i) ∈ S_σ(j)(R) for some j ∉ {i,σ(i)} forces R inexact";
    FirstType => "first-type", "B(−i) is inexact, and maximal exactly when k < n−1";
    SecondType => "second-type", "R_ij = B(+i,+j) ∪ B(+σi,+σj) ∪ B(−i,−σj) is maximal inexact";
    Classification => "classification", "maximal inexact subsets are the B(−i) (k < n−1) and the R_ij";
    ExactnessSufficiency => "exactness-sufficiency", "S_i(R) = p_i for every i implies R exact, not conversely";
    Trichotomy => "trichotomy", "c1(k) < c2(k), c1(k) = c2(k) and c1(k) > c2(k) all occur";
    ComplementCounts => "complement-counts", "for k < n−1 a first-type complement misses 4n−3 complements, a second-type one misses 4";
    DisjointnessCriterion => "disjointness-criterion", "B(+i,−j) ∩ B(+i',−j') = ∅ implies i' = σ(i), i' = j or j' = i";
    AdjacencyCount => "adjacency-count", "for k = n−1, C(m+1,2) complements contain S and U (m = pdim S∩U); adjacent iff C(k,2)";
    MainLemma => "main-lemma", "base-subset-preserving maps preserve adjacency and ortho-adjacency both ways";
    TransportedInexactness => "transported-inexactness", "on a base subset, f preserves inexactness, maximality and type";
    PreservesBaseSubsets => "preserves-base-subsets", "maps induced by symplectic embeddings send base subsets to base subsets";
    MaximalASubsets => "maximal-a-subsets", "maximal A-subsets of G_k are the stars and the tops (stars only for k = n−1)";
    Reconstruction => "reconstruction", "a base-subset-preserving map is induced by a symplectic embedding";
    NegativeControls => "negative-controls", "a corrupted map is rejected with a witness";
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([&Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Malformed(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub lemma: String,
    pub anchor: String,
    pub params: Value,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub suite: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub space: SpaceHeader,
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub entries: Vec<Entry>,
    pub skipped: Vec<Skipped>,
    pub pass: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// `lemma,n,p,k,expected,actual,pass` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lemma,n,p,k,expected,actual,pass\n");
        for e in &self.entries {
            let k = e.params.get("k").map(Value::to_string).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&e.lemma),
                self.space.n,
                self.space.p,
                k,
                csv_field(&e.expected.to_string()),
                csv_field(&e.actual.to_string()),
                e.pass
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Everything a suite needs: the space, its Grassmannians, the run parameters and
/// (lazily) the catalogue of all bases.
pub struct Context {
    pub space: SymplecticSpace,
    pub geo: Geometry,
    pub seed: u64,
    pub trials: usize,
    pub k: Option<usize>,
    pub map: Option<GrassmannianMap>,
    catalog: OnceLock<Result<BaseCatalog>>,
}

impl Context {
    pub fn new(geo: Geometry, seed: u64, trials: usize, k: Option<usize>, map: Option<GrassmannianMap>) -> Self {
        Context {
            space: geo.space().clone(),
            geo,
            seed,
            trials,
            k,
            map,
            catalog: OnceLock::new(),
        }
    }

    fn levels(&self) -> Vec<usize> {
        match self.k {
            Some(k) => vec![k],
            None => (0..self.space.n()).collect(),
        }
    }

    fn catalog(&self) -> Result<&BaseCatalog> {
        self.catalog
            .get_or_init(|| BaseCatalog::build(&self.geo))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn standard(&self, k: usize) -> BaseSubset {
        BaseSubset::generate(&self.space, &SymplecticBase::standard(&self.space), k).expect("k in range")
    }

    fn collineation(&self, t: usize) -> PointMap {
        random_collineation(&self.space, self.seed.wrapping_add(t as u64)).to_point_map(&self.geo)
    }

    /// The maps under test at level k: the supplied map, or maps induced by `trials`
    /// seeded collineations.
    fn maps(&self, k: usize) -> Result<Vec<(Value, GrassmannianMap)>> {
        if let Some(f) = &self.map {
            return Ok(if f.k() == k {
                vec![(json!({ "k": k, "map": "supplied" }), f.clone())]
            } else {
                Vec::new()
            });
        }
        (0..self.trials)
            .map(|t| {
                let h = self.collineation(t);
                Ok((
                    json!({ "k": k, "seed": self.seed.wrapping_add(t as u64) }),
                    induce(&h, &self.geo, &self.geo, k)?,
                ))
            })
            .collect()
    }

    /// All bases at (2, 2), otherwise the standard base and random ones.
    fn check_bases(&self) -> Result<Vec<SymplecticBase>> {
        if (self.space.n(), self.space.p()) == (2, 2) {
            enumerate_all_bases(&self.space)
        } else {
            Ok(sample_bases(&self.space, 20, self.seed))
        }
    }
}

struct Out<'a> {
    suite: Suite,
    entries: &'a mut Vec<Entry>,
}

impl Out<'_> {
    fn push(&mut self, lemma: &str, params: Value, expected: Value, actual: Value, pass: bool) {
        self.entries.push(Entry {
            lemma: lemma.into(),
            anchor: self.suite.anchor().into(),
            params,
            expected,
            actual,
            pass,
        });
    }

    /// An entry whose expected value is zero violations.
    fn zero(&mut self, lemma: &str, params: Value, violations: usize, witness: Option<Value>) {
        let actual = match witness {
            Some(w) if violations > 0 => json!({ "violations": violations, "witness": w }),
            _ => json!(violations),
        };
        self.push(lemma, params, json!(0), actual, violations == 0);
    }
}

fn members_json(bs: &BaseSubset, r: MemberSet) -> Value {
    json!(r.iter().map(|p| one_based(&bs.member(p).indices)).collect::<Vec<_>>())
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn require_oracle(space: &SymplecticSpace) -> Result<()> {
    if enumeration_feasible(space) {
        Ok(())
    } else {
        Err(Error::Infeasible {
            n: space.n(),
            p: space.p(),
            what: "the exactness oracle",
        })
    }
}

pub fn run(ctx: &Context, suite: Suite) -> Report {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let list: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    for s in list {
        let mut out = Out {
            suite: s,
            entries: &mut entries,
        };
        if let Err(e) = run_one(ctx, s, &mut out) {
            match e {
                Error::Infeasible { .. } => skipped.push(Skipped {
                    suite: s.name().into(),
                    reason: e.to_string(),
                }),
                other => out.push("suite-error", json!({}), json!("no error"), json!(other.to_string()), false),
            }
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Report {
        space: ctx.space.header(),
        suite: suite.name().into(),
        seed: ctx.seed,
        trials: ctx.trials,
        entries,
        skipped,
        pass,
    }
}

fn run_one(ctx: &Context, suite: Suite, out: &mut Out) -> Result<()> {
    match suite {
        Suite::BaseSubsetSize => base_subset_size_suite(ctx, out),
        Suite::CommonBaseSubset => common_base_subset_suite(ctx, out),
        Suite::InexactnessCertificate => certificate_suite(ctx, out),
        Suite::FirstType => first_type_suite(ctx, out),
        Suite::SecondType => second_type_suite(ctx, out),
        Suite::Classification => classification_suite(ctx, out),
        Suite::ExactnessSufficiency => sufficiency_suite(ctx, out),
        Suite::Trichotomy => trichotomy_suite(out),
        Suite::ComplementCounts => complement_counts_suite(ctx, out),
        Suite::DisjointnessCriterion => disjointness_suite(ctx, out),
        Suite::AdjacencyCount => adjacency_count_suite(ctx, out),
        Suite::MainLemma => main_lemma_suite(ctx, out),
        Suite::TransportedInexactness => transported_suite(ctx, out),
        Suite::PreservesBaseSubsets => preserves_suite(ctx, out),
        Suite::MaximalASubsets => cliques_suite(ctx, out),
        Suite::Reconstruction => reconstruction_suite(ctx, out),
        Suite::NegativeControls => negative_suite(ctx, out),
        Suite::All => unreachable!("expanded by run"),
    }
}

fn base_subset_size_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let n = ctx.space.n();
    for k in ctx.levels() {
        let expected = base_subset_size(n, k);
        let g = ctx.geo.level(k);
        let sizes: BTreeSet<usize> = (0..ctx.trials.max(1))
            .into_par_iter()
            .map(|t| {
                let b = random_base(&ctx.space, ctx.seed.wrapping_add(t as u64));
                let bs = BaseSubset::generate(&ctx.space, &b, k).expect("k in range");
                let distinct: BTreeSet<usize> = bs.members().iter().filter_map(|m| g.index_of(&m.subspace)).collect();
                if distinct.len() == bs.len() {
                    bs.len()
                } else {
                    usize::MAX
                }
            })
            .collect();
        let actual: Vec<usize> = sizes.iter().copied().collect();
        out.push(
            "base-subset-size",
            json!({ "k": k, "bases": ctx.trials.max(1) }),
            json!(expected),
            json!(actual),
            actual == [expected as usize],
        );
        if k + 1 < n {
            let (lo, hi) = (ctx.standard(k).len() as u128, ctx.standard(k + 1).len() as u128);
            out.push(
                "base-subset-size-recurrence",
                json!({ "k": k }),
                json!(hi * (k as u128 + 2)),
                json!(lo * 2 * (n - k - 1) as u128),
                lo * 2 * (n - k - 1) as u128 == hi * (k as u128 + 2),
            );
        } else {
            out.push(
                "base-subset-size-top",
                json!({ "k": k }),
                json!(1u64 << n),
                json!(ctx.standard(k).len()),
                ctx.standard(k).len() == 1 << n,
            );
        }
    }
    Ok(())
}

fn common_base_subset_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    for k in ctx.levels() {
        let g = ctx.geo.level(k);
        let m = g.len();
        let pairs: Vec<(usize, usize)> = if m * m <= 10_000 {
            (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ k as u64);
            (0..ctx.trials.max(1000)).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect()
        };
        let failures: Vec<(usize, usize)> = pairs
            .par_iter()
            .copied()
            .filter(|&(a, b)| !common_pair_ok(&ctx.space, g.get(a), g.get(b)))
            .collect();
        let witness = failures
            .first()
            .map(|&(a, b)| json!([g.get(a).to_json(), g.get(b).to_json()]));
        out.zero("common-base-subset", json!({ "k": k, "pairs": pairs.len() }), failures.len(), witness);
    }
    Ok(())
}

/// `common_base_subset` succeeds and its base subset contains both inputs.
pub fn common_pair_ok(space: &SymplecticSpace, s: &Subspace, u: &Subspace) -> bool {
    let k = s.vdim() - 1;
    common_base_subset(space, s, u)
        .and_then(|b| BaseSubset::generate(space, &b, k))
        .map(|bs| bs.position_of(s).is_some() && bs.position_of(u).is_some())
        .unwrap_or(false)
}

fn certificate_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let labels = bs.pair_labels();
        let missing: Vec<(usize, usize)> = labels
            .iter()
            .copied()
            .filter(|&(i, j)| bs.lemma1_condition(bs.type2(i, j).expect("admissible")).is_none())
            .collect();
        out.zero(
            "certificate-for-second-type",
            json!({ "k": k, "labels": labels.len() }),
            missing.len(),
            missing.first().map(|&(i, j)| json!([i + 1, j + 1])),
        );
        out.push(
            "no-certificate-for-whole-base-subset",
            json!({ "k": k }),
            json!(null),
            json!(bs.lemma1_condition(bs.full()).map(|(i, j)| [i + 1, j + 1])),
            bs.lemma1_condition(bs.full()).is_none(),
        );
    }
    require_oracle(&ctx.space)?;
    let catalog = ctx.catalog()?;
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let lo = LocalOracle::new(catalog, &ctx.geo, &bs)?;
        let (flagged, bad) = certificate_scan(&bs, &lo);
        out.zero(
            "certificate-implies-inexact",
            json!({ "k": k, "subsets": 1u64 << bs.len(), "certified": flagged }),
            bad.len(),
            bad.first().map(|&r| members_json(&bs, r)),
        );
    }
    Ok(())
}

fn first_type_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let n = ctx.space.n();
    let f = ctx.space.field();
    for k in ctx.levels() {
        let base = SymplecticBase::standard(&ctx.space);
        let bs = ctx.standard(k);
        let mut bad = Vec::new();
        for i in 0..2 * n {
            for c in f.nonzero() {
                let moved = base.perturb_one(&ctx.space, i, f.element(c.into()))?;
                let other = BaseSubset::generate(&ctx.space, &moved, k)?;
                if bs.type1(i).iter().any(|p| other.position_of(&bs.member(p).subspace).is_none()) {
                    bad.push((i, c));
                }
            }
        }
        out.zero(
            "perturbed-base-contains-minus-i",
            json!({ "k": k }),
            bad.len(),
            bad.first().map(|&(i, c)| json!({ "i": i + 1, "c": c })),
        );
        if k + 1 < n {
            let bad: Vec<(usize, usize)> = (0..2 * n)
                .flat_map(|i| (0..2 * n).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    let s = bs.s_of(bs.type1(i), j);
                    if i == j {
                        !s.is_empty()
                    } else {
                        s.vdim() != 1 || !s.contains_vector(bs.base().point(j)).unwrap_or(false)
                    }
                })
                .collect();
            out.zero(
                "s-of-minus-i",
                json!({ "k": k }),
                bad.len(),
                bad.first().map(|&(i, j)| json!([i + 1, j + 1])),
            );
        }
    }
    require_oracle(&ctx.space)?;
    let catalog = ctx.catalog()?;
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let lo = LocalOracle::new(catalog, &ctx.geo, &bs)?;
        let maximal: BTreeSet<MemberSet> = lo.maximal_inexact()?.into_iter().collect();
        let inexact = (0..2 * n).filter(|&i| lo.is_inexact(bs.type1(i))).count();
        let max_count = (0..2 * n).filter(|&i| maximal.contains(&bs.type1(i))).count();
        let want_max = if k + 1 < n { 2 * n } else { 0 };
        out.push(
            "minus-i-inexact",
            json!({ "k": k }),
            json!({ "inexact": 2 * n, "maximal": want_max }),
            json!({ "inexact": inexact, "maximal": max_count }),
            inexact == 2 * n && max_count == want_max,
        );
    }
    Ok(())
}

fn second_type_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let n = ctx.space.n();
    let f = ctx.space.field();
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let labels = bs.pair_labels();
        let mut bad_complement = 0;
        let mut bad_top = 0;
        let mut bad_symmetry = 0;
        let mut sets = BTreeSet::new();
        for &(i, j) in &labels {
            let r = bs.type2(i, j)?;
            sets.insert(r);
            if bs.full().difference(r) != bs.second_complement(i, j) {
                bad_complement += 1;
            }
            if r != bs.type2(bs.sigma(j), bs.sigma(i))? {
                bad_symmetry += 1;
            }
            if k + 1 == n && r != bs.select(&Selector::new().plus(i).plus(j)).union(bs.minus(i)) {
                bad_top += 1;
            }
        }
        out.zero("second-type-complement", json!({ "k": k }), bad_complement, None);
        out.zero("second-type-label-symmetry", json!({ "k": k }), bad_symmetry, None);
        if k + 1 == n {
            out.zero("second-type-top-level-form", json!({ "k": k }), bad_top, None);
        }
        out.push(
            "second-type-coincidences",
            json!({ "k": k }),
            json!({ "labels": labels.len() }),
            json!({ "labels": labels.len(), "distinct_sets": sets.len() }),
            true,
        );
        let base = SymplecticBase::standard(&ctx.space);
        let mut bad = 0;
        for &(i, j) in &labels {
            for c in f.nonzero() {
                match base.perturb_pair(&ctx.space, i, j, f.element(c.into())) {
                    Ok(b) if b.sigma() == base.sigma() => {}
                    _ => bad += 1,
                }
            }
        }
        out.zero("perturbed-pair-is-base", json!({ "k": k }), bad, None);
    }
    require_oracle(&ctx.space)?;
    let catalog = ctx.catalog()?;
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let lo = LocalOracle::new(catalog, &ctx.geo, &bs)?;
        let maximal: BTreeSet<MemberSet> = lo.maximal_inexact()?.into_iter().collect();
        let labels = bs.pair_labels();
        let missing: Vec<(usize, usize)> = labels
            .iter()
            .copied()
            .filter(|&(i, j)| !maximal.contains(&bs.type2(i, j).expect("admissible")))
            .collect();
        out.zero(
            "second-type-maximal-inexact",
            json!({ "k": k, "labels": labels.len() }),
            missing.len(),
            missing.first().map(|&(i, j)| json!([i + 1, j + 1])),
        );
    }
    Ok(())
}

fn classification_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    require_oracle(&ctx.space)?;
    let catalog = ctx.catalog()?;
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let lo = LocalOracle::new(catalog, &ctx.geo, &bs)?;
        let found: BTreeSet<MemberSet> = lo.maximal_inexact()?.into_iter().collect();
        let family = bs.classify_maximal_inexact();
        let formula: BTreeSet<MemberSet> = family.iter().map(|c| c.members).collect();
        let first = family.iter().filter(|c| c.kind.type_number() == 1).count();
        let extra: Vec<Value> = formula
            .difference(&found)
            .take(3)
            .map(|&r| {
                let kind = family.iter().find(|c| c.members == r).map(|c| c.kind.to_string());
                json!({ "set": kind, "members": members_json(&bs, r) })
            })
            .collect();
        let unexplained: Vec<Value> = found.difference(&formula).take(3).map(|&r| members_json(&bs, r)).collect();
        out.push(
            "classification",
            json!({ "k": k }),
            json!({ "maximal_inexact": formula.len(), "first_type": first, "second_type": formula.len() - first }),
            json!({
                "maximal_inexact": found.len(),
                "formula_but_not_maximal": extra,
                "maximal_but_not_formula": unexplained,
            }),
            found == formula,
        );
    }
    Ok(())
}

fn sufficiency_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    require_oracle(&ctx.space)?;
    let catalog = ctx.catalog()?;
    let mut converse = None;
    for k in ctx.levels() {
        let bs = ctx.standard(k);
        let lo = LocalOracle::new(catalog, &ctx.geo, &bs)?;
        let scan = sufficiency_scan(&bs, &lo);
        out.zero(
            "isolated-points-imply-exact",
            json!({ "k": k, "subsets": scan.subsets, "isolated": scan.isolated }),
            scan.violations.len(),
            scan.violations.first().map(|&r| members_json(&bs, r)),
        );
        if converse.is_none() {
            converse = scan
                .converse_witness
                .map(|r| json!({ "n": ctx.space.n(), "p": ctx.space.p(), "k": k, "members": members_json(&bs, r) }));
        }
    }
    if converse.is_none() && ctx.space.n() == 2 {
        converse = converse_witness_at(&SymplecticSpace::standard(3, 2)?)?;
    }
    out.push(
        "converse-fails",
        json!({}),
        json!("an exact subset without isolated points"),
        converse.clone().unwrap_or(Value::Null),
        converse.is_some(),
    );
    Ok(())
}

/// First exact subset of a standard base subset that fails S_i(R) = p_i for some i.
pub fn converse_witness_at(space: &SymplecticSpace) -> Result<Option<Value>> {
    let geo = Geometry::new(space);
    let catalog = BaseCatalog::build(&geo)?;
    for k in 0..space.n() {
        let bs = BaseSubset::generate(space, &SymplecticBase::standard(space), k)?;
        let lo = LocalOracle::new(&catalog, &geo, &bs)?;
        if let Some(r) = sufficiency_scan(&bs, &lo).converse_witness {
            return Ok(Some(
                json!({ "n": space.n(), "p": space.p(), "k": k, "members": members_json(&bs, r) }),
            ));
        }
    }
    Ok(None)
}

/// (n, k, c1, c2) over 3 ≤ n ≤ 5, 1 ≤ k < n−1, from the generated sets.
pub fn trichotomy_table() -> Vec<(usize, usize, u128, u128)> {
    let mut rows = Vec::new();
    for n in 3..=5 {
        let space = SymplecticSpace::standard(n, 2).expect("supported");
        for k in 1..n - 1 {
            let bs = BaseSubset::generate(&space, &SymplecticBase::standard(&space), k).expect("k in range");
            rows.push((n, k, bs.type1(0).len() as u128, bs.type2(0, 1).expect("admissible").len() as u128));
        }
    }
    rows
}

fn trichotomy_suite(out: &mut Out) -> Result<()> {
    let rows = trichotomy_table();
    let mut formula_bad = 0;
    let mut witness = [None, None, None];
    for &(n, k, c1, c2) in &rows {
        if c1 != first_type_size(n, k) || c2 != second_type_size(n, k) {
            formula_bad += 1;
        }
        let slot = match c1.cmp(&c2) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 2,
        };
        witness[slot].get_or_insert(json!({ "n": n, "k": k, "c1": c1, "c2": c2 }));
    }
    out.zero("type-sizes-closed-form", json!({ "rows": rows.len() }), formula_bad, None);
    for (slot, rel) in ["c1 < c2", "c1 = c2", "c1 > c2"].iter().enumerate() {
        out.push(
            "trichotomy",
            json!({ "relation": rel }),
            json!("a witnessing (n, k)"),
            witness[slot].clone().unwrap_or(Value::Null),
            witness[slot].is_some(),
        );
    }
    Ok(())
}

fn complement_counts_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let n = ctx.space.n();
    for k in ctx.levels().into_iter().filter(|&k| k + 1 < n) {
        let bs = ctx.standard(k);
        let family = bs.complement_family();
        for (ty, want) in [(1u8, 4 * n - 3), (2, 4)] {
            let degrees: Vec<_> = family
                .iter()
                .filter(|c| c.kind.type_number() == ty)
                .map(|c| disjointness_degree(&family, c.members))
                .collect();
            let labelled: BTreeSet<usize> = degrees.iter().map(|d| d.labelled).collect();
            let distinct: BTreeSet<usize> = degrees.iter().map(|d| d.distinct).collect();
            out.push(
                "disjoint-complements",
                json!({ "k": k, "type": ty }),
                json!(want),
                json!({ "by_label": labelled, "distinct_sets": distinct }),
                labelled.len() == 1 && labelled.contains(&want),
            );
        }
    }
    Ok(())
}

fn disjointness_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let m = 2 * ctx.space.n();
    for k in ctx.levels().into_iter().filter(|&k| k + 1 < ctx.space.n()) {
        let bs = ctx.standard(k);
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        let sets: Vec<MemberSet> = pairs
            .iter()
            .map(|&(i, j)| bs.select(&Selector::new().plus(i).minus(j)))
            .collect();
        let mut bad = Vec::new();
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (b, &(i2, j2)) in pairs.iter().enumerate() {
                if sets[a].is_disjoint(sets[b]) && !(i2 == bs.sigma(i) || i2 == j || j2 == i) {
                    bad.push([i + 1, j + 1, i2 + 1, j2 + 1]);
                }
            }
        }
        out.zero(
            "disjointness-criterion",
            json!({ "k": k, "quadruples": pairs.len() * pairs.len() }),
            bad.len(),
            bad.first().map(|w| json!(w)),
        );
    }
    Ok(())
}

fn adjacency_count_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let n = ctx.space.n();
    let k = n - 1;
    if ctx.k.is_some_and(|x| x != k) {
        return Ok(());
    }
    let bs = ctx.standard(k);
    let mut formula_bad = Vec::new();
    let mut criterion_bad = Vec::new();
    let mut table = BTreeSet::new();
    for s in 0..bs.len() {
        for u in s + 1..bs.len() {
            let c = bs.adjacency_count(s, u)?;
            let m = c.common_points as isize - 1;
            let expected = if m >= 0 { binomial(m as usize + 1, 2) as usize } else { 0 };
            let adjacent = crate::grassmannian::adjacent(&bs.member(s).subspace, &bs.member(u).subspace)?;
            table.insert((m, c.distinct, adjacent));
            let w = json!({ "S": one_based(&bs.member(s).indices), "U": one_based(&bs.member(u).indices), "count": c.distinct, "m": m, "adjacent": adjacent });
            if c.distinct != expected {
                formula_bad.push(w.clone());
            }
            if adjacent != (c.distinct as u128 == binomial(k, 2)) {
                criterion_bad.push(w);
            }
        }
    }
    let pairs = bs.len() * (bs.len() - 1) / 2;
    out.zero(
        "count-is-binomial-m-plus-1",
        json!({ "k": k, "pairs": pairs }),
        formula_bad.len(),
        formula_bad.first().cloned(),
    );
    let summary: Vec<Value> = table
        .iter()
        .map(|(m, c, a)| json!({ "m": m, "count": c, "adjacent": a }))
        .collect();
    let actual = json!({ "violations": criterion_bad.len(), "observed": summary });
    out.push(
        "adjacent-iff-binomial-k",
        json!({ "k": k, "pairs": pairs, "binomial_k_2": binomial(k, 2) }),
        json!(0),
        actual,
        criterion_bad.is_empty(),
    );
    Ok(())
}

fn main_lemma_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    for k in ctx.levels() {
        let within = sample_bases(&ctx.space, 50, ctx.seed);
        let all = ctx.geo.level(k).len() <= 400;
        for (params, f) in ctx.maps(k)? {
            let scope = if all { PairScope::All } else { PairScope::WithinBaseSubsets(&within) };
            let v = check_main_lemma(&f, &ctx.geo, &ctx.geo, scope);
            let w = v.adjacency.first().or(v.ortho.first()).map(|&(a, b)| json!([a, b]));
            let mut p = params;
            p["pairs"] = json!(v.pairs);
            p["ortho_checked"] = json!(v.ortho_checked);
            out.zero("main-lemma", p, v.adjacency.len() + v.ortho.len(), w);
        }
    }
    Ok(())
}

fn transported_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    require_oracle(&ctx.space)?;
    let catalog = ctx.catalog()?;
    for k in ctx.levels() {
        for (t, (params, f)) in ctx.maps(k)?.into_iter().enumerate() {
            let base = random_base(&ctx.space, ctx.seed.wrapping_add(1000 + t as u64));
            let checks = transported_inexactness_check(&f, &ctx.geo, &ctx.geo, catalog, catalog, &base)?;
            for c in checks {
                out.push(&c.name, params.clone(), json!(true), c.witness.unwrap_or(json!(true)), c.pass);
            }
        }
    }
    Ok(())
}

fn preserves_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let bases = ctx.check_bases()?;
    for k in ctx.levels() {
        for (params, f) in ctx.maps(k)? {
            let v = preserves_base_subsets(&f, &ctx.geo, &ctx.geo, &bases);
            let w = v
                .counterexamples
                .first()
                .map(|&i| serde_json::to_value(bases[i].to_json(&ctx.space)).expect("serializable"));
            let mut p = params;
            p["bases"] = json!(v.checked);
            out.zero("preserves-base-subsets", p, v.counterexamples.len(), w);
        }
    }
    Ok(())
}

/// Stars and tops of G_k as sorted index lists.
pub fn stars_and_tops(geo: &Geometry, k: usize) -> BTreeSet<Vec<usize>> {
    let sorted = |v: &Vec<u32>| {
        let mut v: Vec<usize> = v.iter().map(|&x| x as usize).collect();
        v.sort_unstable();
        v
    };
    geo.stars(k).iter().map(sorted).chain(geo.tops(k).iter().map(sorted)).collect()
}

fn cliques_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    for k in ctx.levels() {
        let cliques: BTreeSet<Vec<usize>> = maximal_a_subsets_bruteforce(&ctx.geo, k)?.into_iter().collect();
        let expected = stars_and_tops(&ctx.geo, k);
        let stars = ctx.geo.stars(k).len();
        out.push(
            "maximal-a-subsets",
            json!({ "k": k }),
            json!({ "stars": stars, "tops": expected.len() - stars.min(expected.len()) }),
            json!({
                "cliques": cliques.len(),
                "not_star_or_top": cliques.difference(&expected).count(),
                "star_or_top_not_maximal": expected.difference(&cliques).count(),
            }),
            cliques == expected,
        );
    }
    Ok(())
}

fn reconstruction_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    let bases = sample_bases(&ctx.space, 8, ctx.seed);
    for k in ctx.levels() {
        let maps = ctx.maps(k)?;
        let supplied = ctx.map.is_some();
        for (t, (params, f)) in maps.into_iter().enumerate() {
            let rec = reconstruct(&f, &ctx.geo, &ctx.geo, &bases)?;
            let same = supplied || rec.point_map.as_ref() == Some(&ctx.collineation(t));
            let failure = rec.certificate.first_failure().map(|(level, c)| json!({ "level": level, "check": c.name, "witness": c.witness }));
            out.push(
                "reconstruction",
                params,
                json!({ "certified": true, "recovers_point_map": true }),
                json!({ "certified": rec.certificate.pass, "recovers_point_map": same, "failure": failure }),
                rec.certificate.pass && same,
            );
        }
    }
    Ok(())
}

/// A base whose base subset at level k contains element `a` of G_k but not `b`.
pub fn base_separating(space: &SymplecticSpace, geo: &Geometry, k: usize, a: usize, b: usize) -> Option<SymplecticBase> {
    let g = geo.level(k);
    (0..g.len()).find_map(|x| {
        let base = common_base_subset(space, g.get(a), g.get(x)).ok()?;
        let bs = BaseSubset::generate(space, &base, k).ok()?;
        bs.position_of(g.get(b)).is_none().then_some(base)
    })
}

fn negative_suite(ctx: &Context, out: &mut Out) -> Result<()> {
    for k in ctx.levels().into_iter().filter(|&k| k >= 1) {
        let base_map = match &ctx.map {
            Some(f) if f.k() == k => f.clone(),
            Some(_) => continue,
            None => induce(&ctx.collineation(0), &ctx.geo, &ctx.geo, k)?,
        };
        let Some((bad, (a, b))) = corrupt(&base_map, &ctx.geo) else {
            continue;
        };
        let mut bases = ctx.check_bases()?;
        bases.extend(base_separating(&ctx.space, &ctx.geo, k, a, b));
        let params = json!({ "k": k, "swapped": [a, b] });

        let v = preserves_base_subsets(&bad, &ctx.geo, &ctx.geo, &bases);
        out.push(
            "corrupted-preserves-base-subsets",
            params.clone(),
            json!("rejected"),
            json!({ "counterexamples": v.counterexamples.len() }),
            !v.pass(),
        );
        let v = check_main_lemma(&bad, &ctx.geo, &ctx.geo, PairScope::All);
        out.push(
            "corrupted-main-lemma",
            params.clone(),
            json!("rejected"),
            json!({ "adjacency": v.adjacency.len(), "ortho": v.ortho.len(), "witness": v.adjacency.first() }),
            !v.pass(),
        );
        let rec = reconstruct(&bad, &ctx.geo, &ctx.geo, &bases)?;
        let failure = rec.certificate.first_failure();
        out.push(
            "corrupted-reconstruction",
            params,
            json!("rejected"),
            json!(failure.map(|(level, c)| json!({ "level": level, "check": c.name, "witness": c.witness }))),
            !rec.certificate.pass && failure.is_some_and(|(_, c)| c.witness.is_some()),
        );
    }
    Ok(())
}

/// Enumerated |G_k| for every k, as CSV.
pub fn count_table(geo: &Geometry) -> String {
    let sp = geo.space();
    let mut s = String::from("n,p,k,count\n");
    for (k, g) in geo.levels().iter().enumerate() {
        s.push_str(&format!("{},{},{},{}\n", sp.n(), sp.p(), k, g.len()));
    }
    s
}

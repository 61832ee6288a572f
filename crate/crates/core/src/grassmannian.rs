//! Isotropic Grassmannians G_k, adjacency, stars, tops and maximal A-subsets.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{vector_code, Subspace};
use crate::space::SymplecticSpace;

/// All totally isotropic subspaces of projective dimension `k`, sorted by the
/// canonical ordering, with a reverse index.
#[derive(Clone, Debug)]
pub struct Grassmannian {
    space: SymplecticSpace,
    k: usize,
    elements: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
}

impl Grassmannian {
    /// Enumerates G_k by extending totally isotropic subspaces one point at a time.
    pub fn enumerate(space: &SymplecticSpace, k: usize) -> Result<Self> {
        check_level(space, k)?;
        let mut levels = enumerate_levels(space, k);
        Ok(levels.pop().expect("at least one level"))
    }

    /// Builds a Grassmannian from an explicit element list, validating it.
    pub fn from_elements(space: &SymplecticSpace, k: usize, elements: Vec<Subspace>) -> Result<Self> {
        check_level(space, k)?;
        for w in elements.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Malformed("elements are not strictly increasing".into()));
            }
        }
        for s in &elements {
            if s.pdim() != k as isize || !space.is_totally_isotropic(s)? {
                return Err(Error::Malformed(format!("{s:?} is not a totally isotropic {k}-space")));
            }
        }
        Ok(Self::new_unchecked(space.clone(), k, elements))
    }

    fn new_unchecked(space: SymplecticSpace, k: usize, elements: Vec<Subspace>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Grassmannian {
            space,
            k,
            elements,
            index,
        }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.elements[i]
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }
}

fn check_level(space: &SymplecticSpace, k: usize) -> Result<()> {
    if k >= space.n() {
        return Err(Error::out_of_range(
            "k",
            k as i64,
            format!("0..={}", space.n() - 1),
        ));
    }
    Ok(())
}

/// G_0, …, G_kmax. Level j+1 is obtained from level j by adjoining points of S^⊥;
/// only points with zeros in the pivot columns of S are tried, which cuts the
/// duplicate work by a factor p^{dim S}.
fn enumerate_levels(space: &SymplecticSpace, kmax: usize) -> Vec<Grassmannian> {
    let f = space.field();
    let all = Subspace::whole(f, space.dim());
    let points: Vec<Subspace> = all
        .points()
        .into_iter()
        .map(|v| Subspace::point(f, &v).expect("nonzero"))
        .collect();
    let mut levels = vec![Grassmannian::new_unchecked(space.clone(), 0, points)];
    for k in 1..=kmax {
        let prev = &levels[k - 1];
        let found: HashSet<Subspace> = prev
            .elements
            .par_iter()
            .flat_map_iter(|s| {
                let pivots = s.pivots();
                let perp = space.perp(s).expect("same space");
                perp.points()
                    .into_iter()
                    .filter(|x| pivots.iter().all(|&c| x[c] == 0))
                    .filter_map(|x| {
                        let t = s.extend(&x).expect("same space");
                        (t.vdim() == s.vdim() + 1).then_some(t)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut elements: Vec<Subspace> = found.into_iter().collect();
        elements.sort_unstable();
        levels.push(Grassmannian::new_unchecked(space.clone(), k, elements));
    }
    levels
}

fn same_level(s: &Subspace, u: &Subspace) -> Result<()> {
    if s.vdim() != u.vdim() {
        return Err(Error::DimensionMismatch {
            expected: s.vdim(),
            found: u.vdim(),
        });
    }
    Ok(())
}

/// S and U (same dimension k) meet in a (k−1)-dimensional subspace. For points the
/// empty subspace plays the role of G_{−1}, so distinct points are adjacent.
pub fn adjacent(s: &Subspace, u: &Subspace) -> Result<bool> {
    same_level(s, u)?;
    Ok(s.intersect(u)?.vdim() + 1 == s.vdim())
}

/// Adjacent and orthogonal.
pub fn ortho_adjacent(space: &SymplecticSpace, s: &Subspace, u: &Subspace) -> Result<bool> {
    Ok(adjacent(s, u)? && space.orthogonal(s, u)?)
}

/// The star [M, M^⊥]_k: elements of G_k containing M (pdim k−1) and contained in M^⊥.
pub fn star(space: &SymplecticSpace, m: &Subspace, k: usize) -> Result<Vec<Subspace>> {
    check_level(space, k)?;
    if m.vdim() != k || !space.is_totally_isotropic(m)? {
        return Err(Error::NotIsotropic);
    }
    let perp = space.perp(m)?;
    let pivots = m.pivots();
    let mut out: Vec<Subspace> = perp
        .points()
        .into_iter()
        .filter(|x| pivots.iter().all(|&c| x[c] == 0) && !m.contains_vector(x).unwrap_or(true))
        .map(|x| m.extend(&x))
        .collect::<Result<_>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The top (N]_k: all k-dimensional subspaces of a totally isotropic N of pdim k+1.
pub fn top(space: &SymplecticSpace, n: &Subspace, k: usize) -> Result<Vec<Subspace>> {
    check_level(space, k)?;
    if n.vdim() != k + 2 || !space.is_totally_isotropic(n)? {
        return Err(Error::NotIsotropic);
    }
    Ok(n.hyperplanes())
}

/// [M, N]_k: k-dimensional subspaces S with M ⊆ S ⊆ N.
pub fn interval(m: &Subspace, n: &Subspace, k: usize) -> Result<Vec<Subspace>> {
    if !n.contains(m)? {
        return Err(Error::Degenerate("interval bounds are not incident".into()));
    }
    Ok(n.subspaces(k + 1)
        .into_iter()
        .filter(|s| s.contains(m).unwrap_or(false))
        .collect())
}

/// Every Grassmannian G_0..G_{n−1} of one space, plus lookup tables shared by
/// the reconstruction machinery.
#[derive(Debug)]
pub struct Geometry {
    space: SymplecticSpace,
    levels: Vec<Grassmannian>,
    point_lookup: Vec<u32>,
    faces: Vec<OnceLock<Vec<Vec<u32>>>>,
    stars: Vec<OnceLock<Vec<Vec<u32>>>>,
}

impl Geometry {
    pub fn new(space: &SymplecticSpace) -> Self {
        Self::from_levels(space, enumerate_levels(space, space.n() - 1))
    }

    /// Assembles a geometry from previously enumerated levels (e.g. loaded from cache).
    pub fn from_levels(space: &SymplecticSpace, levels: Vec<Grassmannian>) -> Self {
        assert_eq!(levels.len(), space.n());
        let f = space.field();
        let mut point_lookup = vec![u32::MAX; f.order().pow(space.dim() as u32)];
        for (i, pt) in levels[0].elements().iter().enumerate() {
            point_lookup[vector_code(f, pt.row(0))] = i as u32;
        }
        Geometry {
            space: space.clone(),
            levels,
            point_lookup,
            faces: (0..space.n()).map(|_| OnceLock::new()).collect(),
            stars: (0..space.n()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn level(&self, k: usize) -> &Grassmannian {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Grassmannian] {
        &self.levels
    }

    pub fn points(&self) -> &Grassmannian {
        &self.levels[0]
    }

    /// Index in G_0 of the point spanned by the nonzero vector `v`.
    pub fn point_index(&self, v: &[u8]) -> usize {
        let f = self.space.field();
        let lead = *v.iter().find(|&&x| x != 0).expect("nonzero vector");
        let s = f.inv(lead);
        let code = v
            .iter()
            .fold(0usize, |acc, &x| acc * f.order() + f.mul(x, s) as usize);
        self.point_lookup[code] as usize
    }

    /// Indices in G_0 of the points of `s`.
    pub fn point_indices(&self, s: &Subspace) -> Vec<usize> {
        s.points().iter().map(|v| self.point_index(v)).collect()
    }

    /// For each S in G_k (k ≥ 1), the indices in G_{k−1} of its hyperplanes.
    pub fn faces(&self, k: usize) -> &[Vec<u32>] {
        assert!(k >= 1);
        self.faces[k].get_or_init(|| {
            let lower = &self.levels[k - 1];
            self.levels[k]
                .elements()
                .par_iter()
                .map(|s| {
                    s.hyperplanes()
                        .iter()
                        .map(|h| lower.index_of(h).expect("faces of isotropic spaces are isotropic") as u32)
                        .collect()
                })
                .collect()
        })
    }

    /// For each M in G_{k−1}, the indices in G_k of its star; for k = 0 a single
    /// entry (M = ∅) holding all of G_0.
    pub fn stars(&self, k: usize) -> &[Vec<u32>] {
        self.stars[k].get_or_init(|| {
            if k == 0 {
                return vec![(0..self.levels[0].len() as u32).collect()];
            }
            let mut out = vec![Vec::new(); self.levels[k - 1].len()];
            for (s, faces) in self.faces(k).iter().enumerate() {
                for &m in faces {
                    out[m as usize].push(s as u32);
                }
            }
            out
        })
    }

    /// For each N in G_{k+1}, the indices in G_k of its top.
    pub fn tops(&self, k: usize) -> Vec<Vec<u32>> {
        if k + 1 >= self.space.n() {
            return Vec::new();
        }
        self.faces(k + 1).to_vec()
    }

    pub fn adjacent_idx(&self, k: usize, a: usize, b: usize) -> bool {
        let g = &self.levels[k];
        adjacent(g.get(a), g.get(b)).expect("same level")
    }

    pub fn ortho_adjacent_idx(&self, k: usize, a: usize, b: usize) -> bool {
        let g = &self.levels[k];
        ortho_adjacent(&self.space, g.get(a), g.get(b)).expect("same level")
    }
}

/// Brute-force maximal cliques of the adjacency graph on G_k (Bron–Kerbosch with
/// pivoting). Each clique is returned as a sorted index list; the list is sorted.
pub fn maximal_a_subsets_bruteforce(geo: &Geometry, k: usize) -> Result<Vec<Vec<usize>>> {
    let space = geo.space();
    let feasible = matches!((space.n(), space.p()), (2, 2) | (2, 3) | (3, 2));
    if !feasible {
        return Err(Error::Infeasible {
            n: space.n(),
            p: space.p(),
            what: "clique enumeration",
        });
    }
    check_level(space, k)?;
    let g = geo.level(k);
    let m = g.len();
    let adj: Vec<Bits> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut row = Bits::new(m);
            for b in 0..m {
                if a != b && adjacent(g.get(a), g.get(b)).expect("same level") {
                    row.set(b);
                }
            }
            row
        })
        .collect();
    let mut out = Vec::new();
    let mut all = Bits::new(m);
    (0..m).for_each(|i| all.set(i));
    bron_kerbosch(&adj, &mut Vec::new(), all, Bits::new(m), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn bron_kerbosch(adj: &[Bits], r: &mut Vec<usize>, p: Bits, mut x: Bits, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&u| p.and(&adj[u]).count())
        .expect("p ∪ x nonempty");
    let mut p = p;
    for v in p.and_not(&adj[pivot]).iter().collect::<Vec<_>>() {
        r.push(v);
        bron_kerbosch(adj, r, p.and(&adj[v]), x.and(&adj[v]), out);
        r.pop();
        p.clear(v);
        x.set(v);
    }
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }
}

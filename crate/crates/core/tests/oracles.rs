//! Library results against independent brute-force computations.

use std::collections::{BTreeSet, VecDeque};

use symgrass::bases::{
    enumerate_all_bases, random_base, random_collineation, recognize, Collineation, SymplecticBase,
};
use symgrass::field::PrimeField;
use symgrass::grassmannian::Geometry;
use symgrass::linalg::{normalize, Subspace};
use symgrass::space::SymplecticSpace;

fn space(n: usize, p: u32) -> SymplecticSpace {
    SymplecticSpace::standard(n, p).unwrap()
}

/// Ω written out for the standard form: Σ x_i y_{n+i} − x_{n+i} y_i.
fn omega(f: PrimeField, n: usize, x: &[u8], y: &[u8]) -> u8 {
    let mut acc = 0i64;
    for i in 0..n {
        acc += x[i] as i64 * y[n + i] as i64 - x[n + i] as i64 * y[i] as i64;
    }
    f.reduce(acc)
}

/// Every nonzero vector up to scalars, first nonzero coordinate 1.
fn projective_points(f: PrimeField, dim: usize) -> Vec<Vec<u8>> {
    let q = f.order();
    let mut out = Vec::new();
    for code in 1..q.pow(dim as u32) {
        let mut c = code;
        let v: Vec<u8> = (0..dim)
            .map(|_| {
                let d = (c % q) as u8;
                c /= q;
                d
            })
            .collect();
        if normalize(f, &v).as_deref() == Some(v.as_slice()) {
            out.push(v);
        }
    }
    out
}

fn gaussian_binomial(n: u32, k: u32, q: u128) -> u128 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

/// Number of totally isotropic subspaces of vector dimension k+1.
fn isotropic_count(n: u32, k: u32, q: u128) -> u128 {
    (0..=k).fold(gaussian_binomial(n, k + 1, q), |acc, i| acc * (q.pow(n - i) + 1))
}

#[test]
fn level_sizes_match_closed_form_and_brute_force() {
    for (n, p) in [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3)] {
        let sp = space(n, p);
        let f = sp.field();
        let geo = Geometry::new(&sp);
        let pts = projective_points(f, 2 * n);
        // grow isotropic subspaces one orthogonal point at a time
        let mut level: BTreeSet<Subspace> = pts.iter().map(|x| Subspace::point(f, x).unwrap()).collect();
        for k in 0..n {
            if k > 0 {
                let mut next = BTreeSet::new();
                for s in &level {
                    for x in &pts {
                        let orth = s.rows().all(|r| omega(f, n, r, x) == 0);
                        if orth && !s.contains_vector(x).unwrap() {
                            next.insert(s.extend(x).unwrap());
                        }
                    }
                }
                level = next;
            }
            let closed = isotropic_count(n as u32, k as u32, p as u128);
            assert_eq!(level.len() as u128, closed, "brute force ({n},{p}) k={k}");
            assert_eq!(geo.level(k).len() as u128, closed, "library ({n},{p}) k={k}");
            let lib: BTreeSet<Subspace> = geo.level(k).elements().iter().cloned().collect();
            assert_eq!(lib, level, "element sets ({n},{p}) k={k}");
        }
    }
}

#[test]
fn closed_form_at_largest_grid_point() {
    let sp = space(3, 5);
    let geo = Geometry::new(&sp);
    let sizes: Vec<usize> = (0..3).map(|k| geo.level(k).len()).collect();
    assert_eq!(sizes, vec![3906, 101556, 19656]);
    for (k, s) in sizes.iter().enumerate() {
        assert_eq!(*s as u128, isotropic_count(3, k as u32, 5));
    }
}

type PairKey = Vec<(Vec<u8>, Vec<u8>)>;

fn pair_key(pairs: &[(Vec<u8>, Vec<u8>)]) -> PairKey {
    let mut key: PairKey = pairs
        .iter()
        .map(|(a, b)| if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })
        .collect();
    key.sort();
    key
}

fn base_pair_key(b: &SymplecticBase) -> PairKey {
    let n = b.n();
    let pairs: Vec<_> = (0..n).map(|i| (b.point(i).to_vec(), b.point(b.partner(i)).to_vec())).collect();
    pair_key(&pairs)
}

/// Backtracking over hyperbolic pairs: each new pair is orthogonal to all earlier
/// points, its two points are non-orthogonal, and the whole tuple stays independent.
fn backtrack_bases(sp: &SymplecticSpace) -> BTreeSet<PairKey> {
    let n = sp.n();
    let f = sp.field();
    let pts = projective_points(f, 2 * n);
    let mut found = BTreeSet::new();
    let mut chosen: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    fn go(
        n: usize,
        f: PrimeField,
        pts: &[Vec<u8>],
        chosen: &mut Vec<(Vec<u8>, Vec<u8>)>,
        found: &mut BTreeSet<PairKey>,
    ) {
        if chosen.len() == n {
            found.insert(pair_key(chosen));
            return;
        }
        let flat: Vec<Vec<u8>> = chosen.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        let ok = |x: &Vec<u8>| flat.iter().all(|y| omega(f, n, x, y) == 0);
        let candidates: Vec<&Vec<u8>> = pts.iter().filter(|x| ok(x)).collect();
        for a in &candidates {
            for b in &candidates {
                if omega(f, n, a, b) == 0 {
                    continue;
                }
                let mut rows: Vec<&Vec<u8>> = flat.iter().collect();
                rows.push(a);
                rows.push(b);
                if Subspace::span(f, 2 * n, &rows).unwrap().vdim() != rows.len() {
                    continue;
                }
                chosen.push(((*a).clone(), (*b).clone()));
                go(n, f, pts, chosen, found);
                chosen.pop();
            }
        }
    }
    go(n, f, &pts, &mut chosen, &mut found);
    found
}

#[test]
fn base_enumeration_matches_backtracking() {
    for ((n, p), count) in [((2, 2), 90), ((2, 3), 1620), ((3, 2), 30240)] {
        let sp = space(n, p);
        let lib = enumerate_all_bases(&sp).unwrap();
        let keys: BTreeSet<PairKey> = lib.iter().map(base_pair_key).collect();
        assert_eq!(keys.len(), lib.len(), "duplicates at ({n},{p})");
        assert_eq!(lib.len(), count, "frozen count at ({n},{p})");
        assert_eq!(keys, backtrack_bases(&sp), "({n},{p})");
        let std = base_pair_key(&SymplecticBase::standard(&sp));
        assert_eq!(lib.iter().filter(|b| base_pair_key(b) == std).count(), 1);
        for b in &lib {
            assert_eq!(recognize(&sp, b.points()).unwrap(), b.sigma());
        }
    }
}

#[test]
fn transvection_orbit_matches_enumeration() {
    // breadth-first closure of the standard base under all transvections
    let sp = space(2, 2);
    let f = sp.field();
    let gens: Vec<Collineation> = projective_points(f, 4)
        .iter()
        .map(|v| Collineation::transvection(&sp, v, 1))
        .collect();
    let start = SymplecticBase::standard(&sp);
    let mut seen = BTreeSet::from([base_pair_key(&start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        for g in &gens {
            let next = g.map_base(&sp, &b);
            if seen.insert(base_pair_key(&next)) {
                queue.push_back(next);
            }
        }
    }
    let lib: BTreeSet<PairKey> = enumerate_all_bases(&sp).unwrap().iter().map(base_pair_key).collect();
    assert_eq!(seen, lib);

    let sampled: BTreeSet<PairKey> = (0..10_000).map(|s| base_pair_key(&random_base(&sp, s))).collect();
    assert_eq!(sampled, lib, "10^4 seeds should reach every base");
}

#[test]
fn intersection_matches_vector_enumeration() {
    for (n, p) in [(2, 2), (2, 3), (3, 2)] {
        let sp = space(n, p);
        let f = sp.field();
        let geo = Geometry::new(&sp);
        let pts = projective_points(f, 2 * n);
        let els: Vec<&Subspace> = (0..n).flat_map(|k| geo.level(k).elements().iter().step_by(7)).collect();
        for a in els.iter().take(40) {
            for b in els.iter().take(40) {
                let common: Vec<&Vec<u8>> = pts
                    .iter()
                    .filter(|x| a.contains_vector(x).unwrap() && b.contains_vector(x).unwrap())
                    .collect();
                let expected = Subspace::span(f, 2 * n, &common).unwrap();
                let got = a.intersect(b).unwrap();
                assert_eq!(got, expected);
                assert_eq!(got.points().len(), common.len());
            }
        }
    }
}

#[test]
fn collineations_preserve_orthogonality_both_ways() {
    for (n, p) in [(2, 2), (2, 3), (3, 2)] {
        let sp = space(n, p);
        let f = sp.field();
        let geo = Geometry::new(&sp);
        let pts = geo.points().elements();
        for seed in 0..5 {
            let c = random_collineation(&sp, seed);
            assert!(c.preserves_form(&sp));
            let h = c.to_point_map(&geo);
            assert!(h.is_bijective(&geo));
            for (i, s) in pts.iter().enumerate() {
                for (j, u) in pts.iter().enumerate() {
                    let before = omega(f, n, s.row(0), u.row(0)) == 0;
                    let (hs, hu) = (geo.points().get(h.apply(i)), geo.points().get(h.apply(j)));
                    let after = omega(f, n, hs.row(0), hu.row(0)) == 0;
                    assert_eq!(before, after, "({n},{p}) seed {seed} pair {i},{j}");
                }
            }
        }
    }
}

#[test]
fn identity_word_is_identity_map() {
    let sp = space(2, 3);
    let geo = Geometry::new(&sp);
    let h = Collineation::from_transvections(&sp, &[]).to_point_map(&geo);
    assert!(h.table().iter().enumerate().all(|(i, &j)| i == j));
}

#[test]
fn recognition_examples() {
    for (n, p) in [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3), (3, 5)] {
        let sp = space(n, p);
        let sigma = recognize(&sp, SymplecticBase::standard(&sp).points()).unwrap();
        assert_eq!(sigma, (0..2 * n).map(|i| (i + n) % (2 * n)).collect::<Vec<_>>());
    }
    let sp = space(2, 2);
    let bad = vec![sp.unit(0), sp.unit(1), sp.unit(2), vec![1, 0, 1, 0]];
    assert!(recognize(&sp, &bad).is_err());
    assert!(recognize(&sp, &bad[..3]).is_err());
}

#[test]
fn perturbations_always_recognized() {
    for (n, p) in [(2, 2), (2, 3), (3, 2)] {
        let sp = space(n, p);
        let f = sp.field();
        let b = SymplecticBase::standard(&sp);
        for c in f.nonzero() {
            let c = f.element(c as i64);
            for i in 0..2 * n {
                let one = b.perturb_one(&sp, i, c).unwrap();
                assert_eq!(recognize(&sp, one.points()).unwrap(), b.sigma());
                for j in 0..2 * n {
                    if j == i || j == b.partner(i) {
                        assert!(b.perturb_pair(&sp, i, j, c).is_err());
                        continue;
                    }
                    let two = b.perturb_pair(&sp, i, j, c).unwrap();
                    assert_eq!(recognize(&sp, two.points()).unwrap(), b.sigma());
                }
            }
        }
    }
    let sp = space(3, 2);
    let b = SymplecticBase::standard(&sp).perturb_pair(&sp, 0, 1, sp.field().element(1)).unwrap();
    assert_eq!(b.point(0), &[1, 1, 0, 0, 0, 0]);
    assert_eq!(b.point(4), &[0, 0, 0, 1, 1, 0]);
    let sp3 = space(2, 3);
    let std = SymplecticBase::standard(&sp3);
    let one = std.perturb_one(&sp3, 0, sp3.field().element(1)).unwrap();
    let two = std.perturb_one(&sp3, 0, sp3.field().element(2)).unwrap();
    assert_ne!(base_pair_key(&one), base_pair_key(&two));
}

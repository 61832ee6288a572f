//! Algebraic and combinatorial invariants over random inputs.

use std::sync::OnceLock;

use proptest::prelude::*;

use symgrass::base_subset::{common_base_subset, BaseSubset};
use symgrass::bases::{random_base, random_collineation, SymplecticBase};
use symgrass::grassmannian::{ortho_adjacent, Geometry};
use symgrass::linalg::Subspace;
use symgrass::reconstruction::{descend, induce};
use symgrass::space::SymplecticSpace;

const SPACES: [(usize, u32); 3] = [(2, 2), (2, 3), (3, 2)];

fn geometry(which: usize) -> &'static Geometry {
    static CELLS: [OnceLock<Geometry>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CELLS[which].get_or_init(|| {
        let (n, p) = SPACES[which];
        Geometry::new(&SymplecticSpace::standard(n, p).unwrap())
    })
}

fn vectors(dim: usize, p: u32, max_rows: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(0..p as u8, dim), 0..=max_rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent_and_order_free(rows in vectors(6, 3, 5), shift in 0usize..5) {
        let sp = SymplecticSpace::standard(3, 3).unwrap();
        let f = sp.field();
        let s = Subspace::span(f, 6, &rows).unwrap();
        let again: Vec<&[u8]> = s.rows().collect();
        prop_assert_eq!(&Subspace::span(f, 6, &again).unwrap(), &s);
        let mut rotated = rows.clone();
        if !rotated.is_empty() {
            let r = shift % rotated.len();
            rotated.rotate_left(r);
        }
        rotated.reverse();
        prop_assert_eq!(&Subspace::span(f, 6, &rotated).unwrap(), &s);
    }

    #[test]
    fn dimension_formula(a in vectors(6, 2, 4), b in vectors(6, 2, 4)) {
        let f = SymplecticSpace::standard(3, 2).unwrap().field();
        let s = Subspace::span(f, 6, &a).unwrap();
        let u = Subspace::span(f, 6, &b).unwrap();
        let sum = s.join(&u).unwrap();
        let meet = s.intersect(&u).unwrap();
        prop_assert_eq!(sum.vdim() + meet.vdim(), s.vdim() + u.vdim());
        prop_assert!(sum.contains(&s).unwrap() && s.contains(&meet).unwrap());
    }

    #[test]
    fn perp_is_an_involution(rows in vectors(4, 5, 3)) {
        let sp = SymplecticSpace::standard(2, 5).unwrap();
        let s = Subspace::span(sp.field(), 4, &rows).unwrap();
        let perp = sp.perp(&s).unwrap();
        prop_assert_eq!(perp.vdim() + s.vdim(), 4);
        prop_assert_eq!(sp.perp(&perp).unwrap(), s.clone());
        for x in perp.rows() {
            for y in s.rows() {
                prop_assert_eq!(sp.form(x, y), 0);
            }
        }
    }

    #[test]
    fn contains_agrees_with_points(a in vectors(4, 3, 3), b in vectors(4, 3, 2)) {
        let f = SymplecticSpace::standard(2, 3).unwrap().field();
        let s = Subspace::span(f, 4, &a).unwrap();
        let u = Subspace::span(f, 4, &b).unwrap();
        let by_points = u.points().iter().all(|x| s.contains_vector(x).unwrap());
        prop_assert_eq!(s.contains(&u).unwrap(), by_points);
    }

    #[test]
    fn plus_and_minus_partition(which in 0usize..3, seed in any::<u64>(), k_raw in 0usize..3, i_raw in 0usize..6) {
        let geo = geometry(which);
        let sp = geo.space();
        let n = sp.n();
        let (k, i) = (k_raw % n, i_raw % (2 * n));
        let bs = BaseSubset::generate(sp, &random_base(sp, seed), k).unwrap();
        let (plus, minus) = (bs.plus(i), bs.minus(i));
        prop_assert!(plus.is_disjoint(minus));
        prop_assert_eq!(plus.union(minus), bs.full());
        for pos in plus.iter() {
            prop_assert!(bs.member(pos).has(i));
        }
    }

    #[test]
    fn adjacency_count_ignores_labels(which in 0usize..3, seed in any::<u64>(), perm_seed in 0usize..48, s_raw in any::<usize>(), u_raw in any::<usize>()) {
        let geo = geometry(which);
        let sp = geo.space();
        let n = sp.n();
        let b = random_base(sp, seed);
        // permute the pairs and optionally swap inside each pair
        let mut order: Vec<usize> = (0..n).collect();
        let mut r = perm_seed;
        for j in (1..n).rev() {
            order.swap(j, r % (j + 1));
            r /= j + 1;
        }
        let mut perm = vec![0; 2 * n];
        for (slot, &pair) in order.iter().enumerate() {
            let flip = (perm_seed >> slot) & 1 == 1;
            let (a, c) = if flip { (b.partner(pair), pair) } else { (pair, b.partner(pair)) };
            perm[slot] = a;
            perm[slot + n] = c;
        }
        let relabelled = b.relabel(&perm);
        let k = n - 1;
        let one = BaseSubset::generate(sp, &b, k).unwrap();
        let two = BaseSubset::generate(sp, &relabelled, k).unwrap();
        let s = s_raw % one.len();
        let u = u_raw % one.len();
        prop_assume!(s != u);
        let s2 = two.position_of(&one.member(s).subspace).unwrap();
        let u2 = two.position_of(&one.member(u).subspace).unwrap();
        prop_assert_eq!(one.adjacency_count(s, u).unwrap(), two.adjacency_count(s2, u2).unwrap());
    }

    #[test]
    fn induction_is_functorial(which in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>(), k_raw in 0usize..3) {
        let geo = geometry(which);
        let sp = geo.space();
        let k = k_raw % sp.n();
        let h1 = random_collineation(sp, s1).to_point_map(geo);
        let h2 = random_collineation(sp, s2).to_point_map(geo);
        let both = induce(&h2.compose(&h1).unwrap(), geo, geo, k).unwrap();
        let separately = induce(&h2, geo, geo, k).unwrap().compose(&induce(&h1, geo, geo, k).unwrap()).unwrap();
        prop_assert_eq!(both.table(), separately.table());
    }

    #[test]
    fn descent_undoes_induction(which in 0usize..3, seed in any::<u64>(), k_raw in 1usize..3) {
        let geo = geometry(which);
        let sp = geo.space();
        let k = 1 + (k_raw - 1) % (sp.n() - 1);
        let h = random_collineation(sp, seed).to_point_map(geo);
        let step = descend(&induce(&h, geo, geo, k).unwrap(), geo, geo).unwrap();
        prop_assert!(step.checks.iter().all(|c| c.pass));
        let lower = induce(&h, geo, geo, k - 1).unwrap();
        let upper = step.map.unwrap();
        prop_assert_eq!(upper.table(), lower.table());
    }

    #[test]
    fn stars_meet_in_at_most_one_element(which in 0usize..3, k_raw in 1usize..3, a_raw in any::<usize>(), b_raw in any::<usize>()) {
        let geo = geometry(which);
        let sp = geo.space();
        let k = 1 + (k_raw - 1) % (sp.n() - 1);
        let stars = geo.stars(k);
        let size = stars[0].len();
        prop_assert!(stars.iter().all(|s| s.len() == size));
        let (a, b) = (a_raw % stars.len(), b_raw % stars.len());
        prop_assume!(a != b);
        let shared = stars[a].iter().filter(|x| stars[b].contains(x)).count();
        let low = geo.level(k - 1);
        let oa = ortho_adjacent(sp, low.get(a), low.get(b)).unwrap();
        prop_assert!(shared <= 1);
        prop_assert_eq!(shared == 1, oa);
    }

    #[test]
    fn common_base_subset_spans_both(which in 0usize..3, k_raw in 0usize..3, a_raw in any::<usize>(), b_raw in any::<usize>()) {
        let geo = geometry(which);
        let sp = geo.space();
        let k = k_raw % sp.n();
        let level = geo.level(k);
        let (s, u) = (level.get(a_raw % level.len()), level.get(b_raw % level.len()));
        let base: SymplecticBase = common_base_subset(sp, s, u).unwrap();
        let bs = BaseSubset::generate(sp, &base, k).unwrap();
        prop_assert!(bs.position_of(s).is_some());
        prop_assert!(bs.position_of(u).is_some());
    }
}

use std::collections::BTreeSet;
use std::sync::Arc;

use gcover::complex::standard::{genus2_10, octahedron, torus7};
use gcover::complex::SComplex;
use gcover::estimates::{arithmetic_bound, genus_lower_bound, sphere_zpk_bound};
use gcover::gcomplex::GComplex;
use gcover::graphct::{bouquet_ct, graph_covering_type};
use gcover::group::{Perm, PermGroup};
use gcover::surface::{
    expand_for_lift, find_generating_vector, jungerman_ringel, rh_genus, rh_quotient_genus,
    BranchingData,
};
use num_rational::Ratio;
use proptest::prelude::*;

fn perm(degree: usize) -> impl Strategy<Value = Perm> {
    Just((0..degree).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Perm::new(v).unwrap())
}

/// Groups of order at most 24: subgroups of S₄, or elementary abelian groups
/// generated by disjoint transpositions.
fn small_group() -> impl Strategy<Value = PermGroup> {
    prop_oneof![
        prop::collection::vec(perm(4), 1..=3)
            .prop_map(|gens| PermGroup::generate(4, gens).unwrap()),
        (1usize..=4).prop_map(|k| {
            let gens = (0..k)
                .map(|i| Perm::from_cycles(8, &[&[2 * i, 2 * i + 1]]).unwrap())
                .collect();
            PermGroup::generate(8, gens).unwrap()
        }),
        (1usize..=12).prop_map(PermGroup::cyclic),
    ]
}

fn closure(g: &PermGroup, gens: &[usize]) -> Vec<usize> {
    let mut set: BTreeSet<usize> = BTreeSet::from([0]);
    let mut frontier = vec![0];
    while let Some(x) = frontier.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// Every subgroup of a group of order ≤ 24 is generated by at most four elements.
fn brute_force_subgroups(g: &PermGroup) -> BTreeSet<Vec<usize>> {
    let n = g.order();
    let mut out = BTreeSet::new();
    let mut gens = Vec::new();
    fn rec(
        g: &PermGroup,
        n: usize,
        start: usize,
        gens: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        out.insert(closure(g, gens));
        if gens.len() == 4 {
            return;
        }
        for x in start..n {
            gens.push(x);
            rec(g, n, x + 1, gens, out);
            gens.pop();
        }
    }
    rec(g, n, 1, &mut gens, &mut out);
    out
}

fn shift(n: usize, k: usize) -> Perm {
    Perm::new((0..n).map(|i| (i + k) % n).collect()).unwrap()
}

/// A complex on `Z_n` closed under the shift by `n / m`, with `Z_m` acting by that shift.
fn cyclic_g_complex() -> impl Strategy<Value = GComplex> {
    (2usize..=4, 1usize..=3)
        .prop_flat_map(|(m, k)| {
            let n = m * k.max(2);
            let simplex = prop::collection::btree_set(0..n, 1..=3);
            (Just(m), Just(n), prop::collection::vec(simplex, 1..=4))
        })
        .prop_map(|(m, n, seeds)| {
            let step = n / m;
            let mut tops = BTreeSet::new();
            for s in &seeds {
                for j in 0..m {
                    let mut t: Vec<usize> = s.iter().map(|&v| (v + j * step) % n).collect();
                    t.sort_unstable();
                    tops.insert(t);
                }
            }
            let tops: Vec<Vec<usize>> = tops.into_iter().collect();
            let k = SComplex::from_maximal(n, &tops).unwrap();
            GComplex::build_action(k, Arc::new(PermGroup::cyclic(m)), vec![shift(n, step)]).unwrap()
        })
}

fn connected_graph() -> impl Strategy<Value = SComplex> {
    (3usize..=9)
        .prop_flat_map(|n| {
            let extra = prop::collection::vec((0..n, 0..n), 0..=10);
            (Just(n), extra)
        })
        .prop_map(|(n, extra)| {
            let mut edges: BTreeSet<[usize; 2]> = (1..n).map(|i| [i / 2, i]).collect();
            for (a, b) in extra {
                if a != b {
                    edges.insert([a.min(b), a.max(b)]);
                }
            }
            let edges: Vec<[usize; 2]> = edges.into_iter().collect();
            SComplex::from_maximal(n, &edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbit_stabilizer_and_lagrange(g in small_group()) {
        for x in 0..g.degree() {
            let act = |h: usize, p: &usize| g.element(h).apply(*p);
            let orbit = g.orbit(act, &x);
            let stab = g.stabilizer(act, &x);
            prop_assert_eq!(orbit.len() * stab.order(), g.order());
        }
        for h in g.subgroups() {
            prop_assert_eq!(g.order() % h.order(), 0);
            prop_assert_eq!(h.index() * h.order(), g.order());
        }
    }

    #[test]
    fn multiplication_matches_composition(g in small_group()) {
        for a in 0..g.order() {
            prop_assert_eq!(g.mul(a, g.inv(a)), 0);
            for b in 0..g.order() {
                let ab = g.element(a).compose(g.element(b));
                prop_assert_eq!(g.element(g.mul(a, b)), &ab);
            }
        }
    }

    #[test]
    fn subgroups_match_brute_force(g in small_group()) {
        let found: BTreeSet<Vec<usize>> = g
            .subgroups()
            .iter()
            .map(|h| {
                let mut e = h.elements().to_vec();
                e.sort_unstable();
                e
            })
            .collect();
        prop_assert_eq!(found.len(), g.subgroups().len());
        prop_assert_eq!(found, brute_force_subgroups(&g));
    }

    #[test]
    fn orbit_type_poset_is_a_partial_order(g in small_group()) {
        let p = g.orbit_type_poset();
        let n = p.len();
        for a in 0..n {
            prop_assert!(p.leq(a, a));
            for b in 0..n {
                if a != b && p.leq(a, b) {
                    prop_assert!(!p.leq(b, a));
                    prop_assert!(p.classes()[a].representative.order() < p.classes()[b].representative.order());
                }
                for c in 0..n {
                    if p.leq(a, b) && p.leq(b, c) {
                        prop_assert!(p.leq(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn prime_power_cyclic_posets_are_chains(p in prop::sample::select(vec![2usize, 3, 5]), k in 0u32..=3) {
        let n = p.pow(k);
        prop_assume!(n <= 64);
        let poset = PermGroup::cyclic(n).orbit_type_poset();
        prop_assert!(poset.is_chain());
        prop_assert_eq!(poset.len(), k as usize + 1);
    }

    #[test]
    fn riemann_hurwitz_round_trip(
        g_prime in 0usize..5,
        m in 2usize..13,
        picks in prop::collection::vec(0usize..12, 0..6),
    ) {
        let divisors: Vec<usize> = (2..=m).filter(|d| m % d == 0).collect();
        let periods: Vec<usize> = picks.iter().map(|&i| divisors[i % divisors.len()]).collect();
        let data = BranchingData::new(g_prime, m, periods.clone()).unwrap();
        let g = rh_genus(&data);
        let chi_total = Ratio::from_integer(2) - g * 2;
        let orbifold = Ratio::from_integer(2 - 2 * g_prime as i64)
            - periods.iter().map(|&p| Ratio::new(p as i64 - 1, p as i64)).sum::<Ratio<i64>>();
        prop_assert_eq!(chi_total, orbifold * m as i64);
        if let Ok(genus) = data.genus() {
            prop_assert_eq!(rh_quotient_genus(genus, m, &periods), Ratio::from_integer(g_prime as i64));
        }
    }

    #[test]
    fn bouquet_formula_characterization(h in 1usize..1_000_000_000_000) {
        let n = bouquet_ct(h) as u128;
        let h = h as u128;
        prop_assert!((n - 2) * (n - 3) / 2 < h);
        prop_assert!(h <= (n - 1) * (n - 2) / 2);
    }

    #[test]
    fn jungerman_ringel_is_minimal_and_monotone(genus in 0usize..500, orientable in any::<bool>()) {
        prop_assume!(orientable || genus >= 1);
        let n = jungerman_ringel(genus, orientable).unwrap();
        let deficit = if orientable { 2 * genus } else { genus } as i64;
        let heawood = |n: i64| (n - 3) * (n - 4) >= 6 * deficit;
        let exceptional = if orientable { genus == 2 } else { genus == 2 || genus == 3 };
        let base = n as i64 - exceptional as i64;
        prop_assert!(base >= 4 && heawood(base));
        prop_assert!(base == 4 || !heawood(base - 1));
        let next = jungerman_ringel(genus + 1, orientable).unwrap();
        prop_assert!(next >= n);
    }

    #[test]
    fn estimate_cross_consistency(n in 1u64..200, d in 1u64..200, k in 1u32..4) {
        let ones = vec![1; n as usize];
        let a = arithmetic_bound(&ones).unwrap().lower;
        prop_assert_eq!(a, (n + 1) * (n + 2) / 2);
        prop_assert_eq!(a, genus_lower_bound(n + 1).unwrap().lower);
        let q = 3u64.pow(k);
        prop_assert_eq!(sphere_zpk_bound(d, q, q).unwrap().lower, genus_lower_bound(d).unwrap().lower);
        let g0 = genus_lower_bound(n).unwrap().lower;
        let g1 = genus_lower_bound(n + 1).unwrap().lower;
        prop_assert_eq!(g1 - g0, n + 1);
    }

    #[test]
    fn generating_vectors_verify(m in 2usize..=12, g_prime in 0usize..=1, picks in prop::collection::vec(0usize..12, 0..=4)) {
        let divisors: Vec<usize> = (2..=m).filter(|d| m % d == 0).collect();
        let periods: Vec<usize> = picks.iter().map(|&i| divisors[i % divisors.len()]).collect();
        let g = PermGroup::cyclic(m);
        if let Some(gv) = find_generating_vector(&g, g_prime, &periods, 200_000).unwrap() {
            prop_assert!(gv.verify(&g, g_prime, &periods).is_ok());
            let data = BranchingData::new(g_prime, m, periods.clone()).unwrap();
            prop_assert!(data.genus().is_ok());
        }
    }

    #[test]
    fn expansion_separates_branch_vertices(
        which in 0usize..3,
        mask in prop::collection::vec(any::<bool>(), 10),
    ) {
        let k = [octahedron(), torus7(), genus2_10()][which].clone();
        let branch: Vec<usize> = (0..k.num_vertices()).filter(|&v| mask[v]).collect();
        let e = expand_for_lift(&k, &branch).unwrap();
        let before = k.is_closed_surface().unwrap();
        prop_assert_eq!(e.is_closed_surface(), Some(before));
        prop_assert!(e.num_vertices() <= k.num_vertices() + k.f_vector()[1] + k.f_vector()[2]);
        for edge in e.simplices(1) {
            prop_assert!(!(branch.contains(&edge[0]) && branch.contains(&edge[1])));
        }
    }

    #[test]
    fn trivial_action_on_a_graph_is_a_bouquet(k in connected_graph()) {
        let (b0, b1) = k.graph_betti().unwrap();
        prop_assert_eq!(b0, 1);
        prop_assert_eq!(b1 as i64, k.f_vector()[1] as i64 - k.num_vertices() as i64 + 1);
        let x = GComplex::trivial(k, Arc::new(PermGroup::cyclic(1)));
        prop_assert_eq!(graph_covering_type(&x).unwrap().total, bouquet_ct(b1));
    }

    #[test]
    fn subdivision_preserves_euler_characteristic(x in cyclic_g_complex()) {
        let sd = x.subdivide();
        prop_assert_eq!(sd.complex().euler_characteristic(), x.complex().euler_characteristic());
        let f = x.equivariant_f_vector();
        prop_assert_eq!(f.expanded(x.group().order()), x.complex().f_vector());
    }

    #[test]
    fn regularize_yields_strictly_regular_actions(x in cyclic_g_complex()) {
        let (y, rounds) = x.regularize();
        prop_assert!(rounds <= 2);
        prop_assert!(y.regularity().is_strictly_regular());
        let q = y.quotient().unwrap();
        let orbits: BTreeSet<usize> = y.vertex_orbits().into_iter().collect();
        prop_assert_eq!(q.complex.num_vertices(), orbits.len());
        prop_assert_eq!(q.complex.f_vector(), y.equivariant_f_vector().orbit_counts);
    }
}

mod common;

use common::{point, rat};
use padic_vc_lab::sets::{compact_locus, CylinderSet, GammaExhaustion, WindowSet};
use proptest::prelude::*;

fn arb_cylinder(p: u64, max_level: u32) -> impl Strategy<Value = CylinderSet> {
    (1..=max_level).prop_flat_map(move |level| {
        let modulus = p.pow(level);
        prop::collection::btree_set(0..modulus, 0..=modulus as usize)
            .prop_map(move |rs| CylinderSet::new(p, 1, level, rs.into_iter().map(|r| vec![r])).unwrap())
    })
}

fn arb_window() -> impl Strategy<Value = WindowSet> {
    let pt = (-20i64..20, 0u32..3).prop_map(|(a, s)| rat(a, 3i64.pow(s)));
    (
        0i64..2,
        arb_cylinder(3, 2),
        prop::collection::vec(pt.clone(), 0..3),
        prop::collection::vec(pt, 0..2),
        any::<bool>(),
    )
        .prop_map(|(scale, core, punct, added, tail)| {
            WindowSet::new(
                scale,
                core,
                punct.iter().map(|x| point(3, x)).collect(),
                added.iter().map(|x| point(3, x)).collect(),
                tail,
            )
            .unwrap()
        })
}

fn probes() -> Vec<padic_vc_lab::sets::Point> {
    let mut out = Vec::new();
    for s in 0..4u32 {
        for a in -30i64..30 {
            out.push(point(3, &rat(a, 3i64.pow(s))));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn refinement_keeps_measure(d in arb_cylinder(3, 3)) {
        let fine = d.refine_to(d.level() + 1).unwrap();
        prop_assert_eq!(fine.measure(), d.measure());
        prop_assert!(fine.same_set(&d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn measure_is_additive(a in arb_cylinder(3, 3), b in arb_cylinder(3, 3)) {
        let u = a.union(&b).unwrap().measure();
        let i = a.intersect(&b).unwrap().measure();
        prop_assert_eq!(u + i, a.measure() + b.measure());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn boolean_ops_match_membership(a in arb_window(), b in arb_window()) {
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        let d = a.difference(&b).unwrap();
        let c = a.complement().unwrap();
        for x in probes() {
            let (ia, ib) = (a.contains(&x), b.contains(&x));
            prop_assert_eq!(u.contains(&x), ia || ib);
            prop_assert_eq!(i.contains(&x), ia && ib);
            prop_assert_eq!(d.contains(&x), ia && !ib);
            prop_assert_eq!(c.contains(&x), !ia);
        }
        prop_assert_eq!(a.union(&a.complement().unwrap()).unwrap().complement().unwrap().is_empty(), true);
    }

    #[test]
    fn window_json_round_trips(a in arb_window()) {
        let back: WindowSet = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert!(back.same_set(&a).unwrap());
    }

    #[test]
    fn compact_sets_are_bounded_by_the_exhaustion(a in arb_window()) {
        let e = GammaExhaustion::standard(3, 1).unwrap();
        let g = e.bounded_by(&a).unwrap();
        prop_assert_eq!(g.is_some(), a.is_bounded());
        if let Some(g) = g {
            for x in probes().iter().filter(|x| a.contains(x)) {
                prop_assert!(e.contains(g, &[x[0].to_rational()]));
            }
            if g > -10 {
                prop_assert!(a.is_subset(&e.level_set(g).unwrap()).unwrap());
                prop_assert!(!a.is_subset(&e.level_set(g - 1).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn compactness_matches_adherence_oracle() {
    let corpus = common::window_corpus(3, 300, 5);
    for (i, entry) in corpus.iter().enumerate() {
        assert_eq!(
            entry.set.is_definably_compact(),
            common::compact_by_adherence(entry, 3),
            "corpus entry {i}"
        );
    }
    let sets: Vec<WindowSet> = corpus.iter().map(|e| e.set.clone()).collect();
    let locus = compact_locus(&sets);
    assert!(locus.iter().all(|&i| sets[i].is_definably_compact()));
}

#[test]
fn exhaustion_union_clauses() {
    let e0 = GammaExhaustion::standard(3, 1).unwrap();
    let e1 = GammaExhaustion::centered(3, vec![rat(1, 1)]).unwrap();
    let e2 = GammaExhaustion::centered(3, vec![rat(1, 9)]).unwrap();
    let u = GammaExhaustion::union(&[e0.clone(), e1.clone(), e2.clone()]).unwrap();
    let pts = probes();
    for gamma in -3..=3 {
        let w = u.level_set(gamma).unwrap();
        // each level is clopen and definably compact
        assert!(w.is_definably_compact());
        assert!(w.complement().unwrap().is_closed());
        // increasing
        assert!(w.is_subset(&u.level_set(gamma + 1).unwrap()).unwrap());
        // it is the union of the parts
        for part in [&e0, &e1, &e2] {
            assert!(part.level_set(gamma).unwrap().is_subset(&w).unwrap());
        }
        for x in &pts {
            let xr = vec![x[0].to_rational()];
            let any = [&e0, &e1, &e2].iter().any(|e| e.contains(gamma, &xr));
            assert_eq!(u.contains(gamma, &xr), any);
            assert_eq!(w.contains(x), any);
        }
    }
    // every point lies in some level
    for x in &pts {
        let xr = vec![x[0].to_rational()];
        assert!((-3..=10).any(|g| u.contains(g, &xr)));
    }
    let same = GammaExhaustion::union(&[e0.clone(), e0.clone()]).unwrap();
    for gamma in -2..=2 {
        assert!(same.level_set(gamma).unwrap().same_set(&e0.level_set(gamma).unwrap()).unwrap());
    }
}

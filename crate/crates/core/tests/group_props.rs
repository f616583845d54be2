mod common;

use common::quotient;
use num_traits::{One, Zero};
use padic_vc_lab::groups::{FiniteQuotient, GroupDescriptor, GroupKind};
use padic_vc_lab::sets::CylinderSet;
use padic_vc_lab::Rational;
use rand::Rng;

fn instances() -> Vec<FiniteQuotient> {
    vec![
        quotient(GroupKind::Additive { n: 1 }, 2, 4),
        quotient(GroupKind::Additive { n: 1 }, 5, 4),
        quotient(GroupKind::Additive { n: 2 }, 3, 2),
        quotient(GroupKind::Units, 2, 4),
        quotient(GroupKind::Units, 3, 4),
        quotient(GroupKind::Units, 5, 3),
        quotient(GroupKind::PrincipalUnits, 2, 4),
        quotient(GroupKind::PrincipalUnits, 3, 4),
        quotient(GroupKind::PrincipalUnits, 5, 4),
        quotient(GroupKind::Heisenberg, 2, 3),
        quotient(GroupKind::Heisenberg, 3, 2),
    ]
}

#[test]
fn group_axioms() {
    let mut rng = common::rng(1);
    for q in instances() {
        assert!(q.len() <= 10_000);
        let e = q.index_of(&q.identity()).unwrap();
        for i in 0..q.len() {
            assert_eq!(q.op_index(e, i), i);
            assert_eq!(q.op_index(i, e), i);
            let inv = q.index_of(&q.inv(q.element(i))).unwrap();
            assert_eq!(q.op_index(i, inv), e);
            assert_eq!(q.op_index(inv, i), e);
        }
        // closure is implicit in op_index; associativity exhaustively on small
        // instances and on 10^5 random triples otherwise
        let n = q.len();
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        assert_eq!(q.op_index(q.op_index(a, b), c), q.op_index(a, q.op_index(b, c)));
                    }
                }
            }
        } else {
            for _ in 0..100_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                assert_eq!(q.op_index(q.op_index(a, b), c), q.op_index(a, q.op_index(b, c)));
            }
        }
    }
}

#[test]
fn heisenberg_is_not_abelian() {
    let q = quotient(GroupKind::Heisenberg, 3, 1);
    assert_ne!(q.op(&[1, 0, 0], &[0, 1, 0]), q.op(&[0, 1, 0], &[1, 0, 0]));
}

#[test]
fn measure_axioms_and_invariance() {
    let mut rng = common::rng(2);
    for q in instances() {
        let empty = CylinderSet::empty(q.p(), q.dim(), q.level()).unwrap();
        assert!(q.haar_measure(&empty).unwrap().is_zero());
        assert!(q.haar_measure(&q.carrier()).unwrap().is_one());
        for _ in 0..1000 {
            let d = q.random_cylinder(&mut rng);
            let d2 = q.random_cylinder(&mut rng);
            let a = q.element(rng.gen_range(0..q.len())).clone();
            let mu = q.haar_measure(&d).unwrap();
            let counted = Rational::new(q.subset_indices(&d).unwrap().len().into(), q.len().into());
            assert_eq!(mu, counted);
            assert!(mu >= Rational::zero() && mu <= Rational::one());
            let u = q.haar_measure(&d.union(&d2).unwrap()).unwrap();
            let i = q.haar_measure(&d.intersect(&d2).unwrap()).unwrap();
            assert_eq!(u + i, &mu + q.haar_measure(&d2).unwrap());
            let t = q.translate_set(&a, &d).unwrap();
            assert_eq!(t.level(), d.level());
            assert_eq!(q.haar_measure(&t).unwrap(), mu);
            assert_eq!(q.subset_indices(&t).unwrap().len(), t.refine_to(q.level()).unwrap().len());
        }
    }
}

#[test]
fn reduction_is_compatible() {
    let mut rng = common::rng(3);
    for (kind, p, m) in [
        (GroupKind::Units, 3u64, 2u32),
        (GroupKind::Additive { n: 1 }, 2, 3),
        (GroupKind::PrincipalUnits, 5, 2),
        (GroupKind::Heisenberg, 2, 2),
    ] {
        let coarse = quotient(kind, p, m);
        let fine = quotient(kind, p, m + 1);
        let map = fine.reduction_map(&coarse).unwrap();
        for _ in 0..200 {
            let d = coarse.random_cylinder(&mut rng);
            assert_eq!(coarse.haar_measure(&d).unwrap(), fine.haar_measure(&d).unwrap());
            let coarse_idx = coarse.subset_indices(&d).unwrap();
            let pulled = map.iter().filter(|&&c| coarse_idx.contains(&c)).count();
            assert_eq!(pulled, fine.subset_indices(&d).unwrap().len());
        }
    }
}

#[test]
fn descriptor_json() {
    let g: GroupDescriptor = serde_json::from_str(r#"{"kind":"additive","n":2,"p":3,"level":2}"#).unwrap();
    assert_eq!(g.quotient().unwrap().len(), 81);
    let back: GroupDescriptor = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
    assert_eq!(back, g);
    let u: GroupDescriptor = serde_json::from_str(r#"{"kind":"units","p":3,"level":3}"#).unwrap();
    assert_eq!(u.quotient().unwrap().len(), 18);
    assert!(serde_json::from_str::<GroupDescriptor>(r#"{"kind":"units","p":4,"level":3}"#)
        .map_err(|e| e.to_string())
        .and_then(|g| g.quotient().map_err(|e| e.to_string()))
        .is_err());
}

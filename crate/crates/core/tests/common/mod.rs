//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use padic_vc_lab::groups::{CompactGroupScheme, FiniteQuotient, GroupKind};
use padic_vc_lab::sets::{CylinderSet, Point, WindowSet};
use padic_vc_lab::vc::{shatter_count, SetSystem};
use padic_vc_lab::{PadicApprox, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn quotient(kind: GroupKind, p: u64, m: u32) -> FiniteQuotient {
    CompactGroupScheme::new(kind, p).unwrap().quotient(m).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest `s` such that some `s`-subset of the ground set is shattered, by
/// trying every subset of size up to `max`.
pub fn brute_vc(sys: &SetSystem, max: usize) -> usize {
    let n = sys.ground().len();
    let mut best = 0;
    for size in 1..=max.min(n) {
        let mut found = false;
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if shatter_count(sys, &idx) == 1 << size {
                found = true;
                break;
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
        if !found {
            break;
        }
        best = size;
    }
    best
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn point(p: u64, x: &Rational) -> Point {
    vec![PadicApprox::from_rational(p, x, 40).unwrap()]
}

fn pow(p: u64, e: u32) -> Rational {
    Rational::from_integer(BigInt::from(p).pow(e))
}

/// A one-dimensional window set together with every point that was passed
/// in as an exceptional point before normalization.
pub struct CorpusEntry {
    pub set: WindowSet,
    pub probes: Vec<Rational>,
}

/// Closed: no probe outside the set is a limit of set points, where `x` is
/// taken to be a limit when `x + p^r` lies in the set for several large `r`.
/// Bounded: no far-away point of any unit class lies in the set.
pub fn compact_by_adherence(entry: &CorpusEntry, p: u64) -> bool {
    let w = &entry.set;
    let far = (10..13).any(|k| {
        (1..p as i64 * 2)
            .filter(|u| u % p as i64 != 0)
            .any(|u| w.contains(&point(p, &(rat(u, 1) / pow(p, k)))))
    });
    if far {
        return false;
    }
    let mut probes = entry.probes.clone();
    probes.extend((0..(p as i64).pow(3)).map(|a| rat(a, 1)));
    for x in &probes {
        if w.contains(&point(p, x)) {
            continue;
        }
        let adherent = (18..22).all(|r| w.contains(&point(p, &(x + pow(p, r)))));
        if adherent {
            return false;
        }
    }
    true
}

fn random_probe<R: Rng>(rng: &mut R, p: u64) -> Rational {
    let s = rng.gen_range(0..3u32);
    rat(rng.gen_range(-30..30), 1) / pow(p, s)
}

/// Seeded corpus of one-dimensional window sets over `Q_p` with core level
/// at most 3 and at most two punctures.
pub fn window_corpus(p: u64, count: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    // All level-1 cores at scale 0 with punctures drawn from a small pool.
    let pool = [rat(0, 1), rat(1, 1), rat(2, 1), rat(1, 3), rat(-1, 9)];
    for mask in 0..1u32 << p.min(3) {
        let residues: Vec<Vec<u64>> = (0..p).filter(|r| mask >> r & 1 == 1).map(|r| vec![r]).collect();
        for a in 0..pool.len() {
            for b in a..pool.len() {
                for tail in [false, true] {
                    let punct: Vec<Rational> = if a == b { vec![pool[a].clone()] } else { vec![pool[a].clone(), pool[b].clone()] };
                    let core = CylinderSet::new(p, 1, 1, residues.clone()).unwrap();
                    let set = WindowSet::new(0, core, punct.iter().map(|x| point(p, x)).collect(), vec![], tail)
                        .unwrap();
                    out.push(CorpusEntry { set, probes: punct });
                }
            }
        }
    }
    while out.len() < count {
        let level = rng.gen_range(1..=3u32);
        let scale = rng.gen_range(0..=1i64);
        let modulus = p.pow(level);
        let residues: Vec<Vec<u64>> = (0..modulus).filter(|_| rng.gen_bool(0.5)).map(|r| vec![r]).collect();
        let punct: Vec<Rational> = (0..rng.gen_range(0..=2)).map(|_| random_probe(&mut rng, p)).collect();
        let added: Vec<Rational> = (0..rng.gen_range(0..=1)).map(|_| random_probe(&mut rng, p)).collect();
        let tail = rng.gen_bool(0.3);
        let core = CylinderSet::new(p, 1, level, residues).unwrap();
        let set = WindowSet::new(
            scale,
            core,
            punct.iter().map(|x| point(p, x)).collect(),
            added.iter().map(|x| point(p, x)).collect(),
            tail,
        )
        .unwrap();
        let probes = punct.into_iter().chain(added).collect();
        out.push(CorpusEntry { set, probes });
    }
    out
}

pub fn random_family(n: usize, members: usize, seed: u64) -> SetSystem {
    let mut rng = rng(seed);
    let fam = (0..members)
        .map(|m| (format!("r{m}"), (0..n).filter(|_| rng.gen_bool(0.4)).collect()))
        .collect();
    SetSystem::new((0..n as u64).map(|i| vec![i]).collect(), fam).unwrap()
}

pub fn coset_family(q: &FiniteQuotient) -> SetSystem {
    // the subgroup of elements congruent to the identity modulo p
    let id = q.identity();
    let sub: Vec<usize> = (0..q.len()).filter(|&i| q.reduce(q.element(i), 1) == q.reduce(&id, 1)).collect();
    SetSystem::new(q.elements().to_vec(), vec![("H".into(), sub)])
        .unwrap()
        .close_under_translation(q)
        .unwrap()
}

pub fn suite() -> Vec<SetSystem> {
    let mut out = vec![
        SetSystem::balls(&quotient(GroupKind::Additive { n: 1 }, 3, 3)),
        SetSystem::balls(&quotient(GroupKind::Units, 3, 3)),
        SetSystem::balls(&quotient(GroupKind::Additive { n: 2 }, 3, 2)),
        coset_family(&quotient(GroupKind::Heisenberg, 2, 2)),
        coset_family(&quotient(GroupKind::Units, 5, 2)),
    ];
    for (i, n) in [10usize, 30, 81].into_iter().enumerate() {
        out.push(random_family(n, 40, 100 + i as u64));
    }
    out
}

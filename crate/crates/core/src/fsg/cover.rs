use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Element, FiniteQuotient};
use crate::rational::{self, Rational};
use crate::sets::CylinderSet;

/// Left translates `a_1 · D, …, a_k · D` found by the greedy cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub translates: Vec<Element>,
    pub covered: bool,
    /// `⌈1/μ(D)⌉`; absent for the empty set.
    pub lower_bound: Option<u64>,
    #[serde(with = "rational::serde_str")]
    pub measure: Rational,
}

impl CoverCertificate {
    pub fn k(&self) -> usize {
        self.translates.len()
    }

    /// Re-checks that the translates cover the quotient.
    pub fn verify(&self, q: &FiniteQuotient, d: &CylinderSet) -> Result<bool> {
        let members = q.subset_indices(d)?;
        let mut seen = FixedBitSet::with_capacity(q.len());
        for a in &self.translates {
            let a = q.index_of(a).ok_or_else(|| Error::UnknownElement(a.clone()))?;
            for &i in &members {
                seen.insert(q.op_index(a, i));
            }
        }
        Ok(seen.is_full())
    }
}

fn translate(q: &FiniteQuotient, a: usize, members: &[usize]) -> Vec<usize> {
    members.iter().map(|&i| q.op_index(a, i)).collect()
}

/// Greedy max-coverage choice of left translates of `D`.
///
/// Each element of the group lies in exactly `|D|` translates, so greedy
/// uses at most `(|G|/|D|)(1 + ln |D|) <= ⌈1/μ(D)⌉ (1 + ln |G|)` translates.
/// Ties go to the smallest element index, so the identity (index 0 in every
/// catalogue group) is tried first.
pub fn greedy_cover(q: &FiniteQuotient, d: &CylinderSet, max_translates: usize) -> Result<CoverCertificate> {
    let members = q.subset_indices(d)?;
    let measure = Rational::new(BigInt::from(members.len()), BigInt::from(q.len()));
    if members.is_empty() {
        return Ok(CoverCertificate {
            translates: vec![],
            covered: false,
            lower_bound: None,
            measure,
        });
    }
    let lower_bound = Some(rational::ceil_u64(&measure.recip()));
    let mut uncovered = FixedBitSet::with_capacity(q.len());
    uncovered.insert_range(..);
    let mut left = q.len();
    // Lazy greedy: stored gains only ever overestimate.
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..q.len()).map(|a| (members.len(), Reverse(a))).collect();
    let mut translates = Vec::new();
    while left > 0 && translates.len() < max_translates {
        let Some((stale, Reverse(a))) = heap.pop() else { break };
        let image = translate(q, a, &members);
        let gain = image.iter().filter(|&&i| uncovered.contains(i)).count();
        if gain < stale {
            if gain > 0 {
                heap.push((gain, Reverse(a)));
            }
            continue;
        }
        for i in image {
            if uncovered.contains(i) {
                uncovered.set(i, false);
                left -= 1;
            }
        }
        translates.push(q.element(a).clone());
    }
    Ok(CoverCertificate {
        translates,
        covered: left == 0,
        lower_bound,
        measure,
    })
}

/// Size of a smallest cover by left translates, by branch and bound.
///
/// Only for quotients with at most 128 elements. Returns `None` if the
/// search visits more than `node_budget` nodes.
pub fn exact_min_cover(q: &FiniteQuotient, d: &CylinderSet, node_budget: u64) -> Result<Option<usize>> {
    if q.len() > 128 {
        return Err(Error::CapExceeded(format!("exact cover needs |G| <= 128, got {}", q.len())));
    }
    let members = q.subset_indices(d)?;
    if members.is_empty() {
        return Ok(None);
    }
    let mut masks: Vec<u128> = (0..q.len())
        .map(|a| translate(q, a, &members).iter().fold(0u128, |m, &i| m | 1 << i))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    masks.sort_unstable();
    let full: u128 = if q.len() == 128 { u128::MAX } else { (1u128 << q.len()) - 1 };
    let covering: Vec<Vec<u128>> = (0..q.len())
        .map(|e| masks.iter().copied().filter(|m| m >> e & 1 == 1).collect())
        .collect();
    let greedy = greedy_cover(q, d, q.len())?.k();
    let mut search = Bnb {
        full,
        covering,
        size: members.len(),
        best: greedy,
        nodes: 0,
        budget: node_budget,
    };
    search.go(0, 0);
    Ok((search.nodes <= search.budget).then_some(search.best))
}

struct Bnb {
    full: u128,
    covering: Vec<Vec<u128>>,
    size: usize,
    best: usize,
    nodes: u64,
    budget: u64,
}

impl Bnb {
    fn go(&mut self, covered: u128, depth: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            return;
        }
        if covered == self.full {
            self.best = self.best.min(depth);
            return;
        }
        let remaining = (self.full & !covered).count_ones() as usize;
        if depth + remaining.div_ceil(self.size) >= self.best {
            return;
        }
        let e = (self.full & !covered).trailing_zeros() as usize;
        for j in 0..self.covering[e].len() {
            let t = self.covering[e][j];
            self.go(covered | t, depth + 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{CompactGroupScheme, GroupKind};

    fn z9() -> FiniteQuotient {
        CompactGroupScheme::new(GroupKind::Additive { n: 1 }, 3).unwrap().quotient(2).unwrap()
    }

    #[test]
    fn cover_of_interval() {
        let q = z9();
        let d = CylinderSet::new(3, 1, 2, [vec![0], vec![1], vec![2]]).unwrap();
        let c = greedy_cover(&q, &d, 100).unwrap();
        assert!(c.covered);
        assert_eq!(c.translates, vec![vec![0], vec![3], vec![6]]);
        assert_eq!(c.lower_bound, Some(3));
        assert!(c.verify(&q, &d).unwrap());
        assert_eq!(exact_min_cover(&q, &d, 1_000_000).unwrap(), Some(3));
    }

    #[test]
    fn whole_and_empty() {
        let q = z9();
        let c = greedy_cover(&q, &q.carrier(), 10).unwrap();
        assert_eq!(c.translates, vec![q.identity()]);
        assert_eq!(c.lower_bound, Some(1));
        let e = greedy_cover(&q, &CylinderSet::empty(3, 1, 2).unwrap(), 10).unwrap();
        assert!(!e.covered);
        assert_eq!(e.lower_bound, None);
    }

    #[test]
    fn runs_out_of_translates() {
        let q = z9();
        let d = CylinderSet::new(3, 1, 2, [vec![0]]).unwrap();
        let c = greedy_cover(&q, &d, 4).unwrap();
        assert!(!c.covered);
        assert_eq!(c.k(), 4);
    }

    #[test]
    fn exact_cover_beats_or_ties_greedy() {
        let q = z9();
        // {0, 1, 3}: a perfect cover would need 3 disjoint translates.
        let d = CylinderSet::new(3, 1, 2, [vec![0], vec![1], vec![3]]).unwrap();
        let greedy = greedy_cover(&q, &d, 100).unwrap().k();
        let exact = exact_min_cover(&q, &d, 1_000_000).unwrap().unwrap();
        assert!(exact <= greedy);
        assert!(exact >= 3);
    }
}

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::SetSystem;
use crate::error::{Error, Result};

/// The exponential search refuses caps above this.
pub const MAX_VC_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VcDimension {
    Exact(usize),
    /// A shattered set of size `cap` exists; the search stopped there.
    AtLeast(usize),
}

impl VcDimension {
    pub fn value(self) -> usize {
        match self {
            VcDimension::Exact(d) | VcDimension::AtLeast(d) => d,
        }
    }
}

impl fmt::Display for VcDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VcDimension::Exact(d) => write!(f, "{d}"),
            VcDimension::AtLeast(d) => write!(f, ">={d}"),
        }
    }
}

struct Search<'a> {
    sys: &'a SetSystem,
    candidates: Vec<usize>,
    cap: usize,
    best: usize,
}

impl Search<'_> {
    /// `classes` partitions the family by trace on the current shattered
    /// set; it has `2^depth` nonempty classes.
    fn extend(&mut self, from: usize, depth: usize, classes: &[Vec<usize>]) {
        self.best = self.best.max(depth);
        if self.best >= self.cap {
            return;
        }
        if depth + (self.candidates.len() - from) <= self.best {
            return;
        }
        if 2 * classes.len() > self.sys.family.len() {
            return;
        }
        for c in from..self.candidates.len() {
            let x = self.candidates[c];
            let mut next = Vec::with_capacity(2 * classes.len());
            let mut ok = true;
            for class in classes {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    class.iter().partition(|&&m| self.sys.family[m].contains(x));
                if inside.is_empty() || outside.is_empty() {
                    ok = false;
                    break;
                }
                next.push(inside);
                next.push(outside);
            }
            if ok {
                self.extend(c + 1, depth + 1, &next);
                if self.best >= self.cap {
                    return;
                }
            }
        }
    }
}

/// Size of the largest shattered subset of the ground set, by depth-first
/// search over increasing index sequences. Shattered sets are closed under
/// subsets, so every one of them is reached. An empty family shatters
/// nothing and reports 0.
pub fn vc_dimension(sys: &SetSystem, cap: usize) -> Result<VcDimension> {
    if cap > MAX_VC_CAP {
        return Err(Error::InvalidArgument(format!("cap {cap} exceeds {MAX_VC_CAP}")));
    }
    if sys.family.is_empty() {
        return Ok(VcDimension::Exact(0));
    }
    // A point in no member, or in every member, lies in no shattered pair
    // and is only shattered alone if some member contains it and some does not.
    let candidates = (0..sys.ground.len())
        .filter(|&x| {
            let k = sys.family.iter().filter(|m| m.contains(x)).count();
            k > 0 && k < sys.family.len()
        })
        .collect();
    let mut search = Search {
        sys,
        candidates,
        cap,
        best: 0,
    };
    let all: Vec<usize> = (0..sys.family.len()).collect();
    search.extend(0, 0, &[all]);
    Ok(if search.best >= cap {
        VcDimension::AtLeast(cap)
    } else {
        VcDimension::Exact(search.best)
    })
}

/// Number of distinct traces `D ∩ points` over the family.
pub fn shatter_count(sys: &SetSystem, points: &[usize]) -> usize {
    let traces: HashSet<Vec<bool>> = sys
        .family
        .iter()
        .map(|m| points.iter().map(|&x| m.contains(x)).collect())
        .collect();
    traces.len()
}

/// `Σ_{i=0}^{k} C(n, i)`, exactly.
pub fn sauer_shelah_bound(k: u64, n: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for i in 0..=k.min(n) {
        if i > 0 {
            binom = binom * (n - i + 1) / i;
        }
        total += &binom;
    }
    total
}

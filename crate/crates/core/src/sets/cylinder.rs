use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::check_prime;
use crate::rational::{self, Rational};

/// A point of `(Z/p^m)^n`, one coordinate per entry.
pub type Residue = Vec<u64>;

/// Upper bound on `p^(m n)` for operations that enumerate the whole level.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// Preimage of a set of residues under coordinatewise reduction
/// `Z_p^n -> (Z/p^m)^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CylinderJson", into = "CylinderJson")]
pub struct CylinderSet {
    p: u64,
    n: usize,
    level: u32,
    residues: BTreeSet<Residue>,
}

#[derive(Serialize, Deserialize)]
struct CylinderJson {
    p: u64,
    n: usize,
    level: u32,
    residues: Vec<Residue>,
}

impl TryFrom<CylinderJson> for CylinderSet {
    type Error = Error;

    fn try_from(j: CylinderJson) -> Result<Self> {
        CylinderSet::new(j.p, j.n, j.level, j.residues)
    }
}

impl From<CylinderSet> for CylinderJson {
    fn from(c: CylinderSet) -> Self {
        CylinderJson {
            p: c.p,
            n: c.n,
            level: c.level,
            residues: c.residues.into_iter().collect(),
        }
    }
}

pub(crate) fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| Error::CapExceeded(format!("{p}^{e} does not fit in a machine word")))
}

impl CylinderSet {
    pub fn new(p: u64, n: usize, level: u32, residues: impl IntoIterator<Item = Residue>) -> Result<Self> {
        check_prime(p).map_err(|e| Error::InvalidSet(e.to_string()))?;
        if n == 0 {
            return Err(Error::InvalidSet("dimension must be at least 1".into()));
        }
        let modulus = checked_pow(p, level)?;
        let residues: BTreeSet<Residue> = residues.into_iter().collect();
        for r in &residues {
            if r.len() != n {
                return Err(Error::DimensionMismatch(n, r.len()));
            }
            if r.iter().any(|&x| x >= modulus) {
                return Err(Error::InvalidSet(format!("residue {r:?} not reduced mod {modulus}")));
            }
        }
        Ok(Self { p, n, level, residues })
    }

    pub fn empty(p: u64, n: usize, level: u32) -> Result<Self> {
        Self::new(p, n, level, [])
    }

    /// All of `Z_p^n`, written at the given level.
    pub fn full(p: u64, n: usize, level: u32) -> Result<Self> {
        let all = all_residues(p, n, level)?;
        Self::new(p, n, level, all)
    }

    /// Ball `{x : v(x_i - c_i) >= level for all i}` around an integer center.
    pub fn ball(p: u64, center: &[u64], level: u32) -> Result<Self> {
        let modulus = checked_pow(p, level)?;
        Self::new(p, center.len(), level, [center.iter().map(|c| c % modulus).collect()])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.level)
    }

    pub fn residues(&self) -> &BTreeSet<Residue> {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains_residue(&self, r: &[u64]) -> bool {
        self.residues.contains(r)
    }

    /// Membership of an exact point given in the set's own coordinates.
    /// Non-integral points are never members.
    pub fn contains_point(&self, x: &[Rational]) -> bool {
        let m = self.modulus();
        let r: Option<Residue> = x.iter().map(|c| rational::residue(c, m)).collect();
        r.is_some_and(|r| self.residues.contains(&r))
    }

    /// Normalized Haar measure on `Z_p^n`: `|residues| / p^(m n)`.
    pub fn measure(&self) -> Rational {
        let total = rational::pow_u(self.p, self.level * self.n as u32);
        Rational::new(BigInt::from(self.residues.len()), BigInt::from(total))
    }

    /// The same set written at a finer level. Each residue splits into `p^n`.
    pub fn refine_to(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::InvalidSet(format!(
                "cannot coarsen level {} to {level}",
                self.level
            )));
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let step = checked_pow(self.p, level - self.level)?;
        let old = self.modulus();
        let fibre = all_digits(step, self.n);
        let mut out = BTreeSet::new();
        for r in &self.residues {
            for j in &fibre {
                out.insert(r.iter().zip(j).map(|(a, b)| a + old * b).collect());
            }
        }
        Ok(Self {
            p: self.p,
            n: self.n,
            level,
            residues: out,
        })
    }

    /// Brings two sets to a common (finer) level.
    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        self.compatible(other)?;
        let level = self.level.max(other.level);
        Ok((self.refine_to(level)?, other.refine_to(level)?))
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    fn with_residues(&self, residues: BTreeSet<Residue>) -> Self {
        Self {
            p: self.p,
            n: self.n,
            level: self.level,
            residues,
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        Ok(a.with_residues(a.residues.union(&b.residues).cloned().collect()))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        Ok(a.with_residues(a.residues.intersection(&b.residues).cloned().collect()))
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        Ok(a.with_residues(a.residues.difference(&b.residues).cloned().collect()))
    }

    /// Complement inside `Z_p^n`.
    pub fn complement(&self) -> Result<Self> {
        let all = all_residues(self.p, self.n, self.level)?;
        Ok(self.with_residues(all.into_iter().filter(|r| !self.residues.contains(r)).collect()))
    }

    /// Set equality regardless of the level each side is written at.
    pub fn same_set(&self, other: &Self) -> bool {
        match self.align(other) {
            Ok((a, b)) => a.residues == b.residues,
            Err(_) => false,
        }
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        let (a, b) = self.align(other)?;
        Ok(a.residues.is_subset(&b.residues))
    }
}

/// Every tuple in `{0, .., base - 1}^n`, lexicographic.
pub(crate) fn all_digits(base: u64, n: usize) -> Vec<Residue> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..base).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

pub(crate) fn all_residues(p: u64, n: usize, level: u32) -> Result<Vec<Residue>> {
    let modulus = checked_pow(p, level)?;
    let count = (modulus as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP as u128 {
        return Err(Error::CapExceeded(format!(
            "enumerating {p}^({level}*{n}) residues exceeds {ENUMERATION_CAP}"
        )));
    }
    Ok(all_digits(modulus, n))
}

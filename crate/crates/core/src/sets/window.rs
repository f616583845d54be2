//! Definable subsets of `Q_p^n` built from a cylinder inside a window.
//!
//! A [`WindowSet`] with scale `L` lives in the window `p^(-L) Z_p^n`. Its
//! core is a [`CylinderSet`] in the rescaled coordinates `y = p^L x`, so the
//! denoted set is
//!
//! ```text
//! (core \ punctures_removed) ∪ points_added ∪ (tail ? Q_p^n \ window : ∅)
//! ```
//!
//! After normalization every exceptional point lies inside the window, every
//! puncture lies in the core and no added point does.
//!
//! Closedness lemma. Cylinders and the complement of the window are clopen
//! and finite sets are closed, so a normalized set without punctures is a
//! finite union of closed sets. Conversely `Z_p^n` has no isolated points:
//! a removed point `x` of the core is the limit of core points distinct from
//! `x`, and those points stay in the set. Hence a normalized set is closed iff
//! it has no punctures. Boundedness is the absence of the tail.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PadicApprox;
use crate::rational::{self, Rational};
use crate::sets::cylinder::{all_residues, checked_pow, CylinderSet, Residue};

/// A point of `Q_p^n` given by p-adic digits; the digits are read exactly.
pub type Point = Vec<PadicApprox>;

fn exact(point: &[PadicApprox]) -> Vec<Rational> {
    point.iter().map(PadicApprox::to_rational).collect()
}

fn point_order(a: &Point, b: &Point) -> Ordering {
    exact(a).cmp(&exact(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
}

impl BoolOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Union => a || b,
            BoolOp::Intersect => a && b,
            BoolOp::Difference => a && !b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowJson", into = "WindowJson")]
pub struct WindowSet {
    scale: i64,
    core: CylinderSet,
    punctures_removed: Vec<Point>,
    points_added: Vec<Point>,
    tail: bool,
}

#[derive(Serialize, Deserialize)]
struct WindowJson {
    p: u64,
    n: usize,
    scale: i64,
    level: u32,
    residues: Vec<Residue>,
    #[serde(default)]
    punctures_removed: Vec<Point>,
    #[serde(default)]
    points_added: Vec<Point>,
    #[serde(default)]
    tail: bool,
}

impl TryFrom<WindowJson> for WindowSet {
    type Error = Error;

    fn try_from(j: WindowJson) -> Result<Self> {
        let core = CylinderSet::new(j.p, j.n, j.level, j.residues)?;
        WindowSet::new(j.scale, core, j.punctures_removed, j.points_added, j.tail)
    }
}

impl From<WindowSet> for WindowJson {
    fn from(w: WindowSet) -> Self {
        WindowJson {
            p: w.core.p(),
            n: w.core.dim(),
            scale: w.scale,
            level: w.core.level(),
            residues: w.core.residues().iter().cloned().collect(),
            punctures_removed: w.punctures_removed,
            points_added: w.points_added,
            tail: w.tail,
        }
    }
}

impl WindowSet {
    pub fn new(
        scale: i64,
        core: CylinderSet,
        punctures_removed: Vec<Point>,
        points_added: Vec<Point>,
        tail: bool,
    ) -> Result<Self> {
        if scale < 0 {
            return Err(Error::InvalidSet(format!("scale must be nonnegative, got {scale}")));
        }
        for point in punctures_removed.iter().chain(&points_added) {
            if point.len() != core.dim() {
                return Err(Error::DimensionMismatch(core.dim(), point.len()));
            }
            for c in point {
                if c.p() != core.p() {
                    return Err(Error::PrimeMismatch(core.p(), c.p()));
                }
                if c.absolute_precision() + scale < core.level() as i64 {
                    return Err(Error::InvalidSet(format!(
                        "point coordinate {c} has precision below level {}",
                        core.level()
                    )));
                }
            }
        }
        let raw = Self {
            scale,
            core,
            punctures_removed,
            points_added,
            tail,
        };
        raw.normalized()
    }

    /// A bounded set with no exceptional points.
    pub fn from_core(scale: i64, core: CylinderSet) -> Result<Self> {
        Self::new(scale, core, vec![], vec![], false)
    }

    /// All of `Q_p^n`.
    pub fn everything(p: u64, n: usize) -> Result<Self> {
        Self::new(0, CylinderSet::full(p, n, 0)?, vec![], vec![], true)
    }

    pub fn p(&self) -> u64 {
        self.core.p()
    }

    pub fn dim(&self) -> usize {
        self.core.dim()
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn core(&self) -> &CylinderSet {
        &self.core
    }

    pub fn punctures_removed(&self) -> &[Point] {
        &self.punctures_removed
    }

    pub fn points_added(&self) -> &[Point] {
        &self.points_added
    }

    pub fn tail(&self) -> bool {
        self.tail
    }

    fn scaled(&self, x: &[Rational]) -> Vec<Rational> {
        let f = rational::pow_rational(self.p(), self.scale);
        x.iter().map(|c| c * &f).collect()
    }

    fn in_window(&self, x: &[Rational]) -> bool {
        self.scaled(x).iter().all(rational::is_integral)
    }

    /// Membership as decided by the core and tail alone.
    fn generic_member(&self, x: &[Rational]) -> bool {
        if self.in_window(x) {
            self.core.contains_point(&self.scaled(x))
        } else {
            self.tail
        }
    }

    fn contains_exact(&self, x: &[Rational]) -> bool {
        if self.points_added.iter().any(|a| exact(a) == x) {
            return true;
        }
        self.generic_member(x) && !self.punctures_removed.iter().any(|a| exact(a) == x)
    }

    /// Membership of a point, reading its digits as an exact value.
    pub fn contains(&self, x: &[PadicApprox]) -> bool {
        self.contains_exact(&exact(x))
    }

    /// Least scale whose window holds every exceptional point.
    fn required_scale(&self) -> i64 {
        let mut scale = self.scale;
        for point in self.punctures_removed.iter().chain(&self.points_added) {
            for c in point {
                if let Some(v) = rational::valuation(self.p(), &c.to_rational()) {
                    scale = scale.max(-v);
                }
            }
        }
        scale
    }

    fn normalized(mut self) -> Result<Self> {
        let scale = self.required_scale();
        let exceptional: Vec<Point> = self
            .punctures_removed
            .iter()
            .chain(&self.points_added)
            .cloned()
            .collect();
        let wanted: Vec<bool> = exceptional.iter().map(|x| self.contains(x)).collect();
        let (core, tail) = self.rescaled_core(scale)?;
        self.scale = scale;
        self.core = core;
        self.tail = tail;
        self.punctures_removed.clear();
        self.points_added.clear();
        self.settle_points(exceptional.into_iter().zip(wanted));
        Ok(self)
    }

    /// Records exceptional points given their desired membership against the
    /// current core, dropping those the core already decides correctly.
    fn settle_points(&mut self, points: impl IntoIterator<Item = (Point, bool)>) {
        let mut punctures = Vec::new();
        let mut added = Vec::new();
        for (x, wanted) in points {
            let generic = self.generic_member(&exact(&x));
            match (wanted, generic) {
                (true, false) => added.push(x),
                (false, true) => punctures.push(x),
                _ => {}
            }
        }
        for list in [&mut punctures, &mut added] {
            list.sort_by(point_order);
            list.dedup_by(|a, b| point_order(a, b) == Ordering::Equal);
        }
        self.punctures_removed = punctures;
        self.points_added = added;
    }

    /// Core (and tail flag) describing the same generic part at a larger scale.
    fn rescaled_core(&self, scale: i64) -> Result<(CylinderSet, bool)> {
        if scale == self.scale {
            return Ok((self.core.clone(), self.tail));
        }
        let d = (scale - self.scale) as u32;
        let p = self.p();
        let n = self.dim();
        let level = self.core.level() + d;
        let factor = checked_pow(p, d)?;
        let modulus = checked_pow(p, level)?;
        let mut residues: Vec<Residue> = self
            .core
            .residues()
            .iter()
            .map(|r| r.iter().map(|x| x * factor % modulus).collect())
            .collect();
        if self.tail {
            // The ring between the old and the new window.
            residues.extend(
                all_residues(p, n, level)?
                    .into_iter()
                    .filter(|r| r.iter().any(|x| x % factor != 0)),
            );
        }
        Ok((CylinderSet::new(p, n, level, residues)?, self.tail))
    }

    /// Rewrites the set at a larger scale and finer level without changing it.
    pub fn at(&self, scale: i64, level: u32) -> Result<Self> {
        if scale < self.scale {
            return Err(Error::InvalidSet("cannot shrink the window".into()));
        }
        let (core, tail) = self.rescaled_core(scale)?;
        if level < core.level() {
            return Err(Error::InvalidSet("cannot coarsen the level".into()));
        }
        Ok(Self {
            scale,
            core: core.refine_to(level)?,
            punctures_removed: self.punctures_removed.clone(),
            points_added: self.points_added.clone(),
            tail,
        })
    }

    fn align(&self, other: &Self) -> Result<(Self, Self)> {
        if self.p() != other.p() {
            return Err(Error::PrimeMismatch(self.p(), other.p()));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let scale = self.scale.max(other.scale);
        let level = |w: &Self| w.core.level() + (scale - w.scale) as u32;
        let level = level(self).max(level(other));
        Ok((self.at(scale, level)?, other.at(scale, level)?))
    }

    fn combine(&self, other: &Self, op: BoolOp) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let residues = match op {
            BoolOp::Union => a.core.union(&b.core)?,
            BoolOp::Intersect => a.core.intersect(&b.core)?,
            BoolOp::Difference => a.core.difference(&b.core)?,
        };
        let exceptional: Vec<(Point, bool)> = a
            .punctures_removed
            .iter()
            .chain(&a.points_added)
            .chain(&b.punctures_removed)
            .chain(&b.points_added)
            .map(|x| (x.clone(), op.apply(a.contains(x), b.contains(x))))
            .collect();
        let mut out = Self {
            scale: a.scale,
            core: residues,
            punctures_removed: vec![],
            points_added: vec![],
            tail: op.apply(a.tail, b.tail),
        };
        out.settle_points(exceptional);
        Ok(out)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, BoolOp::Union)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.combine(other, BoolOp::Intersect)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, BoolOp::Difference)
    }

    /// Complement in `Q_p^n`.
    pub fn complement(&self) -> Result<Self> {
        Self::everything(self.p(), self.dim())?.difference(self)
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty() && self.points_added.is_empty() && !self.tail
    }

    /// Set equality, independent of how each side is written.
    pub fn same_set(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty() && other.difference(self)?.is_empty())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_closed(&self) -> bool {
        self.punctures_removed.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        !self.tail
    }

    /// Closed and bounded.
    pub fn is_definably_compact(&self) -> bool {
        self.is_closed() && self.is_bounded()
    }

    /// Haar measure normalized by `mu(Z_p^n) = 1`; `None` for unbounded sets.
    pub fn measure(&self) -> Option<Rational> {
        if self.tail {
            return None;
        }
        let mut m = self.core.measure() * rational::pow_rational(self.p(), self.scale * self.dim() as i64);
        if m.is_zero() {
            m = Rational::zero();
        }
        Some(m)
    }
}

/// Indices of the definably compact members of a finite family.
pub fn compact_locus(family: &[WindowSet]) -> Vec<usize> {
    family
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_definably_compact())
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: u64, x: i64) -> Point {
        vec![PadicApprox::from_i64(p, x, 4).unwrap()]
    }

    fn zp(p: u64) -> CylinderSet {
        CylinderSet::full(p, 1, 1).unwrap()
    }

    fn cyl(p: u64, level: u32, rs: &[u64]) -> CylinderSet {
        CylinderSet::new(p, 1, level, rs.iter().map(|&r| vec![r])).unwrap()
    }

    #[test]
    fn closedness_examples() {
        let whole = WindowSet::from_core(0, zp(3)).unwrap();
        assert!(whole.is_closed());
        let punctured = WindowSet::new(0, zp(3), vec![pt(3, 0)], vec![], false).unwrap();
        assert!(!punctured.is_closed());
        let vacuous = WindowSet::new(0, cyl(3, 1, &[1, 2]), vec![pt(3, 0)], vec![], false).unwrap();
        assert!(vacuous.is_closed());
        assert!(vacuous.punctures_removed().is_empty());
    }

    #[test]
    fn boundedness_and_compactness() {
        let whole = WindowSet::from_core(0, zp(3)).unwrap();
        assert!(whole.is_bounded() && whole.is_definably_compact());
        let q3 = WindowSet::everything(3, 1).unwrap();
        assert!(!q3.is_bounded() && !q3.is_definably_compact());
        let big = WindowSet::from_core(3, zp(3)).unwrap();
        assert!(big.is_bounded());
        let punctured = WindowSet::new(0, zp(3), vec![pt(3, 0)], vec![], false).unwrap();
        assert!(!punctured.is_definably_compact());
        let plane = WindowSet::from_core(0, CylinderSet::full(3, 2, 1).unwrap()).unwrap();
        assert!(plane.is_definably_compact());
    }

    #[test]
    fn complement_laws() {
        let d = WindowSet::new(1, cyl(3, 2, &[0, 4, 5]), vec![pt(3, 9)], vec![pt(3, 1)], false).unwrap();
        let c = d.complement().unwrap();
        assert!(c.tail());
        assert!(c.complement().unwrap().same_set(&d).unwrap());
        let all = d.union(&c).unwrap();
        assert!(all.tail());
        assert!(all.same_set(&WindowSet::everything(3, 1).unwrap()).unwrap());
        assert!(d.intersect(&c).unwrap().is_empty());
    }

    #[test]
    fn rescaling_keeps_points() {
        let outside = vec![PadicApprox::from_rational(3, &crate::rational::ratio(1, 9), 3).unwrap()];
        let d = WindowSet::new(0, zp(3), vec![], vec![outside.clone()], false).unwrap();
        assert_eq!(d.scale(), 2);
        assert!(d.contains(&outside));
        assert!(d.contains(&pt(3, 5)));
        assert!(!d.contains(&[PadicApprox::from_rational(3, &crate::rational::ratio(2, 9), 3).unwrap()]));
        assert!(d.is_definably_compact());
    }

    #[test]
    fn puncture_and_add_same_point() {
        // Added points win over punctures in the raw description.
        let d = WindowSet::new(0, zp(3), vec![pt(3, 0)], vec![pt(3, 0)], false).unwrap();
        assert!(d.contains(&pt(3, 0)));
        assert!(d.is_closed());
    }

    #[test]
    fn locus_examples() {
        let fam: Vec<WindowSet> = (0..3)
            .map(|t| {
                let punct = if t == 0 { vec![pt(3, 0)] } else { vec![] };
                WindowSet::new(0, zp(3), punct, vec![], false).unwrap()
            })
            .collect();
        assert_eq!(compact_locus(&fam), vec![1, 2]);
        let fam: Vec<WindowSet> = (0..4)
            .map(|t| WindowSet::new(0, zp(3), vec![], vec![], t % 2 == 0).unwrap())
            .collect();
        assert_eq!(compact_locus(&fam), vec![1, 3]);
        let fam = vec![WindowSet::from_core(0, zp(5)).unwrap(); 3];
        assert_eq!(compact_locus(&fam), vec![0, 1, 2]);
    }

    #[test]
    fn json_format() {
        let j = r#"{"p":3,"n":1,"scale":0,"level":2,"residues":[[0]],"punctures_removed":[],"points_added":[],"tail":false}"#;
        let w: WindowSet = serde_json::from_str(j).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), j);
        assert_eq!(w.measure(), Some(crate::rational::ratio(1, 9)));
        let low = r#"{"p":3,"n":1,"scale":0,"level":3,"residues":[[0]],"punctures_removed":[[{"p":3,"shift":0,"digits":[0],"precision":1}]],"points_added":[],"tail":false}"#;
        assert!(serde_json::from_str::<WindowSet>(low).is_err());
    }
}

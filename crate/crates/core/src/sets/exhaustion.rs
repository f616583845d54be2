//! Box exhaustions `γ ↦ W_γ` of `Q_p^n`.
//!
//! For a single center `c`, `W_γ = {x : v(x_i - c_i) >= -γ for all i}`, the
//! box of radius `-γ`. A union of exhaustions is the pointwise union
//! `V_γ = ⋃_j W^j_γ`, represented by the list of centers.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{check_prime, MAX_PRECISION};
use crate::rational::{self, Rational};
use crate::sets::cylinder::{all_digits, checked_pow, CylinderSet};
use crate::sets::window::WindowSet;

/// Searches for the least `γ` stop here; reached only by sets made of centers.
pub const GAMMA_FLOOR: i64 = -(MAX_PRECISION as i64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaExhaustion {
    p: u64,
    n: usize,
    centers: Vec<Vec<Rational>>,
}

impl GammaExhaustion {
    /// The boxes `B_{-γ}(0)^n`.
    pub fn standard(p: u64, n: usize) -> Result<Self> {
        Self::centered(p, vec![Rational::zero(); n])
    }

    pub fn centered(p: u64, center: Vec<Rational>) -> Result<Self> {
        check_prime(p)?;
        if center.is_empty() {
            return Err(Error::InvalidSet("dimension must be at least 1".into()));
        }
        Ok(Self {
            p,
            n: center.len(),
            centers: vec![center],
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn centers(&self) -> &[Vec<Rational>] {
        &self.centers
    }

    /// `γ ↦ ⋃_i W^i_γ`.
    pub fn union(parts: &[GammaExhaustion]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("no exhaustions to combine".into()))?;
        let mut centers: Vec<Vec<Rational>> = Vec::new();
        for e in parts {
            if e.p != first.p {
                return Err(Error::PrimeMismatch(first.p, e.p));
            }
            if e.n != first.n {
                return Err(Error::DimensionMismatch(first.n, e.n));
            }
            centers.extend(e.centers.iter().cloned());
        }
        centers.sort();
        centers.dedup();
        Ok(Self {
            p: first.p,
            n: first.n,
            centers,
        })
    }

    /// Largest `r` with `v(x_i - c_i) >= r` for every coordinate; `None` when `x = c`.
    fn closeness(&self, x: &[Rational], c: &[Rational]) -> Option<i64> {
        x.iter()
            .zip(c)
            .filter_map(|(a, b)| rational::valuation(self.p, &(a - b)))
            .min()
    }

    pub fn contains(&self, gamma: i64, x: &[Rational]) -> bool {
        self.centers
            .iter()
            .any(|c| self.closeness(x, c).map_or(true, |r| r >= -gamma))
    }

    /// `W_γ` as a window set.
    pub fn level_set(&self, gamma: i64) -> Result<WindowSet> {
        let mut scale = gamma.max(0);
        for c in &self.centers {
            for x in c {
                if let Some(v) = rational::valuation(self.p, x) {
                    scale = scale.max(-v);
                }
            }
        }
        let level = u32::try_from(scale - gamma)
            .map_err(|_| Error::CapExceeded(format!("level for gamma = {gamma}")))?;
        let modulus = checked_pow(self.p, level)?;
        let factor = rational::pow_rational(self.p, scale);
        let residues = self.centers.iter().map(|c| {
            c.iter()
                .map(|x| rational::residue(&(x * &factor), modulus).expect("center inside window"))
                .collect()
        });
        let core = CylinderSet::new(self.p, self.n, level, residues)?;
        WindowSet::from_core(scale, core)
    }

    /// Is the box of radius `rho` around `q` inside the union of the boxes of
    /// radius `r` around the centers?
    fn covers_box(&self, q: &[Rational], rho: i64, r: i64) -> bool {
        if r <= rho {
            return self
                .centers
                .iter()
                .any(|c| self.closeness(q, c).map_or(true, |s| s >= r));
        }
        let inside = self
            .centers
            .iter()
            .filter(|c| self.closeness(q, c).map_or(true, |s| s >= rho))
            .count();
        // The box splits into p^(n (r - rho)) disjoint boxes of radius r.
        let needed = ((r - rho) as u32)
            .checked_mul(self.n as u32)
            .and_then(|e| (self.p as usize).checked_pow(e));
        if needed.map_or(true, |k| inside < k) {
            return false;
        }
        let step = rational::pow_rational(self.p, rho);
        all_digits(self.p, self.n).iter().all(|j| {
            let child: Vec<Rational> = q
                .iter()
                .zip(j)
                .map(|(a, &d)| a + &step * rational::int(d as i64))
                .collect();
            self.covers_box(&child, rho + 1, r)
        })
    }

    /// Least `γ` (not below [`GAMMA_FLOOR`]) whose level set contains the box.
    fn least_gamma_for_box(&self, q: &[Rational], rho: i64) -> i64 {
        let best = self
            .centers
            .iter()
            .map(|c| self.closeness(q, c).map_or(rho, |s| s.min(rho)))
            .max()
            .expect("at least one center");
        if best < rho {
            return -best;
        }
        let mut r = rho;
        while -(r + 1) >= GAMMA_FLOOR && self.covers_box(q, rho, r + 1) {
            r += 1;
        }
        -r
    }

    fn least_gamma_for_point(&self, x: &[Rational]) -> i64 {
        let best = self
            .centers
            .iter()
            .map(|c| self.closeness(x, c).unwrap_or(-GAMMA_FLOOR))
            .max()
            .expect("at least one center");
        (-best).max(GAMMA_FLOOR)
    }

    /// Least `γ` with `D ⊆ W_γ`, or `None` when `D` is unbounded.
    ///
    /// Removed points are ignored: `W_γ` is closed and contains a punctured
    /// core iff it contains the core. The search bottoms out at
    /// [`GAMMA_FLOOR`], which is also returned for the empty set.
    pub fn bounded_by(&self, d: &WindowSet) -> Result<Option<i64>> {
        if d.p() != self.p {
            return Err(Error::PrimeMismatch(self.p, d.p()));
        }
        if d.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, d.dim()));
        }
        if !d.is_bounded() {
            return Ok(None);
        }
        let unscale = rational::pow_rational(self.p, -d.scale());
        let rho = d.core().level() as i64 - d.scale();
        let mut gamma = GAMMA_FLOOR;
        for r in d.core().residues() {
            let q: Vec<Rational> = r.iter().map(|&x| rational::int(x as i64) * &unscale).collect();
            gamma = gamma.max(self.least_gamma_for_box(&q, rho));
        }
        for x in d.points_added() {
            let x: Vec<Rational> = x.iter().map(|c| c.to_rational()).collect();
            gamma = gamma.max(self.least_gamma_for_point(&x));
        }
        Ok(Some(gamma))
    }
}

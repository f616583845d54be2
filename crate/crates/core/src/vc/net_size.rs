//! The sample size `N(k, ε)` that makes a Haar-random sample an ε-net for
//! every family of VC dimension `k`.
//!
//! `N` is the least integer with
//!
//! ```text
//! 1 / (N ε²) < 1 − δ      and      4 · Σ_{i≤k} C(N, i) · exp(−N δ² / 8) < δ
//! ```
//!
//! where `δ = ε / 2` unless overridden. The search runs in floating point
//! log space with a safety margin; the answer is then certified, and
//! adjusted if needed, by exact rational arithmetic with rigorous bounds on
//! the exponential.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::shatter::sauer_shelah_bound;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetRequest {
    pub k: u64,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
}

impl NetRequest {
    /// Request with the default `δ = ε / 2`.
    pub fn new(k: u64, epsilon: Rational) -> Result<Self> {
        let delta = &epsilon / rational::int(2);
        Self::with_delta(k, epsilon, delta)
    }

    /// Request with an explicit `δ`.
    pub fn with_delta(k: u64, epsilon: Rational, delta: Rational) -> Result<Self> {
        let zero = Rational::zero();
        let one = Rational::one();
        if k < 1 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if epsilon <= zero || epsilon >= one {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if delta <= zero || delta >= one {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(Self { k, epsilon, delta })
    }
}

/// Exact verdict on both inequalities at a given `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSizeCheck {
    pub n: u64,
    pub chebyshev: bool,
    pub union_bound: bool,
}

impl NetSizeCheck {
    pub fn holds(&self) -> bool {
        self.chebyshev && self.union_bound
    }
}

/// Decides `exp(x) > target` for rational `x >= 0`.
///
/// Partial Taylor sums are lower bounds. Once `x < j + 2` the tail after the
/// `j`-th term is at most `t_j · x/(j+1) / (1 − x/(j+2))`, which gives an
/// upper bound. `exp(x)` is irrational for rational `x > 0`, so the loop
/// terminates.
pub fn exp_exceeds(x: &Rational, target: &Rational) -> bool {
    assert!(*x >= Rational::zero(), "exp_exceeds needs x >= 0");
    if x.is_zero() {
        return Rational::one() > *target;
    }
    let mut term = Rational::one();
    let mut partial = Rational::one();
    let mut j: i64 = 0;
    loop {
        j += 1;
        term = term * x / rational::int(j);
        partial += &term;
        if partial > *target {
            return true;
        }
        let jn = rational::int(j + 2);
        if *x < jn {
            let ratio = x / &jn;
            let tail = &term * x / rational::int(j + 1) / (Rational::one() - ratio);
            if &partial + tail <= *target {
                return false;
            }
        }
    }
}

/// Both inequalities at `n`, decided exactly.
pub fn check_exact(req: &NetRequest, n: u64) -> NetSizeCheck {
    let eps = &req.epsilon;
    let delta = &req.delta;
    let nr = Rational::from_integer(BigInt::from(n));
    // 1/(N ε²) < 1 − δ  ⟺  N ε² (1 − δ) > 1
    let chebyshev = n > 0 && &nr * eps * eps * (Rational::one() - delta) > Rational::one();
    // 4 S(N) exp(−N δ²/8) < δ  ⟺  exp(N δ²/8) > 4 S(N) / δ
    let s = Rational::from_integer(BigInt::from(sauer_shelah_bound(req.k, n)));
    let target = rational::int(4) * s / delta;
    let x = &nr * delta * delta / rational::int(8);
    let union_bound = exp_exceeds(&x, &target);
    NetSizeCheck {
        n,
        chebyshev,
        union_bound,
    }
}

fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// `ln Σ_{i≤k} C(n, i)` by log-sum-exp.
fn ln_binomial_sum(k: u64, n: u64) -> f64 {
    let mut logs = Vec::with_capacity(k.min(n) as usize + 1);
    let mut acc = 0.0f64;
    logs.push(0.0);
    for i in 1..=k.min(n) {
        acc += ((n - i + 1) as f64).ln() - (i as f64).ln();
        logs.push(acc);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// Floating-point screen; only accepts with a relative margin, so it never
/// accepts where exact arithmetic would reject except through gross error.
fn accepts_approx(req: &NetRequest, n: u64) -> bool {
    const MARGIN: f64 = 1e-9;
    let eps = to_f64(&req.epsilon);
    let delta = to_f64(&req.delta);
    let nf = n as f64;
    let chebyshev = nf * eps * eps * (1.0 - delta) > 1.0 + MARGIN;
    let lhs = 4f64.ln() + ln_binomial_sum(req.k, n) - nf * delta * delta / 8.0;
    let union_bound = lhs < delta.ln() - MARGIN * (1.0 + lhs.abs());
    chebyshev && union_bound
}

/// The least `N` satisfying both inequalities, certified exactly.
pub fn net_size(req: &NetRequest) -> u64 {
    let mut hi = 1u64;
    while !accepts_approx(req, hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // accepts(hi) and (lo == 0 or !accepts(lo))
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if accepts_approx(req, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut n = hi;
    while !check_exact(req, n).holds() {
        n += 1;
    }
    while n > 1 && check_exact(req, n - 1).holds() {
        n -= 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn exp_bounds() {
        // e ≈ 2.71828
        assert!(exp_exceeds(&int(1), &ratio(271, 100)));
        assert!(!exp_exceeds(&int(1), &ratio(272, 100)));
        // e^10 ≈ 22026.47
        assert!(exp_exceeds(&int(10), &int(22026)));
        assert!(!exp_exceeds(&int(10), &int(22027)));
        assert!(exp_exceeds(&int(0), &ratio(1, 2)));
        assert!(!exp_exceeds(&int(0), &int(1)));
    }

    #[test]
    fn request_validation() {
        assert!(NetRequest::new(0, ratio(1, 2)).is_err());
        assert!(NetRequest::new(1, int(1)).is_err());
        assert!(NetRequest::new(1, int(0)).is_err());
        let r = NetRequest::new(2, ratio(1, 4)).unwrap();
        assert_eq!(r.delta, ratio(1, 8));
    }

    #[test]
    fn smallest_case_is_minimal() {
        let req = NetRequest::new(1, ratio(1, 2)).unwrap();
        let n = net_size(&req);
        assert!(check_exact(&req, n).holds());
        assert!(!check_exact(&req, n - 1).holds());
        assert_eq!(n, 1270);
    }
}

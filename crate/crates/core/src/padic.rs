//! Finite-precision p-adic numbers.
//!
//! A [`PadicApprox`] stores `p^(-shift) * u` where `u` is known modulo
//! `p^precision` through its base-`p` digits, least significant first. The
//! value is therefore known modulo `p^(precision - shift)`, which we call the
//! absolute precision. Every operation records the precision of its result
//! and never reports more digits than the inputs determine.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, pow_u, Rational};

/// Largest supported digit count.
pub const MAX_PRECISION: usize = 64;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if p > u32::MAX as u64 || !is_prime(p) {
        return Err(Error::InvalidPadic(format!("{p} is not a supported prime")));
    }
    Ok(())
}

/// Valuation of an approximate p-adic number.
///
/// `AtLeast(t)` is returned when every stored digit is zero: the true value is
/// only known to lie in `p^t Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Exact(i64),
    AtLeast(i64),
}

impl Valuation {
    /// The exact value, or the known lower bound.
    pub fn lower_bound(self) -> i64 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        use Valuation::*;
        match (self, rhs) {
            (Exact(a), Exact(b)) => Exact(a + b),
            (a, b) => AtLeast(a.lower_bound() + b.lower_bound()),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use Valuation::*;
        match (*self, *other) {
            (Exact(a), Exact(b)) => Some(a.cmp(&b)),
            (AtLeast(t), Exact(a)) => (a < t).then_some(Ordering::Greater),
            (Exact(a), AtLeast(t)) => (a < t).then_some(Ordering::Less),
            (AtLeast(s), AtLeast(t)) => (s == t).then_some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(t) => write!(f, ">={t}"),
        }
    }
}

impl FromStr for Valuation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidPadic(format!("bad valuation {s:?}"));
        match s.strip_prefix(">=") {
            Some(t) => Ok(Valuation::AtLeast(t.trim().parse().map_err(|_| bad())?)),
            None => Ok(Valuation::Exact(s.parse().map_err(|_| bad())?)),
        }
    }
}

/// A p-adic number `p^(-shift) * u` with `u` known modulo `p^precision`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PadicJson", into = "PadicJson")]
pub struct PadicApprox {
    p: u64,
    shift: i64,
    digits: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct PadicJson {
    p: u64,
    shift: i64,
    digits: Vec<u64>,
    precision: usize,
}

impl TryFrom<PadicJson> for PadicApprox {
    type Error = Error;

    fn try_from(j: PadicJson) -> Result<Self> {
        if j.digits.len() != j.precision {
            return Err(Error::InvalidPadic(format!(
                "precision {} but {} digits",
                j.precision,
                j.digits.len()
            )));
        }
        PadicApprox::new(j.p, j.shift, j.digits)
    }
}

impl From<PadicApprox> for PadicJson {
    fn from(x: PadicApprox) -> Self {
        PadicJson {
            p: x.p,
            shift: x.shift,
            precision: x.digits.len(),
            digits: x.digits,
        }
    }
}

impl PadicApprox {
    /// Builds a value from raw digits and normalizes it.
    pub fn new(p: u64, shift: i64, digits: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        if digits.is_empty() || digits.len() > MAX_PRECISION {
            return Err(Error::InvalidPadic(format!(
                "precision must be in 1..={MAX_PRECISION}, got {}",
                digits.len()
            )));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidPadic(format!("digit {d} out of range for p = {p}")));
        }
        Ok(Self::raw(p, shift, digits).normalized())
    }

    fn raw(p: u64, shift: i64, digits: Vec<u64>) -> Self {
        Self { p, shift, digits }
    }

    /// `p^(-shift) * (unit mod p^precision)`; the precision is clamped to the maximum.
    fn from_unit(p: u64, shift: i64, unit: &BigUint, precision: usize) -> Self {
        let precision = precision.clamp(1, MAX_PRECISION);
        let pb = BigUint::from(p);
        let mut u = unit % pow_u(p, precision as u32);
        let mut digits = Vec::with_capacity(precision);
        for _ in 0..precision {
            let (q, r) = u.div_rem(&pb);
            digits.push(r.to_u64().unwrap());
            u = q;
        }
        Self::raw(p, shift, digits).normalized()
    }

    /// An integer reduced modulo `p^precision`.
    pub fn from_integer(p: u64, n: &BigInt, precision: usize) -> Result<Self> {
        check_prime(p)?;
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::InvalidPadic(format!("precision {precision} out of range")));
        }
        let m = BigInt::from(pow_u(p, precision as u32));
        let u = n.mod_floor(&m).to_biguint().unwrap();
        Ok(Self::from_unit(p, 0, &u, precision))
    }

    pub fn from_i64(p: u64, n: i64, precision: usize) -> Result<Self> {
        Self::from_integer(p, &BigInt::from(n), precision)
    }

    /// Approximates a rational whose denominator may carry powers of `p`.
    ///
    /// The result has the smallest nonnegative shift that makes the scaled
    /// value integral at `p`, and `precision` digits of that scaled value.
    pub fn from_rational(p: u64, x: &Rational, precision: usize) -> Result<Self> {
        check_prime(p)?;
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::InvalidPadic(format!("precision {precision} out of range")));
        }
        let shift = match rational::valuation(p, x) {
            Some(v) if v < 0 => -v,
            _ => 0,
        };
        let scaled = x * rational::pow_rational(p, shift);
        let modulus = BigInt::from(pow_u(p, precision as u32));
        let den_inv = scaled
            .denom()
            .modinv(&modulus)
            .ok_or_else(|| Error::InvalidPadic("denominator not invertible".into()))?;
        let u = (scaled.numer() * den_inv).mod_floor(&modulus);
        Ok(Self::from_unit(p, shift, &u.to_biguint().unwrap(), precision))
    }

    pub fn zero(p: u64, precision: usize) -> Result<Self> {
        Self::from_i64(p, 0, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// The value is determined modulo `p^absolute_precision()`.
    pub fn absolute_precision(&self) -> i64 {
        self.digits.len() as i64 - self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// The stored unit part `u` as an integer in `0..p^precision`.
    pub fn unit_part(&self) -> BigUint {
        let pb = BigUint::from(self.p);
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &pb + BigUint::from(d))
    }

    /// The exact rational `p^(-shift) * u` named by the stored digits.
    pub fn to_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.unit_part()))
            * rational::pow_rational(self.p, -self.shift)
    }

    fn lowest_nonzero(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0)
    }

    pub fn val(&self) -> Valuation {
        match self.lowest_nonzero() {
            Some(i) => Valuation::Exact(i as i64 - self.shift),
            None => Valuation::AtLeast(self.absolute_precision()),
        }
    }

    /// Drops low zero digits while the shift is positive. This keeps the
    /// absolute precision and the value unchanged.
    fn normalized(mut self) -> Self {
        if let Some(i) = self.lowest_nonzero() {
            let k = (i as i64).min(self.shift.max(0)) as usize;
            if k > 0 {
                self.digits.drain(..k);
                self.shift -= k as i64;
            }
        }
        self
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        let m = pow_u(self.p, self.precision() as u32);
        let u = (&m - self.unit_part() % &m) % &m;
        Self::from_unit(self.p, self.shift, &u, self.precision())
    }

    /// Sum, truncated to the window both operands determine.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let shift = self.shift.max(other.shift);
        let lift = |x: &Self| {
            let k = (shift - x.shift) as u32;
            (x.unit_part() * pow_u(x.p, k), x.precision() + k as usize)
        };
        let (ux, mx) = lift(self);
        let (uy, my) = lift(other);
        let m = mx.min(my);
        Ok(Self::from_unit(self.p, shift, &(ux + uy), m))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product; keeps as many digits of the product's unit part as the
    /// less precise factor determines.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let shift = self.shift + other.shift;
        let m = match (self.lowest_nonzero(), other.lowest_nonzero()) {
            (Some(vx), Some(vy)) => vx + vy + (self.precision() - vx).min(other.precision() - vy),
            (None, Some(vy)) => self.precision() + vy,
            (Some(vx), None) => other.precision() + vx,
            (None, None) => self.precision() + other.precision(),
        };
        let u = self.unit_part() * other.unit_part();
        Ok(Self::from_unit(self.p, shift, &u, m))
    }

    /// Inverse of a value whose lowest digit is nonzero, lifted one digit at a time.
    pub fn inv_unit(&self) -> Result<Self> {
        if self.digits[0] == 0 {
            return Err(Error::NotAUnit);
        }
        let p = self.p;
        let r0 = inverse_mod_prime(self.digits[0], p);
        let u = self.unit_part();
        let pb = BigUint::from(p);
        let mut r = BigUint::from(r0);
        let mut pi = pb.clone();
        for _ in 1..self.precision() {
            let next = &pi * &pb;
            let t = (&u * &r) % &next;
            // t ≡ 1 (mod p^i); cancel the next digit of the error.
            let c = ((t + &next - 1u32) % &next / &pi).to_u64().unwrap();
            let d = (p - (c as u128 * r0 as u128 % p as u128) as u64) % p;
            r += &pi * d;
            pi = next;
        }
        Ok(Self::from_unit(p, -self.shift, &r, self.precision()))
    }
}

/// `a^{-1} mod p` for prime `p` and `a` not divisible by `p`.
pub(crate) fn inverse_mod_prime(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}

impl fmt::Display for PadicApprox {
    /// `p^k * (d0 + d1*p + d2*p^2 + ...) [prec m]` with `k = -shift`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        write!(f, "{p}^{} * (", -self.shift)?;
        for (i, d) in self.digits.iter().enumerate() {
            match i {
                0 => write!(f, "{d}")?,
                1 => write!(f, " + {d}*{p}")?,
                _ => write!(f, " + {d}*{p}^{i}")?,
            }
        }
        write!(f, ") [prec {}]", self.digits.len())
    }
}

impl FromStr for PadicApprox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidPadic(format!("{why} in {s:?}"));
        let s = s.trim();
        let (p, rest) = s.split_once('^').ok_or_else(|| bad("missing '^'"))?;
        let p: u64 = p.trim().parse().map_err(|_| bad("bad prime"))?;
        let (k, rest) = rest.split_once('*').ok_or_else(|| bad("missing '*'"))?;
        let k: i64 = k.trim().parse().map_err(|_| bad("bad exponent"))?;
        let rest = rest.trim().strip_prefix('(').ok_or_else(|| bad("missing '('"))?;
        let (body, tail) = rest.split_once(')').ok_or_else(|| bad("missing ')'"))?;
        let m = tail
            .trim()
            .strip_prefix("[prec")
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad("missing precision"))?;
        let m: usize = m.trim().parse().map_err(|_| bad("bad precision"))?;
        let mut digits = Vec::new();
        for (i, term) in body.split('+').enumerate() {
            let term = term.trim();
            let (d, power) = match term.split_once('*') {
                Some((d, power)) => (d, Some(power.trim())),
                None => (term, None),
            };
            let expected = match i {
                0 => None,
                1 => Some(p.to_string()),
                _ => Some(format!("{p}^{i}")),
            };
            if power.map(str::to_string) != expected {
                return Err(bad("unexpected power of p"));
            }
            digits.push(d.trim().parse().map_err(|_| bad("bad digit"))?);
        }
        if digits.len() != m {
            return Err(bad("digit count does not match precision"));
        }
        PadicApprox::new(p, -k, digits)
    }
}

/// The closed ball `{x : v(x - center) >= radius}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: PadicApprox,
    pub radius: i64,
}

impl Ball {
    pub fn new(center: PadicApprox, radius: i64) -> Self {
        Self { center, radius }
    }

    /// Membership test; fails when the radius exceeds the absolute precision
    /// of `x - center`.
    pub fn contains(&self, x: &PadicApprox) -> Result<bool> {
        let d = x.sub(&self.center)?;
        if self.radius > d.absolute_precision() {
            return Err(Error::InsufficientPrecision);
        }
        Ok(d.val().lower_bound() >= self.radius)
    }
}

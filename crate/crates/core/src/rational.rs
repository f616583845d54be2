//! Small helpers around `BigRational`: p-adic valuation of rationals and
//! string-based serde so that measures survive JSON round trips exactly.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(p: u64, n: &BigInt) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn valuation(p: u64, x: &Rational) -> Option<i64> {
    let vn = int_valuation(p, x.numer())?;
    let vd = int_valuation(p, x.denom()).unwrap_or(0);
    Some(vn - vd)
}

pub fn pow_u(p: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

/// `p^e` as a rational, for any sign of `e`.
pub fn pow_rational(p: u64, e: i64) -> Rational {
    let m = Rational::from_integer(BigInt::from(pow_u(p, e.unsigned_abs() as u32)));
    if e >= 0 {
        m
    } else {
        m.recip()
    }
}

/// Ceiling of a positive rational as an integer.
pub fn ceil_u64(x: &Rational) -> u64 {
    let c = x.ceil().to_integer();
    u64::try_from(c).unwrap_or(u64::MAX)
}

pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Reduces an integral rational into `0..modulus`.
pub fn residue(x: &Rational, modulus: u64) -> Option<u64> {
    if !is_integral(x) {
        return None;
    }
    let m = BigInt::from(modulus);
    let r = x.numer().mod_floor(&m);
    u64::try_from(r).ok()
}

pub mod serde_str {
    use super::{parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}")))
    }
}

/// A list of rationals as strings.
pub mod serde_vec {
    use super::{parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("invalid rational {s:?}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(5, &ratio(1, 5)), Some(-1));
        assert_eq!(valuation(3, &ratio(18, 7)), Some(2));
        assert_eq!(valuation(3, &int(0)), None);
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("1/4"), Some(ratio(1, 4)));
        assert_eq!(parse_rational(" 3 "), Some(int(3)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&int(-1), 9), Some(8));
        assert_eq!(residue(&ratio(1, 3), 9), None);
    }
}

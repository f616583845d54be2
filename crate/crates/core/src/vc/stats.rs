use fixedbitset::FixedBitSet;
use num_bigint::BigInt;

use super::SetSystem;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Fraction of sample entries (with multiplicity) that lie in `set`.
pub fn average(sample: &[usize], set: &FixedBitSet) -> Result<Rational> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let hits = sample.iter().filter(|&&i| set.contains(i)).count();
    Ok(Rational::new(BigInt::from(hits), BigInt::from(sample.len())))
}

fn histogram(sample: &[usize], size: usize) -> Vec<i64> {
    let mut counts = vec![0i64; size];
    for &i in sample {
        counts[i] += 1;
    }
    counts
}

/// `max_D |Av(a; D) - Av(b; D)|` over the family; zero for an empty family.
pub fn discrepancy(a: &[usize], b: &[usize], sys: &SetSystem) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    let size = sys.ground().len();
    if let Some(&i) = a.iter().chain(b).find(|&&i| i >= size) {
        return Err(Error::InvalidArgument(format!("sample index {i} outside ground set")));
    }
    // Difference of hit counts per ground element; both samples share the denominator.
    let ha = histogram(a, size);
    let hb = histogram(b, size);
    let best = sys
        .family()
        .iter()
        .map(|m| m.indices().map(|i| ha[i] - hb[i]).sum::<i64>().abs())
        .max()
        .unwrap_or(0);
    Ok(Rational::new(BigInt::from(best), BigInt::from(a.len())))
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Element, FiniteQuotient};

/// Uniform (Haar) draws from a finite quotient.
///
/// The stream for `(seed, i)` is ChaCha8 keyed by `seed_from_u64(seed)` on
/// stream number `i`. Streams are independent, so trial `i` of an experiment
/// draws the same elements regardless of which worker runs it.
#[derive(Debug, Clone)]
pub struct HaarSampler<'q> {
    quotient: &'q FiniteQuotient,
    rng: ChaCha8Rng,
}

impl<'q> HaarSampler<'q> {
    pub fn new(quotient: &'q FiniteQuotient, seed: u64) -> Self {
        Self::stream(quotient, seed, 0)
    }

    pub fn stream(quotient: &'q FiniteQuotient, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { quotient, rng }
    }

    pub fn next_index(&mut self) -> usize {
        // Sample through u64 so the draw does not depend on the width of usize.
        self.rng.gen_range(0..self.quotient.len() as u64) as usize
    }

    pub fn sample_indices(&mut self, count: usize) -> Vec<usize> {
        (0..count).map(|_| self.next_index()).collect()
    }

    pub fn sample(&mut self, count: usize) -> Vec<Element> {
        (0..count)
            .map(|_| self.quotient.element(self.next_index()).clone())
            .collect()
    }
}

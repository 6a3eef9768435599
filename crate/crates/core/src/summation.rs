//! Compensated summation and order-fixed parallel reductions.
//!
//! Every reduction in the crate goes through [`Neumaier`] so that results do
//! not depend on the number of worker threads: parallel work is split into
//! fixed-size chunks, each chunk is summed sequentially, and the chunk
//! partials are combined in ascending chunk order.

use rayon::prelude::*;

/// Chunk length for [`par_sum_by`]. Changing it changes rounding, so it is a
/// constant rather than a tunable.
pub const REDUCTION_CHUNK: usize = 1 << 14;

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub const fn new() -> Self {
        Neumaier { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// The unevaluated pair (sum, compensation); together they carry roughly
    /// twice the working precision.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

impl Extend<f64> for Neumaier {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of a slice.
pub fn sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<Neumaier>().value()
}

/// Sums `f(item)` over `items` in parallel with a result that is
/// bit-identical for any thread count.
pub fn par_sum_by<T, F>(items: &[T], f: F) -> Neumaier
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let partials: Vec<Neumaier> = items
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| chunk.iter().map(&f).collect())
        .collect();
    let mut total = Neumaier::new();
    for p in &partials {
        total.merge(p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(&v), 2.0);
        let naive: f64 = v.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn harmonic_sum_matches_sorted_reverse_order() {
        let terms: Vec<f64> = (1..=1_000_000).map(|k| 1.0 / k as f64).collect();
        let forward = sum(&terms);
        let mut rev = terms.clone();
        rev.reverse();
        let backward = sum(&rev);
        assert!((forward - backward).abs() <= 1e-15 * forward);
    }

    #[test]
    fn parallel_sum_is_thread_count_independent() {
        let items: Vec<u32> = (1..200_000).collect();
        let f = |&k: &u32| ((k as f64).sqrt()).sin() / k as f64;
        let a = par_sum_by(&items, f).value();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| par_sum_by(&items, f).value());
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

//! Order-fixed summation.
//!
//! Sums are split into blocks of [`BLOCK`] elements; each block is summed
//! left to right and the block partials are combined by a balanced binary
//! tree. Blocks may be evaluated on any number of threads, the result is
//! bit-identical because the combination order never changes.

use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::Add;

pub const BLOCK: usize = 1024;

fn tree<T: Copy + Add<Output = T>>(parts: &[T], zero: T) -> T {
    match parts.len() {
        0 => zero,
        1 => parts[0],
        n => {
            let mid = n / 2;
            tree(&parts[..mid], zero) + tree(&parts[mid..], zero)
        }
    }
}

fn pairwise<T>(values: &[T], zero: T) -> T
where
    T: Copy + Add<Output = T> + Send + Sync,
{
    let partials: Vec<T> = values
        .par_chunks(BLOCK)
        .map(|chunk| chunk.iter().fold(zero, |acc, &v| acc + v))
        .collect();
    tree(&partials, zero)
}

pub fn sum_f64(values: &[f64]) -> f64 {
    pairwise(values, 0.0)
}

pub fn sum_complex(values: &[Complex64]) -> Complex64 {
    pairwise(values, Complex64::new(0.0, 0.0))
}

pub fn mean_f64(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    sum_f64(values) / values.len() as f64
}

pub fn mean_complex(values: &[Complex64]) -> Complex64 {
    if values.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    sum_complex(values) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_small() {
        assert_eq!(sum_f64(&[]), 0.0);
        assert_eq!(sum_f64(&[1.0, 2.0, 3.0]), 6.0);
        assert_eq!(mean_f64(&[2.0; 10]), 2.0);
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let values: Vec<f64> = (0..100_000).map(|i| ((i as f64) * 0.37).sin() / 3.0).collect();
        let reference = sum_f64(&values);
        for threads in [1, 2, 3, 8] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let s = pool.install(|| sum_f64(&values));
            assert_eq!(s.to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn pairwise_beats_naive_on_many_small_terms() {
        let values = vec![0.1_f64; 1 << 20];
        let exact = 0.1 * (1u64 << 20) as f64;
        let naive: f64 = values.iter().sum();
        let tree = sum_f64(&values);
        assert!((tree - exact).abs() <= (naive - exact).abs());
    }
}

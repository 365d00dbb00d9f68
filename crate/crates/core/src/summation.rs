//! Compensated summation.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl Add for NeumaierSum {
    type Output = NeumaierSum;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs.sum;
        self += rhs.compensation;
        self
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().sum::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_is_recovered() {
        let s = compensated_sum([1e200, 0.1, 0.2, 0.3, -1e200]);
        assert!((s - 0.6).abs() < 1e-15);
    }

    #[test]
    fn merging_accumulators() {
        let a: NeumaierSum = [1.0, 1e-16, 1e-16].into_iter().sum();
        let b: NeumaierSum = [1e-16, 1e-16].into_iter().sum();
        assert!(((a + b).value() - (1.0 + 4e-16)).abs() < 1e-30);
    }

    #[test]
    fn many_small_terms() {
        let n = 1 << 20;
        let s = compensated_sum((0..n).map(|_| 0.1));
        assert!((s - 0.1 * n as f64).abs() < 1e-9);
    }
}

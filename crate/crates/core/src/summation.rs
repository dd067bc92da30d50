//! Compensated floating-point accumulation.
//!
//! Every real-valued series in the crate is reduced through [`CompensatedSum`]
//! in ascending index order, so a fixed cutoff always yields the same bits.

use std::iter::Sum;
use std::ops::AddAssign;

/// Neumaier's variant of Kahan summation.
///
/// Unlike plain Kahan, the correction survives terms that are larger in
/// magnitude than the running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for CompensatedSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a sequence, in iteration order.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().sum::<CompensatedSum>().value()
}

/// Compensated inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Euclidean norm with compensated accumulation of the squares.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

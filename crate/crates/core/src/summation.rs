//! Compensated (Kahan–Babuška–Neumaier) accumulation.

use crate::scalar::Real;

/// Running sum carrying a separate compensation term for lost low-order bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let values = [1.0e16, 1.0, -1.0e16, 1.0];
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 1.0);
        assert_eq!(compensated_sum(values), 2.0);
    }

    #[test]
    fn harmonic_partial_sum_matches_reference() {
        // H_{10^6} = ln(10^6) + gamma + 1/(2n) - 1/(12 n^2) + ...
        let n = 1_000_000u32;
        let s = compensated_sum((1..=n).rev().map(|k| 1.0 / k as f64));
        let nf = n as f64;
        let reference =
            nf.ln() + 0.577_215_664_901_532_9 + 1.0 / (2.0 * nf) - 1.0 / (12.0 * nf * nf);
        assert!((s - reference).abs() < 1e-14 * reference);
    }
}

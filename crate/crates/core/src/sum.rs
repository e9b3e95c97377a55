use std::ops::{Add, AddAssign};

/// Kahan-Babuska-Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new(init: f64) -> Self {
        Self { s: init, c: 0.0 }
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl From<f64> for NeumaierSum {
    fn from(value: f64) -> Self {
        Self::new(value)
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        let t = self.s + rhs;
        if self.s.abs() >= rhs.abs() {
            self.c += (self.s - t) + rhs;
        } else {
            self.c += (rhs - t) + self.s;
        }
        self.s = t;
    }
}

impl Add<f64> for NeumaierSum {
    type Output = Self;

    fn add(mut self, rhs: f64) -> Self {
        self += rhs;
        self
    }
}

impl std::iter::Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let mut s = NeumaierSum::default();
        s += 1e100;
        s += 1.0;
        s += -1e100;
        assert_eq!(s.sum(), 1.0);
    }

    #[test]
    fn tenth_sum_is_exact() {
        let s: NeumaierSum = std::iter::repeat_n(0.1, 10).sum();
        assert_eq!(s.sum(), 1.0);
        let naive: f64 = std::iter::repeat_n(0.1, 10).sum();
        assert_ne!(naive, 1.0);
    }

    #[test]
    fn pairwise_matches_short_and_long() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}

//! Log-space accumulation helpers.

/// Streaming `ln Σ exp(x_k)` with a running max shift.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self { max: f64::NEG_INFINITY, scaled_sum: 0.0 }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled_sum += (x - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    /// Combines two partial accumulations.
    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            *self = *other;
            return;
        }
        if other.max <= self.max {
            self.scaled_sum += other.scaled_sum * (other.max - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - other.max).exp() + other.scaled_sum;
            self.max = other.max;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled_sum.ln()
        }
    }
}

/// `ln Σ exp(x_k)` over a slice, two-pass with the exact maximum as shift.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streaming_matches_two_pass() {
        let xs = [3.0, -1.0, 710.0, 709.5, -200.0, 12.0];
        let mut acc = LogSumExp::new();
        for &x in &xs {
            acc.push(x);
        }
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-12);
        // naive form overflows here
        assert!(xs.iter().map(|x| x.exp()).sum::<f64>().is_infinite());
    }

    #[test]
    fn merge_is_order_independent() {
        let (a, b) = ([1.0, 5.0, -3.0], [40.0, 2.0]);
        let mut left = LogSumExp::new();
        a.iter().for_each(|&x| left.push(x));
        let mut right = LogSumExp::new();
        b.iter().for_each(|&x| right.push(x));
        let mut lr = left;
        lr.merge(&right);
        let mut rl = right;
        rl.merge(&left);
        let all = log_sum_exp(&[1.0, 5.0, -3.0, 40.0, 2.0]);
        assert!((lr.value() - all).abs() < 1e-12);
        assert!((rl.value() - all).abs() < 1e-12);
    }

    #[test]
    fn empty_is_negative_infinity() {
        assert_eq!(LogSumExp::new().value(), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}

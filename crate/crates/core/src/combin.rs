//! Exact and log-domain combinatorial helpers.

use num_bigint::BigUint;
use num_traits::One;

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n (n-1) ... (n-k+1)`, zero when `k > n`.
pub fn falling(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    ((n - k + 1) as u64..=n as u64).fold(BigUint::one(), |acc, x| acc * x)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division is exact.
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln(sum(exp(x_i)))` with the largest term factored out; `-inf` for no terms.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = CompensatedSum::default();
    for &t in terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}

/// Table of `ln k!` for `k <= n_max`, accumulated with compensated summation.
#[derive(Clone, Debug)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        let mut acc = CompensatedSum::default();
        table.push(0.0);
        for k in 1..=n_max {
            acc.add((k as f64).ln());
            table.push(acc.value());
        }
        LnFactorial { table }
    }

    pub fn n_max(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(falling(5, 2), BigUint::from(20u32));
        assert_eq!(falling(2, 3), BigUint::ZERO);
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(binomial(3, 5), BigUint::ZERO);
    }

    #[test]
    fn ln_factorial_matches_statrs() {
        let t = LnFactorial::new(200_000);
        for k in [0usize, 1, 10, 170, 171, 1000, 200_000] {
            let want = statrs::function::factorial::ln_factorial(k as u64);
            assert!((t.get(k) - want).abs() <= 1e-12 * want.max(1.0), "{k}");
        }
    }

    #[test]
    fn log_sum_exp_of_nothing() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
    }
}

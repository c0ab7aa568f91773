//! Empirical distributions and Kolmogorov–Smirnov distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted sample with a right-continuous step CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
}

impl EmpiricalDistribution {
    /// NaN values are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN in sample".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    /// Fraction of the sample `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (zero for a single value).
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m) * (v - m)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Nearest-rank quantile for `p` in `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.values.len();
        let rank = (p.clamp(0.0, 1.0) * n as f64).ceil() as usize;
        self.values[rank.clamp(1, n) - 1]
    }

    /// Distinct sample values with the CDF just before and at each.
    fn jumps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.values.len() as f64;
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.values.len() {
                return None;
            }
            let x = self.values[i];
            let below = i as f64 / n;
            while i < self.values.len() && self.values[i] == x {
                i += 1;
            }
            Some((x, below, i as f64 / n))
        })
    }
}

pub fn empirical_cdf(values: Vec<f64>) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::new(values)
}

/// `sup_x |F_emp(x) - F(x)|` for a continuous `cdf`, attained at a jump of
/// the step function (from the left or at the jump).
pub fn ks_distance<F: FnMut(f64) -> f64>(emp: &EmpiricalDistribution, mut cdf: F) -> f64 {
    emp.jumps()
        .map(|(x, below, at)| {
            let c = cdf(x);
            (c - below).abs().max((at - c).abs())
        })
        .fold(0.0, f64::max)
}

/// `sup_x |F_1(x) - F_2(x)|` over the merged jump points.
pub fn two_sample_ks(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xs, ys) = (a.values(), b.values());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0.0f64;
    while i < xs.len() || j < ys.len() {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] == x {
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Asymptotic two-sample KS critical value `c(alpha) sqrt((n + m)/(n m))`
/// with `c = sqrt(-ln(alpha / 2) / 2)`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_example() {
        let emp = empirical_cdf(vec![3.0, 1.0, 2.0]).unwrap();
        // At x = 1: 1/3 - 1/4; at x = 2: 2/3 - 1/2; at x = 3: |2/3 - 3/4| from
        // the left and 1 - 3/4 at the jump. The supremum is 1/4.
        let d = ks_distance(&emp, |x| (x / 4.0).clamp(0.0, 1.0));
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn right_continuity_and_ties() {
        let emp = empirical_cdf(vec![1.0, 1.0, 2.0, 5.0]).unwrap();
        assert_eq!(emp.cdf(0.999), 0.0);
        assert_eq!(emp.cdf(1.0), 0.5);
        assert_eq!(emp.cdf(4.9), 0.75);
        assert_eq!(emp.cdf(5.0), 1.0);
        assert_eq!(ks_distance(&emp, |x| emp.cdf(x)), 0.5);
        assert_eq!(emp.quantile(0.5), 1.0);
        assert_eq!(emp.quantile(1.0), 5.0);
        assert!(empirical_cdf(vec![]).is_err());
    }

    #[test]
    fn own_step_cdf_left_limit() {
        // Distance to its own step CDF, evaluated with left limits, is 0.
        let emp = empirical_cdf(vec![0.2, 0.4, 0.4, 0.9]).unwrap();
        let d = emp
            .jumps()
            .map(|(x, below, at)| {
                let left = emp.cdf(x - 1e-12);
                (left - below).abs().max((at - emp.cdf(x)).abs())
            })
            .fold(0.0, f64::max);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn two_sample_examples() {
        let a = empirical_cdf(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(two_sample_ks(&a, &a.clone()), 0.0);
        let b = empirical_cdf(vec![4.0, 5.0]).unwrap();
        assert_eq!(two_sample_ks(&a, &b), 1.0);
        let c = empirical_cdf(vec![1.5, 2.5]).unwrap();
        assert!((two_sample_ks(&a, &c) - 1.0 / 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn two_sample_matches_pointwise_sup(
            xs in proptest::collection::vec(0u8..20, 1..30),
            ys in proptest::collection::vec(0u8..20, 1..30),
        ) {
            let a = empirical_cdf(xs.iter().map(|&v| v as f64).collect()).unwrap();
            let b = empirical_cdf(ys.iter().map(|&v| v as f64).collect()).unwrap();
            let brute = (0..20).map(|x| (a.cdf(x as f64) - b.cdf(x as f64)).abs()).fold(0.0, f64::max);
            prop_assert!((two_sample_ks(&a, &b) - brute).abs() < 1e-15);
            prop_assert!((two_sample_ks(&b, &a) - brute).abs() < 1e-15);
        }
    }
}

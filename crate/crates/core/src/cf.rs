//! Rationals, continued fractions and convergents.
//!
//! Everything here is exact integer arithmetic on `u64` with `u128`
//! intermediates for products. Denominators never exceed `2^63` in this crate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// gcd of all components. Empty input gives 0.
pub fn setwise_gcd(values: &[u64]) -> u64 {
    values.iter().fold(0, |g, &v| gcd(g, v))
}

/// Inverse of `a` modulo `m`, in `[1, m)`.
///
/// `m = 1` is accepted and yields 0 (the only residue); callers that need a
/// unit in `[1, m)` must pass `m >= 2`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(0);
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NoInverse { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// A non-negative reduced fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        let g = gcd(num, den);
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// True when the value lies strictly inside `(0, 1)`.
    pub fn in_unit_interval(&self) -> bool {
        self.num > 0 && self.num < self.den
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Partial quotients `[h_1, ..., h_s]` of a number in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    quotients: Vec<u64>,
    source: Rational,
}

impl ContinuedFraction {
    /// Builds an expansion from explicit quotients. The quotients need not be
    /// canonical; the source value is reconstructed from them.
    pub fn from_quotients(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() || quotients.contains(&0) {
            return Err(Error::Domain("quotients must be non-empty and >= 1".into()));
        }
        let table = convergent_recurrence(&quotients)?;
        let source = Rational::new(*table.p.last().unwrap(), *table.q.last().unwrap())?;
        Ok(ContinuedFraction { quotients, source })
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn source(&self) -> Rational {
        self.source
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `h_i` with 1-based indexing.
    pub fn quotient(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).and_then(|j| self.quotients.get(j).copied())
    }

    /// Last quotient is at least 2 whenever the expansion has two or more terms.
    pub fn is_canonical(&self) -> bool {
        self.quotients.len() < 2 || *self.quotients.last().unwrap() >= 2
    }

    /// Window `h_{center-k} ..= h_{center+k}` clipped to the valid indices
    /// `1..=len`. Returns the first index actually covered and the quotients.
    pub fn window(&self, center: usize, k: usize) -> (usize, Vec<u64>) {
        let lo = center.saturating_sub(k).max(1);
        let hi = (center + k).min(self.quotients.len());
        if lo > hi {
            return (lo, Vec::new());
        }
        (lo, self.quotients[lo - 1..hi].to_vec())
    }
}

/// Euclidean-algorithm expansion of `x` in `(0, 1)`.
pub fn cf_expand(x: Rational) -> Result<ContinuedFraction> {
    if !x.in_unit_interval() {
        return Err(Error::Domain(format!("{x} is not in (0, 1)")));
    }
    let (mut a, mut b) = (x.den, x.num);
    let mut quotients = Vec::new();
    while b != 0 {
        quotients.push(a / b);
        (a, b) = (b, a % b);
    }
    Ok(ContinuedFraction {
        quotients,
        source: x,
    })
}

/// Convergent numerators and denominators `p_0..p_s`, `q_0..q_s` with
/// `p_0 = 0`, `q_0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentTable {
    pub p: Vec<u64>,
    pub q: Vec<u64>,
}

impl ConvergentTable {
    /// Index of the last convergent.
    pub fn last_index(&self) -> usize {
        self.q.len() - 1
    }

    pub fn convergent(&self, s: usize) -> Option<(u64, u64)> {
        Some((*self.p.get(s)?, *self.q.get(s)?))
    }
}

fn convergent_recurrence(quotients: &[u64]) -> Result<ConvergentTable> {
    let mut p = Vec::with_capacity(quotients.len() + 1);
    let mut q = Vec::with_capacity(quotients.len() + 1);
    p.push(0u64);
    q.push(1u64);
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    for &h in quotients {
        let (p_cur, q_cur) = (*p.last().unwrap(), *q.last().unwrap());
        let p_next = h
            .checked_mul(p_cur)
            .and_then(|v| v.checked_add(p_prev))
            .ok_or(Error::Overflow("convergent numerator"))?;
        let q_next = h
            .checked_mul(q_cur)
            .and_then(|v| v.checked_add(q_prev))
            .ok_or(Error::Overflow("convergent denominator"))?;
        p.push(p_next);
        q.push(q_next);
        (p_prev, q_prev) = (p_cur, q_cur);
    }
    Ok(ConvergentTable { p, q })
}

/// Convergents of an expansion via `q_s = h_s q_{s-1} + q_{s-2}`.
pub fn convergents(cf: &ContinuedFraction) -> ConvergentTable {
    // Quotients of a stored expansion reproduce its source, so no overflow.
    convergent_recurrence(&cf.quotients).expect("convergents of a valid expansion")
}

/// Smallest `s` with `q_s >= r`. Ties `q_s = r` resolve to that `s`.
pub fn stop_index(table: &ConvergentTable, r: f64) -> Result<usize> {
    if !(r >= 1.0) {
        return Err(Error::Domain(format!("stopping radius {r} < 1")));
    }
    table
        .q
        .iter()
        .position(|&q| q as f64 >= r)
        .ok_or(Error::ExpansionTooShort {
            last: *table.q.last().unwrap(),
            target: r,
        })
}

/// CDF of the Gauss measure, `log2(1 + x)`.
pub fn gauss_cdf(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("gauss_cdf argument {x} outside [0, 1]")));
    }
    Ok(x.ln_1p() / std::f64::consts::LN_2)
}

/// Density of the Gauss measure, `1 / (ln 2 (1 + x))`.
pub fn gauss_density(x: f64) -> f64 {
    1.0 / (std::f64::consts::LN_2 * (1.0 + x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(cf_expand(r(7, 10)).unwrap().quotients(), &[1, 2, 3]);
        assert_eq!(cf_expand(r(1, 2)).unwrap().quotients(), &[2]);
        assert_eq!(cf_expand(r(2, 5)).unwrap().quotients(), &[2, 2]);
    }

    #[test]
    fn expand_rejects_endpoints() {
        assert!(cf_expand(r(0, 3)).is_err());
        assert!(cf_expand(r(3, 3)).is_err());
        assert!(cf_expand(r(5, 3)).is_err());
    }

    #[test]
    fn convergent_examples() {
        let t = convergents(&cf_expand(r(7, 10)).unwrap());
        assert_eq!(t.q, vec![1, 1, 3, 10]);
        assert_eq!(t.p, vec![0, 1, 2, 7]);

        let t = convergents(&cf_expand(r(1, 2)).unwrap());
        assert_eq!(t.q, vec![1, 2]);
        assert_eq!(t.p, vec![0, 1]);

        let fib = ContinuedFraction::from_quotients(vec![1, 1, 1, 1, 1]).unwrap();
        assert_eq!(convergents(&fib).q, vec![1, 1, 2, 3, 5, 8]);
        assert!(!fib.is_canonical());
        assert_eq!(fib.source(), r(5, 8));
    }

    #[test]
    fn stop_index_examples() {
        let t = ConvergentTable {
            p: vec![0, 1, 2, 7],
            q: vec![1, 1, 3, 10],
        };
        assert_eq!(stop_index(&t, 5.0).unwrap(), 3);
        assert_eq!(stop_index(&t, 3.0).unwrap(), 2);
        assert!(matches!(
            stop_index(&t, 100.0),
            Err(Error::ExpansionTooShort { .. })
        ));
        let t = ConvergentTable {
            p: vec![0, 1],
            q: vec![1, 2],
        };
        assert_eq!(stop_index(&t, 1.0).unwrap(), 0);
    }

    #[test]
    fn gauss_cdf_values() {
        assert_eq!(gauss_cdf(0.0).unwrap(), 0.0);
        assert!((gauss_cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gauss_cdf(0.5).unwrap() - 0.584_962_500_721_156).abs() < 1e-12);
        assert!(gauss_cdf(-0.1).is_err());
        assert!(gauss_cdf(1.1).is_err());
        // Derivative matches the density.
        let h = 1e-6;
        for &x in &[0.1, 0.4, 0.9] {
            let d = (gauss_cdf(x + h).unwrap() - gauss_cdf(x - h).unwrap()) / (2.0 * h);
            assert!((d - gauss_density(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 10).unwrap(), 7);
        assert_eq!(mod_inverse(1, 17).unwrap(), 1);
        assert!(matches!(mod_inverse(4, 6), Err(Error::NoInverse { .. })));
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
    }

    #[test]
    fn setwise_gcd_examples() {
        assert_eq!(setwise_gcd(&[6, 10, 15]), 1);
        assert_eq!(setwise_gcd(&[4, 6, 8]), 2);
        assert_eq!(setwise_gcd(&[7, 7, 7]), 7);
    }

    #[test]
    fn window_clips_to_valid_indices() {
        let cf = ContinuedFraction::from_quotients(vec![1, 2, 3, 4]).unwrap();
        assert_eq!(cf.window(1, 2), (1, vec![1, 2, 3]));
        assert_eq!(cf.window(4, 1), (3, vec![3, 4]));
        assert_eq!(cf.window(2, 0), (2, vec![2]));
    }

    #[test]
    fn exhaustive_round_trip_small_denominators() {
        for den in 2..=300u64 {
            for num in 1..den {
                if gcd(num, den) != 1 {
                    continue;
                }
                let x = r(num, den);
                let cf = cf_expand(x).unwrap();
                assert!(cf.is_canonical());
                let t = convergents(&cf);
                assert_eq!((t.p[t.last_index()], t.q[t.last_index()]), (num, den));
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_determinant(den in 2u64..=10_000, seed in any::<u64>()) {
            let num = 1 + seed % (den - 1);
            let x = r(num, den);
            let cf = cf_expand(x).unwrap();
            prop_assert!(cf.quotients().iter().all(|&h| h >= 1));
            prop_assert!(cf.is_canonical());
            let t = convergents(&cf);
            let s = t.last_index();
            prop_assert_eq!(Rational::new(t.p[s], t.q[s]).unwrap(), x);
            for i in 1..=s {
                let det = t.p[i] as i128 * t.q[i - 1] as i128 - t.p[i - 1] as i128 * t.q[i] as i128;
                // Alternating sign starting from p_1 q_0 - p_0 q_1 = 1.
                prop_assert_eq!(det, if i % 2 == 1 { 1 } else { -1 });
                // Every intermediate convergent reproduces its truncated expansion.
                let trunc = ContinuedFraction::from_quotients(cf.quotients()[..i].to_vec()).unwrap();
                prop_assert_eq!(trunc.source(), Rational::new(t.p[i], t.q[i]).unwrap());
            }
            for i in 2..=s {
                prop_assert!(t.q[i] > t.q[i - 1]);
            }
        }

        #[test]
        fn stop_index_brackets(den in 2u64..=10_000, seed in any::<u64>(), radius in 1.0f64..100.0) {
            let num = 1 + seed % (den - 1);
            let t = convergents(&cf_expand(r(num, den)).unwrap());
            if let Ok(s) = stop_index(&t, radius) {
                prop_assert!(t.q[s] as f64 >= radius);
                prop_assert!(s == 0 || (t.q[s - 1] as f64) < radius);
            } else {
                prop_assert!((*t.q.last().unwrap() as f64) < radius);
            }
        }

        #[test]
        fn mod_inverse_is_inverse(m in 2u64..100_000, a in 1u64..100_000) {
            match mod_inverse(a, m) {
                Ok(inv) => {
                    prop_assert!(inv >= 1 && inv < m);
                    prop_assert_eq!((a as u128 * inv as u128) % m as u128, 1);
                }
                Err(_) => prop_assert!(gcd(a, m) != 1),
            }
        }
    }
}

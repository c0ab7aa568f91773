//! Kloosterman sums and the lattice-point counts of modular hyperbolas
//! `uv = 1 (mod q)` in boxes, with the error envelopes they are compared to.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::arith::{euler_phi, gcd3, sigma0};
use crate::cf::{gcd, mod_inverse};
use crate::error::{Error, Result};

/// Units modulo `q` with their inverses, plus the `q`-th roots of unity.
#[derive(Debug, Clone)]
pub struct UnitTable {
    q: u64,
    /// `(x, x^{-1})` for every unit `x` in `1..=q`.
    units: Vec<(u64, u64)>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl UnitTable {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let units = if q == 1 {
            vec![(1, 1)]
        } else {
            (1..q)
                .filter(|&x| gcd(x, q) == 1)
                .map(|x| (x, mod_inverse(x, q).unwrap()))
                .collect()
        };
        let (cos, sin) = (0..q)
            .map(|k| {
                let angle = 2.0 * PI * k as f64 / q as f64;
                (angle.cos(), angle.sin())
            })
            .unzip();
        UnitTable { q, units, cos, sin }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    /// `K_q(m, n)` as `(re, im)`.
    pub fn kloosterman(&self, m: u64, n: u64) -> (f64, f64) {
        let q = self.q;
        let (m, n) = (m % q, n % q);
        let mut re = 0.0;
        let mut im = 0.0;
        for &(x, y) in &self.units {
            let k = ((m * x + n * y) % q) as usize;
            re += self.cos[k];
            im += self.sin[k];
        }
        (re, im)
    }
}

/// `K_q(m, n) = sum_{x, y in 1..=q, xy = 1 (mod q)} e(2 pi i (mx + ny) / q)`,
/// returned as `(re, im)`.
pub fn kloosterman_complex(q: u64, m: u64, n: u64) -> (f64, f64) {
    UnitTable::new(q).kloosterman(m, n)
}

/// Real value of `K_q(m, n)`; the imaginary part cancels under
/// `(x, y) -> (q - x, q - y)`.
pub fn kloosterman(q: u64, m: u64, n: u64) -> f64 {
    let (re, im) = kloosterman_complex(q, m, n);
    assert!(im.abs() < 1e-9, "imaginary part {im} of K_{q}({m}, {n})");
    re
}

/// `sigma0(q) gcd(m, n, q)^{1/2} q^{1/2}`.
pub fn estermann_bound(q: u64, m: u64, n: u64) -> f64 {
    sigma0(q) as f64 * (gcd3(m % q, n % q, q) as f64).sqrt() * (q as f64).sqrt()
}

/// `psi(q) = sigma0(q) ln^2(q + 1) q^{1/2}`.
pub fn psi_envelope(q: u64) -> f64 {
    let l = ((q + 1) as f64).ln();
    sigma0(q) as f64 * l * l * (q as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiBox {
    pub count: u64,
    pub main_term: f64,
    pub deviation: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Exact count of integer pairs `(u, v)` with `Q1 < u <= Q1 + P1`,
/// `Q2 < v <= Q2 + P2` and `uv = 1 (mod q)`, against `phi(q) P1 P2 / q^2`.
pub fn phi_box(q: u64, q1: f64, q2: f64, p1: f64, p2: f64) -> Result<PhiBox> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let qf = q as f64;
    if !(0.0..=qf).contains(&p1) || !(0.0..=qf).contains(&p2) {
        return Err(Error::Domain(format!("box sides ({p1}, {p2}) outside [0, {q}]")));
    }
    // Integers in (lo, lo + len].
    let range = |lo: f64, len: f64| ((lo.floor() as i64) + 1, (lo + len).floor() as i64);
    let (u_lo, u_hi) = range(q1, p1);
    let (v_lo, v_hi) = range(q2, p2);
    let qi = q as i64;
    // Number of v in [v_lo, v_hi] congruent to r mod q.
    let count_residue = |r: i64| -> u64 {
        if v_hi < v_lo {
            return 0;
        }
        let upto = |x: i64| (x - r).div_euclid(qi);
        (upto(v_hi) - upto(v_lo - 1)) as u64
    };
    let mut count = 0u64;
    for u in u_lo..=u_hi {
        let ur = u.rem_euclid(qi) as u64;
        let inv = if q == 1 {
            Some(0)
        } else if gcd(ur, q) == 1 {
            Some(mod_inverse(ur, q)?)
        } else {
            None
        };
        if let Some(v0) = inv {
            count += count_residue(v0 as i64);
        }
    }
    let main_term = euler_phi(q) as f64 / (qf * qf) * p1 * p2;
    let deviation = (count as f64 - main_term).abs();
    let envelope = psi_envelope(q);
    Ok(PhiBox {
        count,
        main_term,
        deviation,
        envelope,
        ratio: deviation / envelope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSum {
    pub w: f64,
    pub main_term: f64,
    pub deviation: f64,
    /// `A psi(q) sqrt(q)` with `A = a(1, 1)`.
    pub envelope: f64,
    pub ratio: f64,
}

/// `W = sum_{u, v in 1..=q} [uv = 1 (mod q)] a(u, v)` against
/// `phi(q)/q^2 sum a(u, v)`.
///
/// The weight must satisfy `a >= 0`, `D_{1,0} a <= 0`, `D_{0,1} a <= 0` and
/// `D_{1,1} a >= 0` on the grid; violations are rejected.
pub fn weighted_w<F: Fn(u64, u64) -> f64>(q: u64, a: F) -> Result<WeightedSum> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let n = q as usize;
    let grid: Vec<f64> = (1..=q)
        .flat_map(|u| (1..=q).map(move |v| (u, v)))
        .map(|(u, v)| a(u, v))
        .collect();
    let at = |u: usize, v: usize| grid[(u - 1) * n + (v - 1)];
    let peak = at(1, 1);
    let slack = 64.0 * f64::EPSILON * peak.abs().max(f64::MIN_POSITIVE);
    for u in 1..=n {
        for v in 1..=n {
            let here = at(u, v);
            let fail = |what| Error::WeightConditions {
                u: u as u64,
                v: v as u64,
                what,
            };
            if here < -slack {
                return Err(fail("a(u, v) >= 0"));
            }
            if u < n && at(u + 1, v) - here > slack {
                return Err(fail("D_{1,0} a <= 0"));
            }
            if v < n && at(u, v + 1) - here > slack {
                return Err(fail("D_{0,1} a <= 0"));
            }
            if u < n && v < n && at(u + 1, v + 1) - at(u + 1, v) - at(u, v + 1) + here < -slack {
                return Err(fail("D_{1,1} a >= 0"));
            }
        }
    }
    let table = UnitTable::new(q);
    let w: f64 = table.units.iter().map(|&(u, v)| at(u as usize, v as usize)).sum();
    let total: f64 = grid.iter().sum();
    let main_term = euler_phi(q) as f64 / (q as f64 * q as f64) * total;
    let deviation = (w - main_term).abs();
    let envelope = peak * psi_envelope(q) * (q as f64).sqrt();
    Ok(WeightedSum {
        w,
        main_term,
        deviation,
        envelope,
        ratio: deviation / envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kloosterman_at_zero_is_phi() {
        for q in 1..=60 {
            assert!((kloosterman(q, 0, 0) - euler_phi(q) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn k5_direct_complex_sum() {
        // x^{-1} mod 5: 1->1, 2->3, 3->2, 4->4.
        let pairs = [(1.0, 1.0), (2.0, 3.0), (3.0, 2.0), (4.0, 4.0)];
        let direct: f64 = pairs
            .iter()
            .map(|(x, y)| (2.0 * PI * (x + y) / 5.0).cos())
            .sum();
        assert!((kloosterman(5, 1, 1) - direct).abs() < 1e-12);
        let (_, im) = kloosterman_complex(5, 1, 1);
        assert!(im.abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_bounded() {
        for q in 1..=40u64 {
            let table = UnitTable::new(q);
            for m in 0..q {
                for n in 0..q {
                    let (re, im) = table.kloosterman(m, n);
                    assert!(im.abs() < 1e-9);
                    assert!((re - table.kloosterman(n, m).0).abs() < 1e-9);
                    assert!(re.abs() <= estermann_bound(q, m, n) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn phi_box_full_box_counts_units() {
        for q in [1u64, 2, 7, 12, 97, 360] {
            let b = phi_box(q, 0.0, 0.0, q as f64, q as f64).unwrap();
            assert_eq!(b.count, euler_phi(q));
        }
    }

    #[test]
    fn phi_box_hand_example() {
        // Inverses mod 7 of 1, 2, 3 are 1, 4, 5: only (1, 1) lies in [1, 3]^2.
        let b = phi_box(7, 0.0, 0.0, 3.0, 3.0).unwrap();
        assert_eq!(b.count, 1);
        // Shifted windows work modulo q: u in (7, 10] behaves like 1..=3.
        let b = phi_box(7, 7.0, 0.0, 3.0, 3.0).unwrap();
        assert_eq!(b.count, 1);
        assert!(phi_box(7, 0.0, 0.0, 8.0, 1.0).is_err());
    }

    #[test]
    fn phi_box_against_enumeration() {
        let q = 30u64;
        for (q1, q2, p1, p2) in [(0.5, 3.2, 17.3, 29.9), (-4.0, 11.0, 30.0, 7.5), (100.1, -55.7, 12.0, 21.0)] {
            let b = phi_box(q, q1, q2, p1, p2).unwrap();
            let mut count = 0;
            let (u0, u1) = ((q1 as f64).floor() as i64 + 1, (q1 + p1).floor() as i64);
            let (v0, v1) = ((q2 as f64).floor() as i64 + 1, (q2 + p2).floor() as i64);
            for u in u0..=u1 {
                for v in v0..=v1 {
                    if (u * v - 1).rem_euclid(q as i64) == 0 {
                        count += 1;
                    }
                }
            }
            assert_eq!(b.count, count);
        }
    }

    #[test]
    fn weighted_w_examples() {
        let c = weighted_w(97, |_, _| 1.0).unwrap();
        assert_eq!(c.w, euler_phi(97) as f64);
        assert!((c.main_term - euler_phi(97) as f64).abs() < 1e-9);

        for q in [101u64, 1009] {
            let qf = q as f64;
            let r = weighted_w(q, |u, v| 1.0 / ((u as f64 + qf) * (v as f64 + qf))).unwrap();
            assert!(r.deviation <= r.envelope, "{r:?}");
        }

        assert!(matches!(
            weighted_w(11, |u, _| u as f64),
            Err(Error::WeightConditions { what: "D_{1,0} a <= 0", .. })
        ));
    }
}

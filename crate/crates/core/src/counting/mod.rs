//! Counting functions over the set `M` of unimodular matrices
//! `S = (P P'; Q Q')`, `det S = +-1`, `1 <= Q <= Q'`, `0 <= P <= Q`,
//! `1 <= P' <= Q'`.
//!
//! For `alpha` in `(0, 1)`, `N(alpha, R)` counts the matrices of `M` with
//! `0 < S^{-1}(alpha) <= x1`, `Q <= x2 Q'`, `Q <= y1 R`, `R <= y2 Q'`, where
//! `S^{-1}(alpha) = (Q' alpha - P') / (P - Q alpha)`. The columns of such a
//! matrix are consecutive convergents of `alpha`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::digamma;
use crate::cf::{cf_expand, convergents, gcd, mod_inverse, Rational};
use crate::ensemble::random_unit_rational;
use crate::error::{Error, Result};

pub mod arith;
pub mod kloosterman;

pub use arith::{euler_identity_check, euler_phi, mobius, sigma0, ArithmeticSieve};
pub use kloosterman::{
    estermann_bound, kloosterman, kloosterman_complex, phi_box, psi_envelope, weighted_w, PhiBox,
    UnitTable, WeightedSum,
};

/// `(P P'; Q Q')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    pub p: u64,
    pub p_next: u64,
    pub q: u64,
    pub q_next: u64,
}

impl UnimodularMatrix {
    pub fn new(p: u64, p_next: u64, q: u64, q_next: u64) -> Self {
        UnimodularMatrix {
            p,
            p_next,
            q,
            q_next,
        }
    }

    pub fn det(&self) -> i128 {
        self.p as i128 * self.q_next as i128 - self.p_next as i128 * self.q as i128
    }

    pub fn in_m(&self) -> bool {
        self.det().abs() == 1
            && 1 <= self.q
            && self.q <= self.q_next
            && self.p <= self.q
            && 1 <= self.p_next
            && self.p_next <= self.q_next
    }

    /// `S^{-1}(a/b) = (Q' a - P' b) / (P b - Q a)` as an unreduced pair
    /// `(num, den)`.
    ///
    /// Writing `(a, b) = m (P, Q) + n (P', Q')` gives `S^{-1}(a/b) = m/n`.
    pub fn inverse_at(&self, alpha: Rational) -> (i128, i128) {
        let (a, b) = (alpha.num() as i128, alpha.den() as i128);
        let num = self.q_next as i128 * a - self.p_next as i128 * b;
        let den = self.p as i128 * b - self.q as i128 * a;
        (num, den)
    }
}

/// The matrices of `M` whose second row is `(q, q_next)`. There are two when
/// `gcd(q, q_next) = 1` and `q < q_next`.
pub fn row_completions(q: u64, q_next: u64) -> Vec<UnimodularMatrix> {
    if q == 0 || q > q_next || gcd(q, q_next) != 1 {
        return Vec::new();
    }
    let inv = mod_inverse(q, q_next).unwrap_or(0);
    let mut out = Vec::with_capacity(2);
    for sign in [1i128, -1] {
        // det = P Q' - P' Q = sign  =>  P' Q = -sign (mod Q').
        let r = (-sign * inv as i128).rem_euclid(q_next as i128) as u64;
        let p_next = if r == 0 { q_next } else { r };
        let numer = sign + p_next as i128 * q as i128;
        if numer < 0 || numer % q_next as i128 != 0 {
            continue;
        }
        let s = UnimodularMatrix::new((numer / q_next as i128) as u64, p_next, q, q_next);
        if s.in_m() {
            out.push(s);
        }
    }
    out
}

/// Arguments of the counting functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountArgs {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub r: f64,
    pub z: Option<f64>,
}

impl CountArgs {
    pub fn new(x1: f64, x2: f64, y1: f64, y2: f64, r: f64) -> Result<Self> {
        let args = CountArgs {
            x1,
            x2,
            y1,
            y2,
            r,
            z: None,
        };
        args.validate()?;
        Ok(args)
    }

    pub fn with_z(mut self, z: f64) -> Result<Self> {
        self.z = Some(z);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.g_args().validate()?;
        if !(self.r >= 2.0) || !self.r.is_finite() {
            return Err(Error::Domain(format!("R = {} must be >= 2", self.r)));
        }
        if let Some(z) = self.z {
            if !(z > 0.0 && z <= 1.0) {
                return Err(Error::Domain(format!("z = {z} outside (0, 1]")));
            }
        }
        Ok(())
    }

    pub fn g_args(&self) -> crate::analytic::GArgs {
        crate::analytic::GArgs {
            x1: self.x1,
            x2: self.x2,
            y1: self.y1,
            y2: self.y2,
        }
    }

    fn z_or_one(&self) -> f64 {
        self.z.unwrap_or(1.0)
    }

    /// `Q <= x2 Q'`, `Q <= y1 R`, `R <= y2 Q'`.
    fn row_ok(&self, q: u64, q_next: u64) -> bool {
        (q as f64) <= self.x2 * q_next as f64
            && (q as f64) <= self.y1 * self.r
            && self.r <= self.y2 * q_next as f64
    }

    /// `0 < m/n <= x1` for positive `n`.
    fn ratio_ok(&self, m: i128, n: i128) -> bool {
        m > 0 && n > 0 && (m as f64) <= self.x1 * n as f64
    }
}

/// Candidate matrices for `alpha`: consecutive convergents of the canonical
/// expansion, plus the last pair of the expansion ending in a 1, paired with
/// the exact value `S^{-1}(alpha) = m/n`. Only members of `M` with `m, n > 0`
/// are returned.
pub fn matrices_for_alpha(alpha: Rational) -> Result<Vec<(UnimodularMatrix, (i128, i128))>> {
    let cf = cf_expand(alpha)?;
    let t = convergents(&cf);
    let s = t.last_index();
    let mut candidates: Vec<UnimodularMatrix> = (1..=s)
        .map(|j| UnimodularMatrix::new(t.p[j - 1], t.p[j], t.q[j - 1], t.q[j]))
        .collect();
    // [h_1, ..., h_s] = [h_1, ..., h_s - 1, 1]: the pair ending at
    // [h_1, ..., h_s - 1] has tail exactly 1.
    candidates.push(UnimodularMatrix::new(
        t.p[s - 1],
        t.p[s] - t.p[s - 1],
        t.q[s - 1],
        t.q[s] - t.q[s - 1],
    ));
    Ok(candidates
        .into_iter()
        .filter(UnimodularMatrix::in_m)
        .filter_map(|m| {
            let (num, den) = m.inverse_at(alpha);
            let sign = den.signum();
            (num * sign > 0).then_some((m, (num * sign, den * sign)))
        })
        .collect())
}

/// `N_{x1,x2,y1,y2}(alpha, R)`.
pub fn count_for_alpha(alpha: Rational, args: &CountArgs) -> Result<u64> {
    Ok(matrices_for_alpha(alpha)?
        .into_iter()
        .filter(|(s, (m, n))| args.ratio_ok(*m, *n) && args.row_ok(s.q, s.q_next))
        .count() as u64)
}

/// `sum_{b <= R^2} sum_{a <= z b, gcd(a, b) = 1} N(a/b, R)`, straight from the
/// definition.
pub fn l_definitional(args: &CountArgs) -> Result<u64> {
    let bmax = (args.r * args.r).floor() as u64;
    let z = args.z_or_one();
    (2..=bmax)
        .into_par_iter()
        .map(|b| {
            let mut acc = 0u64;
            for a in 1..b {
                if (a as f64) > z * b as f64 {
                    break;
                }
                if gcd(a, b) == 1 {
                    acc += count_for_alpha(Rational::new(a, b)?, args)?;
                }
            }
            Ok(acc)
        })
        .sum()
}

/// Number of solutions of `mQ + nQ' <= R^2`, `0 < m/n <= x1`, `gcd(m, n) = 1`,
/// `Q <= x2 Q'`, `Q <= y1 R`, `R <= y2 Q'` over `S` in `M`; with `z` set,
/// additionally `mP + nP' <= z (mQ + nQ')`.
pub fn l_bruteforce(args: &CountArgs) -> Result<u64> {
    let r2 = args.r * args.r;
    if r2 > 1e7 {
        return Err(Error::Overflow("brute-force enumeration radius"));
    }
    let bmax = r2.floor() as u64;
    let z = args.z_or_one();
    Ok((1..=bmax)
        .into_par_iter()
        .map(|q_next| {
            let mut acc = 0u64;
            for q in 1..=q_next {
                if !args.row_ok(q, q_next) {
                    continue;
                }
                for s in row_completions(q, q_next) {
                    for n in 1u64.. {
                        if q + n * q_next > bmax {
                            break;
                        }
                        for m in 1..=n {
                            let b = m * q + n * q_next;
                            if b > bmax || !args.ratio_ok(m as i128, n as i128) {
                                break;
                            }
                            if gcd(m, n) != 1 {
                                continue;
                            }
                            let a = m * s.p + n * s.p_next;
                            if (a as f64) <= z * b as f64 {
                                acc += 1;
                            }
                        }
                    }
                }
            }
            acc
        })
        .sum())
}

/// Value of a counting sum split into a directly summed head
/// (`Q' < split`) and a closed-form tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedSum {
    pub value: f64,
    pub head: f64,
    pub tail: f64,
    pub split: u64,
}

/// `N(R) = 2 sum_{Q' >= R/y2} sum_{gcd(Q, Q') = 1, Q <= x2 Q', Q <= y1 R}
/// x1 / (Q' (Q' + x1 Q))`.
pub fn n_closed_sum(args: &CountArgs) -> Result<ClosedSum> {
    closed_sum(args, 1.0)
}

/// `N_z(R)`: as [`n_closed_sum`] restricted to completions with `P' <= z Q'`.
pub fn n_z_closed_sum(args: &CountArgs) -> Result<ClosedSum> {
    let z = args
        .z
        .ok_or_else(|| Error::Domain("N_z needs z".into()))?;
    closed_sum(args, z)
}

fn closed_sum(args: &CountArgs, z: f64) -> Result<ClosedSum> {
    args.validate()?;
    let x1 = args.x1;
    let first = (args.r / args.y2).ceil().max(1.0) as u64;
    let first = (first.saturating_sub(2)..first + 2)
        .find(|&qn| qn >= 1 && args.r <= args.y2 * qn as f64)
        .unwrap();
    let split = first.max(1) + (4.0 * args.r / args.y2).ceil() as u64;
    let qmax = (args.y1 * args.r).floor() as u64;

    // Head: every Q' in [first, split) with the completions counted exactly.
    let head: f64 = (first..split)
        .into_par_iter()
        .map(|q_next| {
            let mut acc = 0.0;
            for q in 1..=qmax.min(q_next) {
                if !args.row_ok(q, q_next) {
                    continue;
                }
                let weight = completion_weight(q, q_next, z);
                if weight > 0 {
                    acc += weight as f64 * x1 / (q_next as f64 * (q_next as f64 + x1 * q as f64));
                }
            }
            acc
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();

    // Tail: for Q' >= split > Q both completions exist; P'/Q' equidistributes,
    // so the restricted tail is z times the full one. With Möbius inversion
    // over d | Q and x1 / (dj (dj + x1 Q)) = (1/(Qd)) (1/j - 1/(j + x1 Q/d)),
    //   sum_{Q' >= L, gcd(Q', Q) = 1} x1 / (Q'(Q' + x1 Q))
    //     = sum_{d | Q} mu(d) / (Q d) (psi(J_d + x1 Q / d) - psi(J_d)),
    // with J_d = ceil(L / d).
    let mut tail = 0.0;
    for q in 1..=qmax {
        let mut lower = ((q as f64 / args.x2).ceil() as u64).max(1);
        while lower > 1 && (q as f64) <= args.x2 * (lower - 1) as f64 {
            lower -= 1;
        }
        while (q as f64) > args.x2 * lower as f64 {
            lower += 1;
        }
        let lower = lower.max(split);
        let qf = q as f64;
        for (d, mu) in arith::squarefree_divisors(q) {
            let j = lower.div_ceil(d) as f64;
            let c = x1 * qf / d as f64;
            tail += mu as f64 / (qf * d as f64) * (digamma(j + c) - digamma(j));
        }
    }
    let tail = 2.0 * z * tail;
    Ok(ClosedSum {
        value: head + tail,
        head,
        tail,
        split,
    })
}

/// Completions of `(q, q_next)` in `M` with `P' <= z Q'`.
fn completion_weight(q: u64, q_next: u64, z: f64) -> u32 {
    if z >= 1.0 {
        if gcd(q, q_next) != 1 {
            return 0;
        }
        return if q < q_next { 2 } else { 1 };
    }
    row_completions(q, q_next)
        .iter()
        .filter(|s| (s.p_next as f64) <= z * q_next as f64)
        .count() as u32
}

/// Monte Carlo estimate of `int_0^1 N(alpha, R) d alpha` (or over `(0, z)`
/// when `z` is set) with its standard error.
pub fn n_monte_carlo(args: &CountArgs, samples: usize, seed: u64) -> Result<(f64, f64)> {
    args.validate()?;
    let z = args.z_or_one();
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let alpha = random_unit_rational(&mut rng);
                let v = if alpha.to_f64() <= z {
                    count_for_alpha(alpha, args)? as f64
                } else {
                    0.0
                };
                s += v;
                s2 += v * v;
            }
            Ok((s, s2))
        })
        .collect();
    let (mut s, mut s2) = (0.0, 0.0);
    for p in parts {
        let (a, b) = p?;
        s += a;
        s2 += b;
    }
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

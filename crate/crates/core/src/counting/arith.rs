//! Multiplicative functions.

use crate::cf::gcd;

/// Prime factorisation by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1, "mobius(0) is undefined");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi(0) is undefined");
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Number of divisors.
pub fn sigma0(n: u64) -> u64 {
    assert!(n >= 1, "sigma0(0) is undefined");
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Squarefree divisors `d` of `n` with their Möbius values.
pub fn squarefree_divisors(n: u64) -> Vec<(u64, i64)> {
    let mut out = vec![(1u64, 1i64)];
    for (p, _) in factorize(n) {
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i];
            out.push((d * p, -mu));
        }
    }
    out
}

/// `phi(n) / n = sum_{d | n} mu(d) / d`, checked exactly after multiplying
/// through by `n`.
pub fn euler_identity_check(n: u64) -> bool {
    let rhs: i64 = divisors(n).iter().map(|&d| mobius(d) * (n / d) as i64).sum();
    rhs == euler_phi(n) as i64
}

/// Linear sieve of `mu`, `phi` and `sigma0` on `1..=limit`.
#[derive(Debug, Clone)]
pub struct ArithmeticSieve {
    pub mu: Vec<i8>,
    pub phi: Vec<u64>,
    pub sigma0: Vec<u32>,
}

impl ArithmeticSieve {
    pub fn new(limit: usize) -> Self {
        let n = limit + 1;
        let mut mu = vec![0i8; n];
        let mut phi = vec![0u64; n];
        let mut sigma0 = vec![0u32; n];
        // Exponent of the smallest prime factor, needed for sigma0.
        let mut min_exp = vec![0u32; n];
        let mut primes: Vec<usize> = Vec::new();
        let mut composite = vec![false; n];
        if n > 1 {
            mu[1] = 1;
            phi[1] = 1;
            sigma0[1] = 1;
        }
        for i in 2..n {
            if !composite[i] {
                primes.push(i);
                mu[i] = -1;
                phi[i] = i as u64 - 1;
                sigma0[i] = 2;
                min_exp[i] = 1;
            }
            for &p in &primes {
                let ip = i * p;
                if ip >= n {
                    break;
                }
                composite[ip] = true;
                if i % p == 0 {
                    mu[ip] = 0;
                    phi[ip] = phi[i] * p as u64;
                    min_exp[ip] = min_exp[i] + 1;
                    sigma0[ip] = sigma0[i] / (min_exp[i] + 1) * (min_exp[ip] + 1);
                    break;
                }
                mu[ip] = -mu[i];
                phi[ip] = phi[i] * (p as u64 - 1);
                min_exp[ip] = 1;
                sigma0[ip] = sigma0[i] * 2;
            }
        }
        ArithmeticSieve { mu, phi, sigma0 }
    }
}

/// `gcd(m, n, q)` with the convention `gcd(0, 0, q) = q`.
pub fn gcd3(m: u64, n: u64, q: u64) -> u64 {
    gcd(gcd(m, n), q)
}

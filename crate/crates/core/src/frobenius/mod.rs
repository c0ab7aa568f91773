//! Exact Frobenius numbers.
//!
//! The production path is [`frobenius_apery`]: shortest paths on the residue
//! graph modulo the smallest generator. [`frobenius_sieve`] is a brute-force
//! oracle and [`rotation`] holds the circle-rotation max–min formulation for
//! triples.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::cf::{gcd, setwise_gcd};
use crate::error::{Error, Result};

pub mod rotation;

pub use rotation::{
    divisor_reduction, eta_partition, frobenius_rotation_maxmin, maxmin_structure_diagnostic,
    DivisorReduction, EtaInterval, EtaPartition, IntervalKind, StructureDiagnostic, RotationOptimum,
};

/// Generators `a_1, ..., a_n` (`n >= 2`, every component positive).
///
/// Coprimality is not enforced at construction so that samplers can build
/// and reject tuples; every Frobenius routine checks it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntTuple(Vec<u64>);

impl IntTuple {
    pub fn new(components: Vec<u64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::Domain("a tuple needs at least two components".into()));
        }
        if components.contains(&0) {
            return Err(Error::Domain("tuple components must be positive".into()));
        }
        Ok(IntTuple(components))
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn gcd(&self) -> u64 {
        setwise_gcd(&self.0)
    }

    pub fn is_coprime(&self) -> bool {
        self.gcd() == 1
    }

    pub fn min(&self) -> u64 {
        *self.0.iter().min().unwrap()
    }

    pub fn max(&self) -> u64 {
        *self.0.iter().max().unwrap()
    }

    fn require_coprime(&self) -> Result<()> {
        match self.gcd() {
            1 => Ok(()),
            g => Err(Error::NotCoprime { gcd: g }),
        }
    }
}

impl std::fmt::Display for IntTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `a1 a2 - a1 - a2`.
pub fn sylvester(a1: u64, a2: u64) -> Result<i64> {
    if a1 == 0 || a2 == 0 {
        return Err(Error::Domain("generators must be positive".into()));
    }
    match gcd(a1, a2) {
        1 => {}
        g => return Err(Error::NotCoprime { gcd: g }),
    }
    let v = a1 as i128 * a2 as i128 - a1 as i128 - a2 as i128;
    i64::try_from(v).map_err(|_| Error::Overflow("sylvester"))
}

/// Least representable element of every residue class modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AperyTable {
    pub modulus: u64,
    pub minima: Vec<u64>,
}

impl AperyTable {
    /// `F_1 = max_r minima[r]`.
    pub fn max_element(&self) -> u64 {
        *self.minima.iter().max().unwrap()
    }

    /// `F = F_1 - modulus`.
    pub fn frobenius(&self) -> i64 {
        self.max_element() as i64 - self.modulus as i64
    }
}

/// Apéry table of `a` with respect to the component at `modulus_index`.
///
/// Shortest paths on `Z_m` with edges `r -> r + a_i (mod m)` of weight `a_i`,
/// relaxed one generator at a time around the cycles of `r -> r + a_i`
/// (round-robin order). Each generator costs `O(m)`, with no priority queue;
/// [`apery_table_dijkstra`] computes the same table with a heap.
pub fn apery_table(a: &IntTuple, modulus_index: usize) -> Result<AperyTable> {
    a.require_coprime()?;
    let m = *a
        .components()
        .get(modulus_index)
        .ok_or_else(|| Error::Domain(format!("modulus index {modulus_index} out of range")))?;
    let size = usize::try_from(m).map_err(|_| Error::Overflow("apery table size"))?;

    let mut dist = vec![u64::MAX; size];
    dist[0] = 0;
    for (i, &g) in a.components().iter().enumerate() {
        if i == modulus_index || g % m == 0 {
            continue;
        }
        let d = gcd(g, m) as usize;
        let step = (g % m) as usize;
        let cycle = size / d;
        for class in 0..d {
            // Start each cycle at its current minimum; one lap then suffices.
            let mut r = (class..size)
                .step_by(d)
                .min_by_key(|&r| dist[r])
                .unwrap();
            if dist[r] == u64::MAX {
                continue;
            }
            for _ in 0..cycle {
                let mut next = r + step;
                if next >= size {
                    next -= size;
                }
                let cand = dist[r] + g;
                if cand < dist[next] {
                    dist[next] = cand;
                }
                r = next;
            }
        }
    }
    debug_assert!(dist.iter().all(|&d| d != u64::MAX));
    Ok(AperyTable {
        modulus: m,
        minima: dist,
    })
}

/// Apéry table of `a` with respect to the component at `modulus_index`,
/// computed by Dijkstra on `Z_m` with edges `r -> r + a_i (mod m)` of
/// weight `a_i`.
pub fn apery_table_dijkstra(a: &IntTuple, modulus_index: usize) -> Result<AperyTable> {
    a.require_coprime()?;
    let m = *a
        .components()
        .get(modulus_index)
        .ok_or_else(|| Error::Domain(format!("modulus index {modulus_index} out of range")))?;
    let size = usize::try_from(m).map_err(|_| Error::Overflow("apery table size"))?;

    let mut steps: Vec<u64> = a
        .components()
        .iter()
        .copied()
        .filter(|&g| g % m != 0)
        .collect();
    steps.sort_unstable();
    steps.dedup();

    let mut dist = vec![u64::MAX; size];
    dist[0] = 0;
    let mut heap = BinaryHeap::with_capacity(size);
    heap.push(Reverse((0u64, 0u64)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r as usize] {
            continue;
        }
        for &g in &steps {
            let next = (r + g % m) % m;
            let nd = d + g;
            if nd < dist[next as usize] {
                dist[next as usize] = nd;
                heap.push(Reverse((nd, next)));
            }
        }
    }
    debug_assert!(dist.iter().all(|&d| d != u64::MAX));
    Ok(AperyTable {
        modulus: m,
        minima: dist,
    })
}

/// Frobenius number via the Apéry table modulo the smallest generator.
/// Returns `-1` when some generator equals 1.
pub fn frobenius_apery(a: &IntTuple) -> Result<i64> {
    let idx = a
        .components()
        .iter()
        .enumerate()
        .min_by_key(|&(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap();
    Ok(apery_table(a, idx)?.frobenius())
}

/// Brute-force Frobenius number by sieving `[0, bound]`.
///
/// `bound` defaults to `a_min * a_max`. The answer is certified by checking
/// that the last `a_min` values of the window are representable; every larger
/// integer then follows by adding `a_min`.
pub fn frobenius_sieve(a: &IntTuple, bound: Option<u64>) -> Result<i64> {
    a.require_coprime()?;
    let (lo, hi) = (a.min(), a.max());
    let bound = match bound {
        Some(b) => b,
        None => lo.checked_mul(hi).ok_or(Error::Overflow("sieve bound"))?,
    };
    if bound + 1 < lo {
        return Err(Error::SieveBound { bound });
    }
    let len = usize::try_from(bound + 1).map_err(|_| Error::Overflow("sieve length"))?;
    let mut gens: Vec<usize> = a.components().iter().map(|&g| g as usize).collect();
    gens.sort_unstable();
    gens.dedup();

    let mut rep = vec![false; len];
    rep[0] = true;
    for x in 1..len {
        rep[x] = gens.iter().take_while(|&&g| g <= x).any(|&g| rep[x - g]);
    }
    if !rep[len - lo as usize..].iter().all(|&b| b) {
        return Err(Error::SieveBound { bound });
    }
    Ok(rep.iter().rposition(|&b| !b).map_or(-1, |x| x as i64))
}

/// `F(a) / N^{1 + 1/(n-1)}`.
pub fn normalized_f(a: &IntTuple, n_bound: u64) -> Result<f64> {
    if a.max() > n_bound {
        return Err(Error::Domain(format!(
            "component {} exceeds the ensemble bound {n_bound}",
            a.max()
        )));
    }
    let f = frobenius_apery(a)?;
    Ok(normalize(f, n_bound, a.len()))
}

pub(crate) fn normalize(f: i64, n_bound: u64, n: usize) -> f64 {
    let exponent = 1.0 + 1.0 / (n as f64 - 1.0);
    f as f64 / (n_bound as f64).powf(exponent)
}

/// `F(a) / sqrt(a1 a2 a3)` for a triple. Negative exactly when a generator is 1.
pub fn scaled_t(a: &IntTuple) -> Result<f64> {
    if a.len() != 3 {
        return Err(Error::Domain("scaled_t needs a triple".into()));
    }
    let f = frobenius_apery(a)?;
    Ok(scale_t(f, a.components()))
}

pub(crate) fn scale_t(f: i64, a: &[u64]) -> f64 {
    f as f64 / (a[0] as f64 * a[1] as f64 * a[2] as f64).sqrt()
}

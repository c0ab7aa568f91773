//! Circle-rotation view of the Frobenius problem for triples.
//!
//! With `a12 = a1^{-1} a2 (mod a3)` the congruence `x1 a1 + x2 a2 = r (mod a3)`
//! becomes `x1 + a12 x2 = r1 (mod a3)`: the point `r1 - x1` lies on the orbit
//! of 0 under the rotation `x -> x + a12` of the discrete circle `Z_{a3}`,
//! and `x2` is its orbit index. The partitions `eta^(p)` cut the circle at the
//! first `q_p + q_{p+1}` orbit points.

use serde::{Deserialize, Serialize};

use crate::cf::{cf_expand, convergents, gcd, mod_inverse, stop_index, ConvergentTable, Rational};
use crate::error::{Error, Result};

/// Optimal point of the max–min: `F1 = x1 a1 + x2 a2` with
/// `x1 + a12 x2 = r1 (mod a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationOptimum {
    pub f1: u64,
    pub a12: u64,
    pub r1: u64,
    pub x1: u64,
    pub x2: u64,
}

impl RotationOptimum {
    /// `F = F1 - a3`.
    pub fn frobenius(&self, a3: u64) -> i64 {
        self.f1 as i64 - a3 as i64
    }
}

fn require_unit_pairs(a1: u64, a2: u64, a3: u64) -> Result<()> {
    if a1 == 0 || a2 == 0 || a3 == 0 {
        return Err(Error::Domain("generators must be positive".into()));
    }
    for g in [gcd(a1, a3), gcd(a2, a3)] {
        if g != 1 {
            return Err(Error::NotCoprime { gcd: g });
        }
    }
    Ok(())
}

/// `F1 = max_{r1} min_{x1 + a12 x2 = r1 (mod a3)} (x1 a1 + x2 a2)`.
///
/// Direct evaluation over `x2 in [0, a3)`; for every `x2` the candidate values
/// `x2 a2 + ((r1 - a12 x2) mod a3) a1` are swept across all `r1`. The sweep
/// stops once `x2 a2` reaches the current maximum of the running minima, since
/// no later `x2` can lower any of them.
pub fn frobenius_rotation_maxmin(a1: u64, a2: u64, a3: u64) -> Result<RotationOptimum> {
    require_unit_pairs(a1, a2, a3)?;
    let m = a3 as usize;
    let a12 = if a3 == 1 {
        0
    } else {
        (mod_inverse(a1, a3)? as u128 * a2 as u128 % a3 as u128) as u64
    };

    let mut best = vec![u64::MAX; m];
    let mut arg = vec![0u64; m];
    let mut ceiling = u64::MAX;
    let mut c = 0usize;
    for x2 in 0..a3 {
        let base = x2 * a2;
        if base >= ceiling {
            break;
        }
        // r1 in [c, m): x1 = r1 - c;  r1 in [0, c): x1 = r1 + m - c.
        let mut val = base;
        for (b, g) in best[c..].iter_mut().zip(arg[c..].iter_mut()) {
            if val < *b {
                *b = val;
                *g = x2;
            }
            val += a1;
        }
        for (b, g) in best[..c].iter_mut().zip(arg[..c].iter_mut()) {
            if val < *b {
                *b = val;
                *g = x2;
            }
            val += a1;
        }
        ceiling = *best.iter().max().unwrap();
        c += a12 as usize;
        if c >= m {
            c -= m;
        }
    }

    let (r1, &f1) = best
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
        .unwrap();
    let x2 = arg[r1];
    let orbit = (a12 as u128 * x2 as u128 % a3 as u128) as u64;
    let x1 = (r1 as u64 + a3 - orbit) % a3;
    debug_assert_eq!(x1 * a1 + x2 * a2, f1);
    Ok(RotationOptimum {
        f1,
        a12,
        r1: r1 as u64,
        x1,
        x2,
    })
}

/// Factorisation `a1 = k1 a1'`, `a2 = k2 a2'`, `a3 = k1 k2 a3'` with
/// `k1 = gcd(a1, a3)`, `k2 = gcd(a2, a3)` and `b = a2' (a1')^{-1} mod a3'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorReduction {
    pub k1: u64,
    pub k2: u64,
    pub a1: u64,
    pub a2: u64,
    pub a3: u64,
    pub b: u64,
}

pub fn divisor_reduction(a1: u64, a2: u64, a3: u64) -> Result<DivisorReduction> {
    if a1 == 0 || a2 == 0 || a3 == 0 {
        return Err(Error::Domain("generators must be positive".into()));
    }
    let g = gcd(gcd(a1, a2), a3);
    if g != 1 {
        return Err(Error::NotCoprime { gcd: g });
    }
    let (k1, k2) = (gcd(a1, a3), gcd(a2, a3));
    if gcd(k1, k2) != 1 || a3 % (k1 * k2) != 0 {
        return Err(Error::Domain(format!(
            "{a3} is not divisible by k1 k2 = {k1} * {k2}"
        )));
    }
    let (r1, r2, r3) = (a1 / k1, a2 / k2, a3 / (k1 * k2));
    let b = if r3 == 1 {
        0
    } else {
        (r2 % r3) * mod_inverse(r1, r3)? % r3
    };
    Ok(DivisorReduction {
        k1,
        k2,
        a1: r1,
        a2: r2,
        a3: r3,
        b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    /// Image of `Delta_0^(p)`, bounded by 0 and `{q_p rho}`.
    Level,
    /// Image of `Delta_0^(p+1)`, bounded by 0 and `{q_{p+1} rho}`.
    Next,
}

/// One arc of the partition, measured in units of `1/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaInterval {
    pub start: u64,
    pub len: u64,
    /// Orbit index `j` of the left endpoint, `start = j * num mod den`.
    pub orbit_index: u64,
    pub kind: IntervalKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaPartition {
    pub level: usize,
    pub rho: Rational,
    /// Arcs sorted by starting point; they tile the circle.
    pub intervals: Vec<EtaInterval>,
}

impl EtaPartition {
    pub fn endpoints(&self) -> impl Iterator<Item = u64> + '_ {
        self.intervals.iter().map(|iv| iv.start)
    }

    pub fn count(&self, kind: IntervalKind) -> usize {
        self.intervals.iter().filter(|iv| iv.kind == kind).count()
    }

    /// Distinct arc lengths, ascending.
    pub fn lengths(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.intervals.iter().map(|iv| iv.len).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Distance from `q * num / den` to the nearest integer, in units of `1/den`.
/// `den * |q_p rho - p_p|`, the length of the arcs cut next to the
/// convergent `p_p / q_p`.
fn convergent_gap(table: &ConvergentTable, level: usize, rho: Rational) -> u64 {
    let a = table.q[level] as i128 * rho.num() as i128;
    let b = table.p[level] as i128 * rho.den() as i128;
    (a - b).unsigned_abs() as u64
}

/// The partition `eta^(p)` of the circle by the orbit points `{j rho}`,
/// `0 <= j < q_p + q_{p+1}`. Requires `p + 1 < s` where `s` is the length of
/// the expansion of `rho`, so that the orbit points are distinct.
pub fn eta_partition(rho: Rational, level: usize) -> Result<EtaPartition> {
    let cf = cf_expand(rho)?;
    let table = convergents(&cf);
    if level + 1 >= cf.len() {
        return Err(Error::LevelOutOfRange {
            level,
            len: cf.len(),
        });
    }
    let points = table.q[level] + table.q[level + 1];
    let den = rho.den();
    let mut starts: Vec<(u64, u64)> = (0..points)
        .map(|j| ((j as u128 * rho.num() as u128 % den as u128) as u64, j))
        .collect();
    starts.sort_unstable();

    let long = convergent_gap(&table, level, rho);
    let short = convergent_gap(&table, level + 1, rho);
    let intervals = starts
        .iter()
        .enumerate()
        .map(|(i, &(start, j))| {
            let end = starts.get(i + 1).map_or(den, |&(s, _)| s);
            let len = end - start;
            debug_assert!(len == long || len == short);
            EtaInterval {
                start,
                len,
                orbit_index: j,
                kind: if len == long {
                    IntervalKind::Level
                } else {
                    IntervalKind::Next
                },
            }
        })
        .collect();
    Ok(EtaPartition {
        level,
        rho,
        intervals,
    })
}

/// Observed structure of the max–min optimum relative to the partitions
/// `eta^(s1)`, `eta^(s1+1)`, ...
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureDiagnostic {
    pub optimum: RotationOptimum,
    /// Stopping index of `a12 / a3` at radius `sqrt(N)`.
    pub s1: usize,
    /// Smallest `m >= 0` such that `r1 - x1` is an endpoint of `eta^(s1+m)`.
    pub m1: usize,
    /// Whether the maximizing `r1` is the first or last point of an
    /// `eta^(s1)` arc on the discrete circle.
    pub r1_is_endpoint: bool,
    /// Number of `eta^(s1)` arcs met by the discrete arc `[r1 - x1, r1]`.
    pub m2: usize,
}

/// Number of orbit points cutting `eta^(p)`; capped at the circle size, with
/// `q_{s+1}` treated as infinite.
fn level_span(table: &ConvergentTable, level: usize, den: u64) -> u64 {
    match (table.q.get(level), table.q.get(level + 1)) {
        (Some(&a), Some(&b)) => (a + b).min(den),
        _ => den,
    }
}

pub fn maxmin_structure_diagnostic(
    a1: u64,
    a2: u64,
    a3: u64,
    n_bound: u64,
) -> Result<StructureDiagnostic> {
    let opt = frobenius_rotation_maxmin(a1, a2, a3)?;
    if a3 < 2 {
        return Err(Error::Domain("the rotation is trivial for a3 = 1".into()));
    }
    let rho = Rational::new(opt.a12, a3)?;
    let table = convergents(&cf_expand(rho)?);
    let s1 = stop_index(&table, (n_bound as f64).sqrt())?;
    let inv = mod_inverse(opt.a12, a3)?;
    let index_of = |x: u64| (x as u128 * inv as u128 % a3 as u128) as u64;

    // r1 - x1 = a12 * x2 is the orbit point with index x2.
    let m1 = (0..)
        .find(|&m| opt.x2 < level_span(&table, s1 + m, a3))
        .unwrap();

    let span = level_span(&table, s1, a3);
    let r1_is_endpoint = index_of(opt.r1) < span || index_of((opt.r1 + 1) % a3) < span;

    let mut cuts: Vec<u64> = (0..span)
        .map(|j| (j as u128 * opt.a12 as u128 % a3 as u128) as u64)
        .collect();
    cuts.sort_unstable();
    let left = (opt.r1 + a3 - opt.x1) % a3;
    // Cut points in the cyclic half-open arc (left, r1].
    let in_arc = |lo: u64, hi: u64| {
        cuts.partition_point(|&c| c <= hi) - cuts.partition_point(|&c| c <= lo)
    };
    let crossings = if left <= opt.r1 {
        in_arc(left, opt.r1)
    } else {
        in_arc(left, a3 - 1) + cuts.partition_point(|&c| c <= opt.r1)
    };

    Ok(StructureDiagnostic {
        optimum: opt,
        s1,
        m1,
        r1_is_endpoint,
        m2: crossings + 1,
    })
}

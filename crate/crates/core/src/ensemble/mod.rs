//! Seeded samplers for the ensembles of coprime triples, per-sample
//! statistics and the real-`alpha` reference.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). Work is split
//! into chunks of [`CHUNK`] accepted draws; chunk `c` uses the generator seeded
//! with the base seed on stream `c`. The output therefore depends only on the
//! configuration, never on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{cf_expand, convergents, gcd, mod_inverse, setwise_gcd, stop_index, Rational};
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_apery, normalize, scale_t, IntTuple};

pub mod io;
pub mod stats;

pub use io::{read_rows_csv, summarize_rows, write_records_csv, DistSummary, SampleRow, SampleSummary};
pub use stats::{empirical_cdf, ks_critical_value, ks_distance, two_sample_ks, EmpiricalDistribution};

/// Accepted draws per chunk.
pub const CHUNK: usize = 1024;

/// Below this acceptance rate (checked once [`MIN_ATTEMPTS`] draws were
/// made) the sampler gives up.
pub const MIN_ACCEPTANCE: f64 = 1e-6;
pub const MIN_ATTEMPTS: u64 = 1_000_000;

/// Which coprimality conditions a triple must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum EnsembleKind {
    /// Setwise coprime triples.
    #[default]
    #[serde(rename = "QN")]
    Coprime,
    /// Setwise coprime with `gcd(a1, a3) = 1`.
    #[serde(rename = "QN0")]
    CoprimeFirstLast,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Coprime => "QN",
            EnsembleKind::CoprimeFirstLast => "QN0",
        })
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "QN" | "qn" => Ok(EnsembleKind::Coprime),
            "QN0" | "qn0" => Ok(EnsembleKind::CoprimeFirstLast),
            other => Err(Error::Domain(format!("unknown ensemble {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n_bound: u64,
    pub count: usize,
    pub seed: u64,
    /// Half-width `k` of the quotient window around `s1`.
    pub window: usize,
    /// Required leading quotients of the expansion of `rho`.
    pub prefix: Option<Vec<u64>>,
    pub ensemble: EnsembleKind,
}

impl SampleConfig {
    pub fn new(n_bound: u64, count: usize, seed: u64) -> Self {
        SampleConfig {
            n_bound,
            count,
            seed,
            window: 0,
            prefix: None,
            ensemble: EnsembleKind::Coprime,
        }
    }

    pub fn with_ensemble(mut self, ensemble: EnsembleKind) -> Self {
        self.ensemble = ensemble;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn with_prefix(mut self, prefix: Vec<u64>) -> Self {
        self.prefix = Some(prefix);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bound < 2 {
            return Err(Error::Domain(format!("ensemble bound {} < 2", self.n_bound)));
        }
        if self.n_bound > 1 << 31 {
            return Err(Error::Domain(format!("ensemble bound {} too large", self.n_bound)));
        }
        if self.count == 0 {
            return Err(Error::Domain("sample count must be positive".into()));
        }
        if let Some(p) = &self.prefix {
            if p.is_empty() || p.contains(&0) {
                return Err(Error::Domain("prefix quotients must be non-empty and >= 1".into()));
            }
        }
        Ok(())
    }

    /// Whether a triple belongs to the configured (possibly conditioned)
    /// ensemble.
    pub fn accepts(&self, a: [u64; 3]) -> bool {
        if setwise_gcd(&a) != 1 {
            return false;
        }
        let first_last = gcd(a[0], a[2]) == 1;
        if self.ensemble == EnsembleKind::CoprimeFirstLast && !first_last {
            return false;
        }
        match &self.prefix {
            None => true,
            Some(prefix) => first_last && rho_starts_with(a, prefix),
        }
    }
}

/// `rho = (a1^{-1} a2 mod a3) / a3`, reduced. `None` unless `gcd(a1, a3) = 1`
/// and `a3 >= 2`.
pub fn rho_of(a: [u64; 3]) -> Option<Rational> {
    let [a1, a2, a3] = a;
    if a3 < 2 || gcd(a1, a3) != 1 {
        return None;
    }
    let inv = mod_inverse(a1 % a3, a3).ok()?;
    let num = (inv as u128 * a2 as u128 % a3 as u128) as u64;
    Rational::new(num, a3).ok()
}

fn rho_starts_with(a: [u64; 3], prefix: &[u64]) -> bool {
    let Some(rho) = rho_of(a) else {
        return false;
    };
    let (mut x, mut y) = (rho.den(), rho.num());
    for &h in prefix {
        if y == 0 || x / y != h {
            return false;
        }
        (x, y) = (y, x % y);
    }
    true
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_sizes(count: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
    (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(move |c| (c, CHUNK.min(count - c * CHUNK)))
}

fn draw_chunk(config: &SampleConfig, chunk: usize, len: usize) -> Result<Vec<[u64; 3]>> {
    let mut rng = chunk_rng(config.seed, chunk);
    let n = config.n_bound;
    let mut out = Vec::with_capacity(len);
    let mut attempts = 0u64;
    while out.len() < len {
        attempts += 1;
        let a = [rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(1..=n)];
        if config.accepts(a) {
            out.push(a);
        }
        if attempts >= MIN_ATTEMPTS && (out.len() as f64) < MIN_ACCEPTANCE * attempts as f64 {
            return Err(Error::LowAcceptance {
                accepted: out.len() as u64,
                attempts,
                threshold: MIN_ACCEPTANCE,
            });
        }
    }
    Ok(out)
}

fn collect_chunks<T: Send>(parts: Vec<Result<Vec<T>>>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Uniform draws from the configured ensemble by rejection from `{1..N}^3`.
pub fn sample_ensemble(config: &SampleConfig) -> Result<Vec<IntTuple>> {
    config.validate()?;
    let parts: Vec<Result<Vec<IntTuple>>> = chunk_sizes(config.count)
        .map(|(c, len)| {
            Ok(draw_chunk(config, c, len)?
                .into_iter()
                .map(|a| IntTuple::new(a.to_vec()).expect("positive components"))
                .collect())
        })
        .collect();
    collect_chunks(parts)
}

/// Why continued-fraction statistics are missing from a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CfStatus {
    Present,
    /// `gcd(a1, a3) > 1`: `rho` is undefined.
    NotCoprime,
    /// `a3 = 1` or `rho = 0`: the rotation is trivial.
    Degenerate,
    /// The reduced denominator of `rho` is below `sqrt(N)`, so no convergent
    /// reaches the stopping radius.
    Short,
}

/// One ensemble draw with its derived statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub a: [u64; 3],
    /// Frobenius number and its two normalisations; absent in records built
    /// by [`make_cf_record`].
    pub frobenius: Option<i64>,
    pub f_n: Option<f64>,
    pub t: Option<f64>,
    pub k1: u64,
    pub k2: u64,
    pub rho: Option<Rational>,
    pub cf_status: CfStatus,
    pub s1: Option<usize>,
    /// `q_{s1} / sqrt(N)`.
    pub q_ratio: Option<f64>,
    /// First index covered by `window` (1-based).
    pub window_start: Option<usize>,
    /// `h_{s1-k} ..= h_{s1+k}`, clipped to the expansion.
    pub window: Vec<u64>,
}

fn check_triple(a: &IntTuple, n_bound: u64) -> Result<[u64; 3]> {
    let c = a.components();
    if c.len() != 3 {
        return Err(Error::Domain(format!("records need a triple, got {a}")));
    }
    if a.max() > n_bound {
        return Err(Error::Domain(format!("{a} exceeds the ensemble bound {n_bound}")));
    }
    if !a.is_coprime() {
        return Err(Error::NotCoprime { gcd: a.gcd() });
    }
    Ok([c[0], c[1], c[2]])
}

/// All statistics of a triple, including its Frobenius number.
pub fn make_record(a: &IntTuple, n_bound: u64, k: usize) -> Result<SampleRecord> {
    let triple = check_triple(a, n_bound)?;
    let f = frobenius_apery(a)?;
    let mut record = cf_fields(triple, n_bound, k)?;
    record.frobenius = Some(f);
    record.f_n = Some(normalize(f, n_bound, 3));
    record.t = Some(scale_t(f, &triple));
    Ok(record)
}

/// Continued-fraction statistics only; the Frobenius fields stay empty.
pub fn make_cf_record(a: &IntTuple, n_bound: u64, k: usize) -> Result<SampleRecord> {
    cf_fields(check_triple(a, n_bound)?, n_bound, k)
}

fn cf_fields(a: [u64; 3], n_bound: u64, k: usize) -> Result<SampleRecord> {
    let mut record = SampleRecord {
        a,
        frobenius: None,
        f_n: None,
        t: None,
        k1: gcd(a[0], a[2]),
        k2: gcd(a[1], a[2]),
        rho: None,
        cf_status: CfStatus::Present,
        s1: None,
        q_ratio: None,
        window_start: None,
        window: Vec::new(),
    };
    if record.k1 != 1 {
        record.cf_status = CfStatus::NotCoprime;
        return Ok(record);
    }
    record.rho = rho_of(a);
    let rho = match record.rho {
        Some(r) if r.num() > 0 => r,
        _ => {
            record.cf_status = CfStatus::Degenerate;
            return Ok(record);
        }
    };
    let cf = cf_expand(rho)?;
    let table = convergents(&cf);
    let radius = (n_bound as f64).sqrt();
    match stop_index(&table, radius) {
        Ok(s1) => {
            let (start, window) = cf.window(s1, k);
            record.s1 = Some(s1);
            record.q_ratio = Some(table.q[s1] as f64 / radius);
            record.window_start = Some(start);
            record.window = window;
        }
        Err(Error::ExpansionTooShort { .. }) => record.cf_status = CfStatus::Short,
        Err(e) => return Err(e),
    }
    Ok(record)
}

/// Samples and builds records; `with_frobenius = false` skips the Frobenius
/// numbers (much faster at large `N`).
pub fn sample_records(config: &SampleConfig, with_frobenius: bool) -> Result<Vec<SampleRecord>> {
    config.validate()?;
    let parts: Vec<Result<Vec<SampleRecord>>> = chunk_sizes(config.count)
        .map(|(c, len)| {
            draw_chunk(config, c, len)?
                .into_iter()
                .map(|a| {
                    let tuple = IntTuple::new(a.to_vec())?;
                    if with_frobenius {
                        make_record(&tuple, config.n_bound, config.window)
                    } else {
                        make_cf_record(&tuple, config.n_bound, config.window)
                    }
                })
                .collect()
        })
        .collect();
    collect_chunks(parts)
}

/// Uniform `alpha` in `(0, 1)` as `u / 2^63` with `u` uniform in
/// `1..2^63`, reduced.
///
/// The expansion of such a rational agrees with that of a uniform real up to
/// the convergent with denominator `R` except with probability of order
/// `R^2 / 2^63`, which is negligible for the radii used here.
pub fn random_unit_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let u = rng.gen_range(1..1u64 << 63);
    Rational::new(u, 1 << 63).expect("nonzero denominator")
}

/// Statistics of one random real at stopping radius `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDraw {
    /// `q_{s(R)} / R`.
    pub q_ratio: f64,
    /// `q_{s(R)-1} / R`.
    pub prev_ratio: f64,
    pub s: usize,
    pub window_start: usize,
    pub window: Vec<u64>,
}

/// `count` draws of `q_{s(R)}/R` and the quotient window around `s(R)` for
/// random reals.
pub fn real_alpha_reference(
    radius: f64,
    count: usize,
    seed: u64,
    k: usize,
) -> Result<Vec<ReferenceDraw>> {
    if !(radius >= 2.0) || radius > 1e8 {
        return Err(Error::Domain(format!("radius {radius} outside [2, 1e8]")));
    }
    let parts: Vec<Result<Vec<ReferenceDraw>>> = chunk_sizes(count)
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut out = Vec::with_capacity(len);
            while out.len() < len {
                let alpha = random_unit_rational(&mut rng);
                let cf = cf_expand(alpha)?;
                let table = convergents(&cf);
                // Denominators below R have probability about R^2 / 2^63;
                // such draws are skipped.
                let Ok(s) = stop_index(&table, radius) else {
                    continue;
                };
                let (window_start, window) = cf.window(s, k);
                out.push(ReferenceDraw {
                    q_ratio: table.q[s] as f64 / radius,
                    prev_ratio: table.q[s - 1] as f64 / radius,
                    s,
                    window_start,
                    window,
                });
            }
            Ok(out)
        })
        .collect();
    collect_chunks(parts)
}

/// Joint frequencies of `(k1, k2) = (gcd(a1, a3), gcd(a2, a3))`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GcdPairTable {
    pub total: u64,
    pub counts: BTreeMap<(u64, u64), u64>,
}

impl GcdPairTable {
    pub fn frequency(&self, k1: u64, k2: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(&(k1, k2)).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Binomial standard error of [`GcdPairTable::frequency`].
    pub fn std_error(&self, k1: u64, k2: u64) -> f64 {
        let p = self.frequency(k1, k2);
        (p * (1.0 - p) / self.total.max(1) as f64).sqrt()
    }
}

pub fn gcd_pair_stats(records: &[SampleRecord]) -> GcdPairTable {
    let mut table = GcdPairTable::default();
    for r in records {
        *table.counts.entry((r.k1, r.k2)).or_default() += 1;
        table.total += 1;
    }
    table
}

/// `(k1, k2)` frequencies over every setwise coprime triple in `{1..N}^3`.
pub fn exact_gcd_pair_frequencies(n_bound: u64) -> Result<GcdPairTable> {
    if !(1..=200).contains(&n_bound) {
        return Err(Error::Domain(format!("exact enumeration limited to N <= 200, got {n_bound}")));
    }
    let mut table = GcdPairTable::default();
    for a1 in 1..=n_bound {
        for a2 in 1..=n_bound {
            let g12 = gcd(a1, a2);
            for a3 in 1..=n_bound {
                if gcd(g12, a3) == 1 {
                    *table.counts.entry((gcd(a1, a3), gcd(a2, a3))).or_default() += 1;
                    table.total += 1;
                }
            }
        }
    }
    Ok(table)
}

//! Named verification suites with machine-readable reports.
//!
//! Each check records the two compared quantities, their distance and the
//! envelope it must stay under. Random inputs come from ChaCha8 with a fixed
//! seed, so reports are reproducible.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{g_law, GArgs, ZETA2};
use crate::cf::gcd;
use crate::counting::{
    arith::euler_identity_check, estermann_bound, l_bruteforce, l_definitional, n_closed_sum,
    n_monte_carlo, n_z_closed_sum, phi_box, weighted_w, CountArgs, UnitTable,
};
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_apery, frobenius_rotation_maxmin, maxmin_structure_diagnostic, IntTuple};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Prop1,
    Prop2,
    Prop3,
    Kloosterman,
    PhiBox,
    WeightedW,
    Selmer,
    Lemmas,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Prop1,
        Suite::Prop2,
        Suite::Prop3,
        Suite::Kloosterman,
        Suite::PhiBox,
        Suite::WeightedW,
        Suite::Selmer,
        Suite::Lemmas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Prop3 => "prop3",
            Suite::Kloosterman => "kloosterman",
            Suite::PhiBox => "phi-box",
            Suite::WeightedW => "weighted-w",
            Suite::Selmer => "selmer",
            Suite::Lemmas => "lemmas",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown verification target {s:?}")))
    }
}

/// One comparison: `error = |lhs - rhs|` must not exceed `envelope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub args: Value,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
    pub envelope: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, args: Value, r: Option<f64>, lhs: f64, rhs: f64, envelope: f64) -> Self {
        let error = (lhs - rhs).abs();
        Check {
            name: name.into(),
            args,
            r,
            lhs,
            rhs,
            error,
            envelope,
            pass: error <= envelope,
        }
    }

    /// A measured quantity that must not exceed `limit`.
    pub fn at_most(name: impl Into<String>, args: Value, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            args,
            r: None,
            lhs: measured,
            rhs: limit,
            error: measured,
            envelope: limit,
            pass: measured <= limit,
        }
    }

    /// A measured quantity that must be at least `limit`.
    pub fn at_least(name: impl Into<String>, args: Value, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            args,
            r: None,
            lhs: measured,
            rhs: limit,
            error: (limit - measured).max(0.0),
            envelope: 0.0,
            pass: measured >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        Report {
            schema: 1,
            suite: suite.name().to_string(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

/// Optional replacements for the argument set, radius and `z` of the
/// counting suites.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CountingSetup {
    pub args: Option<[f64; 4]>,
    pub radius: Option<f64>,
    pub z: Option<f64>,
}

impl CountingSetup {
    fn sets(&self) -> Vec<[f64; 4]> {
        self.args.map_or(PROPOSITION_ARGS.to_vec(), |a| vec![a])
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Report> {
    run_suite_with(suite, seed, &CountingSetup::default())
}

pub fn run_suite_with(suite: Suite, seed: u64, setup: &CountingSetup) -> Result<Report> {
    let checks = match suite {
        Suite::Prop1 => prop1(seed, &setup.sets(), setup.radius.unwrap_or(2000.0))?,
        Suite::Prop2 => prop2(&setup.sets(), setup.radius.unwrap_or(20.0))?,
        Suite::Prop3 => {
            let zs = setup.z.map_or(vec![0.25, 0.5, 0.75, 1.0], |z| vec![z]);
            prop3(&setup.sets(), setup.radius.unwrap_or(2000.0), &zs)?
        }
        Suite::Kloosterman => kloosterman_suite(),
        Suite::PhiBox => phi_box_suite(seed)?,
        Suite::WeightedW => weighted_w_suite()?,
        Suite::Selmer => selmer(seed)?,
        Suite::Lemmas => lemmas(seed)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite_with(s, seed, setup)?.checks);
            }
            all
        }
    };
    Ok(Report::new(suite, checks))
}

/// The two argument sets used by the counting checks.
pub const PROPOSITION_ARGS: [[f64; 4]; 2] = [[0.5, 0.7, 0.8, 0.9], [1.0, 1.0, 1.0, 1.0]];

fn count_args(v: [f64; 4], r: f64) -> Result<CountArgs> {
    CountArgs::new(v[0], v[1], v[2], v[3], r)
}

fn args_json(v: [f64; 4]) -> Value {
    json!({"x1": v[0], "x2": v[1], "y1": v[2], "y2": v[3]})
}

fn g_of(v: [f64; 4]) -> Result<f64> {
    g_law(GArgs::new(v[0], v[1], v[2], v[3])?)
}

/// Closed sum against `G` with envelope `10 x1 ln R / R`, and a Monte Carlo
/// integral over `alpha` against the closed sum within three standard errors.
pub fn prop1(seed: u64, sets: &[[f64; 4]], r: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &v in sets {
        let args = count_args(v, r)?;
        let n = n_closed_sum(&args)?.value;
        let g = g_of(v)?;
        checks.push(Check::new("closed sum vs G", args_json(v), Some(r), n, g, 10.0 * v[0] * r.ln() / r));
        let (mc, se) = n_monte_carlo(&args, 200_000, seed)?;
        checks.push(Check::new("Monte Carlo vs closed sum", args_json(v), Some(r), mc, n, 3.0 * se));
    }
    Ok(checks)
}

/// `2 zeta(2) L / R^4` against `G` (absolute 0.1 at `R = 20`), and the
/// definitional identity at `R` in `{5, 8, 10}`.
pub fn prop2(sets: &[[f64; 4]], r: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &v in sets {
        let l = l_bruteforce(&count_args(v, r)?)? as f64;
        let scaled = 2.0 * ZETA2 * l / r.powi(4);
        checks.push(Check::new("scaled solution count vs G", args_json(v), Some(r), scaled, g_of(v)?, 0.1));
    }
    let sets = [[0.5, 0.7, 0.8, 0.9], [1.0, 1.0, 1.0, 1.0], [0.9, 0.4, 0.6, 1.0]];
    for r in [5.0, 8.0, 10.0] {
        for v in sets {
            let args = count_args(v, r)?;
            let lhs = l_definitional(&args)? as f64;
            let rhs = l_bruteforce(&args)? as f64;
            checks.push(Check::new("rational sum = solution count", args_json(v), Some(r), lhs, rhs, 0.0));
        }
    }
    Ok(checks)
}

/// `N_z` against `z G` with envelope `10 x1 ln^3 R / sqrt R`; `z = 1` must
/// reproduce the unrestricted closed sum exactly.
pub fn prop3(sets: &[[f64; 4]], r: f64, zs: &[f64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &v in sets {
        let base = count_args(v, r)?;
        let g = g_of(v)?;
        let envelope = 10.0 * v[0] * r.ln().powi(3) / r.sqrt();
        for &z in zs {
            let nz = n_z_closed_sum(&base.with_z(z)?)?.value;
            let mut a = args_json(v);
            a["z"] = json!(z);
            checks.push(Check::new("N_z vs z G", a, Some(r), nz, z * g, envelope));
        }
        let n1 = n_z_closed_sum(&base.with_z(1.0)?)?.value;
        let n = n_closed_sum(&base)?.value;
        checks.push(Check::new("N_1 = N", args_json(v), Some(r), n1, n, 0.0));
    }
    Ok(checks)
}

/// Estermann bound and symmetry for every `q <= 300`, `K_q(0, 0) = phi(q)`,
/// and `phi(n)/n = sum mu(d)/d` for `n <= 10^4`.
pub fn kloosterman_suite() -> Vec<Check> {
    let (mut worst_ratio, mut worst_im, mut worst_sym, mut worst_zero) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for q in 1..=300u64 {
        let table = UnitTable::new(q);
        let mut values = vec![0.0; (q * q) as usize];
        for m in 0..q {
            for n in 0..q {
                let (re, im) = table.kloosterman(m, n);
                values[(m * q + n) as usize] = re;
                worst_im = worst_im.max(im.abs());
                worst_ratio = worst_ratio.max(re.abs() / estermann_bound(q, m, n));
            }
        }
        for m in 0..q {
            for n in 0..m {
                let d = (values[(m * q + n) as usize] - values[(n * q + m) as usize]).abs();
                worst_sym = worst_sym.max(d);
            }
        }
        worst_zero = worst_zero.max((values[0] - table.unit_count() as f64).abs());
    }
    let euler_failures = (1..=10_000u64).filter(|&n| !euler_identity_check(n)).count();
    let q = json!({"q_max": 300});
    vec![
        Check::at_most("max |K| / Estermann bound", q.clone(), worst_ratio, 1.0 + 1e-9),
        Check::at_most("max |Im K|", q.clone(), worst_im, 1e-9),
        Check::at_most("max |K(m,n) - K(n,m)|", q.clone(), worst_sym, 1e-9),
        Check::at_most("max |K(0,0) - phi(q)|", q, worst_zero, 1e-9),
        Check::new("Euler identity failures", json!({"n_max": 10_000}), None, euler_failures as f64, 0.0, 0.0),
    ]
}

/// Deviation of the modular-hyperbola box count over `10^3` random boxes
/// with `q <= 10^4`, as a multiple of `sigma0(q) ln^2(q+1) sqrt q`.
pub fn phi_box_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_args = Value::Null;
    for _ in 0..1000 {
        let q = rng.gen_range(2..=10_000u64);
        let qf = q as f64;
        let (p1, p2) = (rng.gen_range(0.0..=qf), rng.gen_range(0.0..=qf));
        let (q1, q2) = (rng.gen_range(-qf..qf), rng.gen_range(-qf..qf));
        let b = phi_box(q, q1, q2, p1, p2)?;
        if b.ratio > worst {
            worst = b.ratio;
            worst_args = json!({"q": q, "Q1": q1, "Q2": q2, "P1": p1, "P2": p2});
        }
    }
    Ok(vec![Check::at_most("max box deviation ratio", worst_args, worst, 10.0)])
}

/// Weighted sums for a few monotone weights against `A psi(q) sqrt q`.
pub fn weighted_w_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for q in [97u64, 360, 1009, 2048] {
        let qf = q as f64;
        let weights: [(&str, Box<dyn Fn(u64, u64) -> f64>); 3] = [
            ("1/((u+q)(v+q))", Box::new(move |u, v| 1.0 / ((u as f64 + qf) * (v as f64 + qf)))),
            ("indicator u+v<=q", Box::new(move |u, v| if u + v <= q { 1.0 } else { 0.0 })),
            ("exp(-(u+v)/q)", Box::new(move |u, v| (-((u + v) as f64) / qf).exp())),
        ];
        for (name, w) in weights {
            let r = weighted_w(q, w)?;
            checks.push(Check::new(
                format!("W vs main term, a = {name}"),
                json!({"q": q}),
                None,
                r.w,
                r.main_term,
                r.envelope,
            ));
        }
    }
    Ok(checks)
}

fn random_unit_pair_triple(rng: &mut ChaCha8Rng, bound: u64, a3_min: u64) -> [u64; 3] {
    loop {
        let a = [
            rng.gen_range(1..=bound),
            rng.gen_range(1..=bound),
            rng.gen_range(a3_min..=bound),
        ];
        if gcd(a[0], a[2]) == 1 && gcd(a[1], a[2]) == 1 {
            return a;
        }
    }
}

/// `F = F1 - a3` on `10^4` random triples with `gcd(a1, a3) = gcd(a2, a3) = 1`
/// and components up to 2000.
pub fn selmer(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0u64;
    let mut first_bad = Value::Null;
    for _ in 0..10_000 {
        let [a1, a2, a3] = random_unit_pair_triple(&mut rng, 2000, 1);
        let f = frobenius_apery(&IntTuple::new(vec![a1, a2, a3])?)?;
        let rot = frobenius_rotation_maxmin(a1, a2, a3)?.frobenius(a3);
        if f != rot {
            mismatches += 1;
            if first_bad.is_null() {
                first_bad = json!({"a": [a1, a2, a3], "apery": f, "rotation": rot});
            }
        }
    }
    Ok(vec![Check::new(
        "rotation F1 - a3 = Apery F (mismatches)",
        json!({"triples": 10_000, "bound": 2000, "first_mismatch": first_bad}),
        None,
        mismatches as f64,
        0.0,
        0.0,
    )])
}

/// Structure of the max–min optimizer relative to the partitions
/// `eta^(s1)` over `10^3` triples with `a3 >= sqrt N` (`N = 2000`).
pub fn lemmas(seed: u64) -> Result<Vec<Check>> {
    let n = 2000u64;
    let a3_min = (n as f64).sqrt().ceil() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let trials = 1000;
    let (mut m1_ok, mut m2_ok, mut endpoint_ok) = (0u64, 0u64, 0u64);
    let mut m2_seen = Vec::with_capacity(trials);
    let mut m1_max = 0usize;
    for _ in 0..trials {
        let [a1, a2, a3] = random_unit_pair_triple(&mut rng, n, a3_min);
        let d = maxmin_structure_diagnostic(a1, a2, a3, n)?;
        m1_ok += (d.m1 <= 8) as u64;
        m2_ok += (d.m2 <= 12) as u64;
        endpoint_ok += d.r1_is_endpoint as u64;
        m1_max = m1_max.max(d.m1);
        m2_seen.push(d.m2);
    }
    m2_seen.sort_unstable();
    let args = json!({
        "N": n,
        "triples": trials,
        "m1_max": m1_max,
        "m2_median": m2_seen[trials / 2],
        "m2_q99": m2_seen[trials * 99 / 100],
        "m2_max": m2_seen[trials - 1],
    });
    let t = trials as f64;
    Ok(vec![
        Check::at_least("fraction with m1 <= 8", args.clone(), m1_ok as f64 / t, 0.99),
        Check::at_least("fraction with m2 <= 12", args.clone(), m2_ok as f64 / t, 0.99),
        Check::at_least("fraction with r1 an endpoint", args, endpoint_ok as f64 / t, 1.0),
    ])
}

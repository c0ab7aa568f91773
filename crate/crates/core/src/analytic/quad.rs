//! Adaptive Gauss–Kronrod quadrature and the integrals of the density `p(t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::density_p;
use crate::error::{Error, Result};

/// Integrals of the density are truncated here and the tail is extrapolated.
pub const DENSITY_TAIL_START: f64 = 1e4;

/// Largest error estimate accepted from [`cdf_p`] and [`moment_p`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-5;

const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive G7–K15 over consecutive `breakpoints`, splitting the
/// worst panel until the summed error estimate is below `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], abs_tol: f64) -> QuadratureResult {
    let mut heap: BinaryHeap<Panel> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= abs_tol || heap.len() >= MAX_PANELS {
            break;
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    QuadratureResult {
        value: panels.iter().map(|p| p.value).sum(),
        error_estimate: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    }
}

/// Panel breaks for the density: the branch points, then a roughly geometric
/// ladder out to the truncation point.
fn density_breaks(upper: f64) -> Vec<f64> {
    let mut v = vec![3f64.sqrt(), 2.0];
    v.extend(
        [
            2.05, 2.25, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0, 50.0, 100.0, 300.0, 1000.0, 3000.0,
        ]
        .iter()
        .copied()
        .filter(|&x| x < upper),
    );
    if upper > *v.last().unwrap() {
        v.push(upper);
    } else {
        v.retain(|&x| x <= upper);
        if *v.last().unwrap() < upper {
            v.push(upper);
        }
    }
    v
}

/// Coefficient `C` of the tail `p(t) ~ C / t^3`, Richardson-extrapolated from
/// `p(T) T^3` and `p(T/2) (T/2)^3` (the next correction is `O(T^-2)`), with
/// the size of the correction as its error.
fn tail_coefficient() -> (f64, f64) {
    let t = DENSITY_TAIL_START;
    let c_full = density_p(t) * t.powi(3);
    let c_half = density_p(t / 2.0) * (t / 2.0).powi(3);
    let c = (4.0 * c_full - c_half) / 3.0;
    (c, (c_full - c).abs())
}

/// Moment `int t^order p(t) dt` for `order` 0 or 1.
///
/// The second and higher moments diverge because `p(t)` decays like `t^-3`;
/// they are reported as a convergence failure.
pub fn moment_p(order: u32) -> Result<QuadratureResult> {
    if order >= 2 {
        return Err(Error::Quadrature {
            estimate: f64::INFINITY,
            tolerance: QUADRATURE_TOLERANCE,
        });
    }
    let k = order as i32;
    let upper = DENSITY_TAIL_START;
    let body = integrate(|t| t.powi(k) * density_p(t), &density_breaks(upper), 1e-12);
    let (c, c_err) = tail_coefficient();
    // int_T^inf C t^{k-3} dt = C T^{k-2} / (2 - k)
    let scale = upper.powi(k - 2) / (2 - k) as f64;
    let result = QuadratureResult {
        value: body.value + c * scale,
        error_estimate: body.error_estimate + c_err * scale,
        panels: body.panels,
    };
    check(result)
}

/// `int_0^t p(s) ds`.
pub fn cdf_p(t: f64) -> Result<QuadratureResult> {
    if t.is_nan() {
        return Err(Error::Domain("cdf_p of NaN".into()));
    }
    if t <= 3f64.sqrt() {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let upper = t.min(DENSITY_TAIL_START);
    let mut result = integrate(density_p, &density_breaks(upper), 1e-12);
    if t > DENSITY_TAIL_START {
        let (c, c_err) = tail_coefficient();
        let w = 0.5 * (DENSITY_TAIL_START.powi(-2) - t.powi(-2));
        result.value += c * w;
        result.error_estimate += c_err * w;
    }
    check(result)
}

fn check(result: QuadratureResult) -> Result<QuadratureResult> {
    if result.error_estimate > QUADRATURE_TOLERANCE || !result.value.is_finite() {
        return Err(Error::Quadrature {
            estimate: result.error_estimate,
            tolerance: QUADRATURE_TOLERANCE,
        });
    }
    Ok(result)
}

/// Tabulated CDF of `p(t)` for evaluating many points quickly: cumulative
/// integrals at fixed nodes plus one short adaptive integral per query.
#[derive(Debug, Clone)]
pub struct DensityCdf {
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
    tail_coefficient: f64,
}

impl DensityCdf {
    pub fn new() -> Self {
        let sqrt3 = 3f64.sqrt();
        let mut nodes = vec![sqrt3];
        let mut x = 1.74;
        while x < 2.0 {
            nodes.push(x);
            x += 0.005;
        }
        nodes.push(2.0);
        let mut i = 1;
        while 2.0 + 0.01 * i as f64 <= 10.0 {
            nodes.push(2.0 + 0.01 * i as f64);
            i += 1;
        }
        let mut x = 10.0f64;
        while x * 1.02 < DENSITY_TAIL_START {
            x *= 1.02;
            nodes.push(x);
        }
        nodes.push(DENSITY_TAIL_START);

        let mut cumulative = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in nodes.windows(2) {
            acc += integrate(density_p, w, 1e-15).value;
            cumulative.push(acc);
        }
        DensityCdf {
            nodes,
            cumulative,
            tail_coefficient: tail_coefficient().0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let first = self.nodes[0];
        let last = *self.nodes.last().unwrap();
        if !(t > first) {
            return 0.0;
        }
        if t >= last {
            let w = 0.5 * (last.powi(-2) - t.powi(-2));
            return *self.cumulative.last().unwrap() + self.tail_coefficient * w;
        }
        let i = self.nodes.partition_point(|&x| x <= t) - 1;
        self.cumulative[i] + integrate(density_p, &[self.nodes[i], t], 1e-15).value
    }
}

impl Default for DensityCdf {
    fn default() -> Self {
        Self::new()
    }
}

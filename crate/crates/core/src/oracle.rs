//! Independent numeric checks: monotone auxiliary functions, closed-form
//! derivatives against central differences, and brute-force re-scans that
//! bypass the tabulated game.

use std::f64::consts::LN_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{SuperadditivityCheck, SuperadditivityViolation, DEFAULT_EPS};
use crate::math::nonempty_subsets;
use crate::model::{validate, ChannelParams, Coalition};
use crate::value::coalition_value;

/// Successive decreases up to this size count as ties.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Relative agreement required between closed-form and numeric derivatives.
pub const DERIVATIVE_REL_TOL: f64 = 1e-6;

/// Largest game re-scanned by [`brute_force_superadditivity`].
pub const MAX_BRUTE_FORCE_TRANSMITTERS: usize = 6;

/// `ln((ω + p·s) / (ω + q·s))` without losing precision when the ratio is
/// close to one.
fn ln_ratio(p: f64, q: f64, s: f64, omega: f64) -> f64 {
    ((p - q) * s / (omega + q * s)).ln_1p()
}

/// `(1 + h1·u)(1 + h2·u)`.
fn quad(h1: f64, h2: f64, u: f64) -> f64 {
    (1.0 + h1 * u) * (1.0 + h2 * u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
}

impl FunctionId {
    pub const ALL: [FunctionId; 6] = [
        FunctionId::F1,
        FunctionId::F2,
        FunctionId::F3,
        FunctionId::F4,
        FunctionId::F5,
        FunctionId::F6,
    ];
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = FunctionId::ALL.iter().position(|id| id == self).unwrap() + 1;
        write!(f, "f{n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

/// The auxiliary functions, each with its parameters. `f1`–`f4` take a power
/// argument `x` and are in bits; `f5` and `f6` take a noise scale `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum AuxFunction {
    /// `½log₂[(1 + h1(kx + a)) / (1 + h2(kx + a))]`.
    F1 { k: u32, h1: f64, h2: f64, a: f64 },
    /// `f1_{1,h1,h2,ka}(x) − f1_{1,h1,h2,kb}(x)`.
    F2 {
        k: u32,
        h1: f64,
        h2: f64,
        a: f64,
        b: f64,
    },
    /// `(k+1)·f1_{k,h1,h2,a}(x) − k·f1_{k+1,h1,h2,a}(x)`.
    F3 { k: u32, h1: f64, h2: f64, a: f64 },
    /// `f1_{k+1,h1,h2,a}(x) − (k+1)·f1_{1,h1,h2,a+ck}(x)` on `[0, c)`.
    F4 {
        k: u32,
        h1: f64,
        h2: f64,
        a: f64,
        c: f64,
    },
    /// Ratio of two log-ratio differences in `ω`.
    F5 {
        h1: f64,
        h2: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    /// `log[(ω + h2(a+b)) / (ω + h1(a+b))] / log[(ω + h2·a) / (ω + h1·a)]`.
    F6 { h1: f64, h2: f64, a: f64, b: f64 },
}

fn domain(msg: impl Into<String>) -> Error {
    Error::DomainViolation(msg.into())
}

fn check_gains(h1: f64, h2: f64) -> Result<()> {
    if h1 >= 0.0 && h1 < h2 && h2 <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "need 0 ≤ h1 < h2 ≤ 1, got h1={h1}, h2={h2}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive, got {v}")))
    }
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be non-negative, got {v}")))
    }
}

fn f1_raw(k: f64, h1: f64, h2: f64, a: f64, x: f64) -> f64 {
    0.5 * ln_ratio(h1, h2, k * x + a, 1.0) / LN_2
}

impl AuxFunction {
    pub fn id(&self) -> FunctionId {
        match self {
            AuxFunction::F1 { .. } => FunctionId::F1,
            AuxFunction::F2 { .. } => FunctionId::F2,
            AuxFunction::F3 { .. } => FunctionId::F3,
            AuxFunction::F4 { .. } => FunctionId::F4,
            AuxFunction::F5 { .. } => FunctionId::F5,
            AuxFunction::F6 { .. } => FunctionId::F6,
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            AuxFunction::F5 { .. } | AuxFunction::F6 { .. } => Direction::NonDecreasing,
            _ => Direction::NonIncreasing,
        }
    }

    /// Checks the parameter constraints.
    pub fn validate(&self) -> Result<()> {
        let k_ok = |k: u32| {
            if k >= 1 {
                Ok(())
            } else {
                Err(domain("k must be at least 1"))
            }
        };
        match *self {
            AuxFunction::F1 { k, h1, h2, a } | AuxFunction::F3 { k, h1, h2, a } => {
                k_ok(k)?;
                check_gains(h1, h2)?;
                check_non_negative("a", a)
            }
            AuxFunction::F2 { k, h1, h2, a, b } => {
                k_ok(k)?;
                check_gains(h1, h2)?;
                check_non_negative("a", a)?;
                if b > a && b.is_finite() {
                    Ok(())
                } else {
                    Err(domain(format!("need b > a, got a={a}, b={b}")))
                }
            }
            AuxFunction::F4 { k, h1, h2, a, c } => {
                k_ok(k)?;
                check_gains(h1, h2)?;
                check_non_negative("a", a)?;
                check_positive("c", c)
            }
            AuxFunction::F5 { h1, h2, a, b, c, d } => {
                check_gains(h1, h2)?;
                for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
                    check_positive(name, v)?;
                }
                Ok(())
            }
            AuxFunction::F6 { h1, h2, a, b } => {
                check_gains(h1, h2)?;
                check_positive("a", a)?;
                check_non_negative("b", b)
            }
        }
    }

    /// Checks a point of the argument domain.
    pub fn check_argument(&self, x: f64) -> Result<()> {
        match *self {
            AuxFunction::F4 { c, .. } => {
                if (0.0..c).contains(&x) {
                    Ok(())
                } else {
                    Err(domain(format!("argument {x} outside [0, {c})")))
                }
            }
            AuxFunction::F5 { .. } | AuxFunction::F6 { .. } => check_positive("ω", x),
            _ => check_non_negative("argument", x),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.validate()?;
        self.check_argument(x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        match *self {
            AuxFunction::F1 { k, h1, h2, a } => f1_raw(k as f64, h1, h2, a, x),
            AuxFunction::F2 { k, h1, h2, a, b } => {
                let k = k as f64;
                let (u, w) = (k * a + x, k * b + x);
                // both log ratios merged into one to avoid cancellation
                let gap = (h2 - h1) * k * (b - a) / ((1.0 + h2 * u) * (1.0 + h1 * w));
                0.5 * gap.ln_1p() / LN_2
            }
            AuxFunction::F3 { k, h1, h2, a } => {
                let k = k as f64;
                (k + 1.0) * f1_raw(k, h1, h2, a, x) - k * f1_raw(k + 1.0, h1, h2, a, x)
            }
            AuxFunction::F4 { k, h1, h2, a, c } => {
                let k = k as f64;
                f1_raw(k + 1.0, h1, h2, a, x) - (k + 1.0) * f1_raw(1.0, h1, h2, a + c * k, x)
            }
            AuxFunction::F5 { h1, h2, a, b, c, d } => {
                let s3 = a + b + c;
                f5_log_pair(h1, h2, s3, d, x) / f5_log_pair(h1, h2, a, b, x)
            }
            AuxFunction::F6 { h1, h2, a, b } => ln_ratio(h2, h1, a + b, x) / ln_ratio(h2, h1, a, x),
        }
    }

    /// Closed-form derivative with respect to the argument.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.validate()?;
        self.check_argument(x)?;
        Ok(self.derivative_unchecked(x))
    }

    fn derivative_unchecked(&self, x: f64) -> f64 {
        // f1–f4 are in bits with a ½ factor; the expressions below are for
        // the natural-log functions without it
        let bits = 2.0 * LN_2;
        match *self {
            AuxFunction::F1 { k, h1, h2, a } => {
                let k = k as f64;
                let u = a + k * x;
                -(h2 - h1) * k / quad(h1, h2, u) / bits
            }
            AuxFunction::F2 { k, h1, h2, a, b } => {
                let k = k as f64;
                let (u, w) = (a * k + x, b * k + x);
                let num =
                    (h2 - h1) * k * (b - a) * (h1 * (h2 * (a * k + b * k + 2.0 * x) + 1.0) + h2);
                -num / (quad(h1, h2, u) * quad(h1, h2, w)) / bits
            }
            AuxFunction::F3 { k, h1, h2, a } => {
                let k = k as f64;
                let (u, w) = (a + k * x, a + k * x + x);
                let num = (h2 - h1)
                    * k
                    * (k + 1.0)
                    * x
                    * (h1 * (h2 * (2.0 * a + 2.0 * k * x + x) + 1.0) + h2);
                -num / (quad(h1, h2, u) * quad(h1, h2, w)) / bits
            }
            AuxFunction::F4 { k, h1, h2, a, c } => {
                let k = k as f64;
                let (u, w) = (a + k * x + x, a + c * k + x);
                let num = (h2 - h1)
                    * k
                    * (k + 1.0)
                    * (c - x)
                    * (h1 * (h2 * (2.0 * a + c * k + (k + 2.0) * x) + 1.0) + h2);
                -num / (quad(h1, h2, u) * quad(h1, h2, w)) / bits
            }
            AuxFunction::F5 { h1, h2, a, b, c, d } => {
                let den = f5_log_pair(h1, h2, a, b, x);
                -(h2 - h1) * a_omega(h1, h2, a, b, c, d, x) / (den * den)
            }
            AuxFunction::F6 { h1, h2, a, b } => {
                let s = a + b;
                let w = x;
                let la = ln_ratio(h2, h1, a, w);
                let ls = ln_ratio(h2, h1, s, w);
                let first = s * la / ((h1 * s + w) * (h2 * s + w));
                let second = a * ls / ((a * h1 + w) * (a * h2 + w));
                -(h2 - h1) * (first - second) / (la * la)
            }
        }
    }
}

/// `ln[(ω + h1·s)(ω + h2·(s + t)) / ((ω + h2·s)(ω + h1·(s + t)))]`. The
/// numerator and denominator products differ by exactly `ω(h2 − h1)t`.
fn f5_log_pair(h1: f64, h2: f64, s: f64, t: f64, omega: f64) -> f64 {
    let gap = omega * (h2 - h1) * t / ((omega + h2 * s) * (omega + h1 * (s + t)));
    gap.ln_1p()
}

/// The auxiliary quantity whose sign decides the sign of the `f5`
/// derivative; it is non-positive on the whole domain.
pub fn a_omega(h1: f64, h2: f64, a: f64, b: f64, c: f64, d: f64, omega: f64) -> f64 {
    let w = omega;
    let s2 = a + b;
    let s3 = s2 + c;
    let s4 = s3 + d;
    let upper = f5_log_pair(h1, h2, s3, d, w);
    let lower = f5_log_pair(h1, h2, a, b, w);
    let first = b * (a * h1 * h2 * s2 - w * w) * upper
        / ((a * h1 + w) * (a * h2 + w) * (h1 * s2 + w) * (h2 * s2 + w));
    let second = d * (h1 * h2 * s3 * s4 - w * w) * lower
        / ((h1 * s3 + w) * (h2 * s3 + w) * (h1 * s4 + w) * (h2 * s4 + w));
    first - second
}

/// `g(x) = (x·h1 + ω)(x·h2 + ω)·ln((x·h2 + ω)/(x·h1 + ω)) / x`.
pub fn g_aux(h1: f64, h2: f64, omega: f64, x: f64) -> f64 {
    (x * h1 + omega) * (x * h2 + omega) * ln_ratio(h2, h1, x, omega) / x
}

/// Derivative of [`g_aux`] in `x`, non-negative for `x, ω > 0`.
pub fn g_aux_derivative(h1: f64, h2: f64, omega: f64, x: f64) -> f64 {
    ((h1 * h2 * x * x - omega * omega) * ln_ratio(h2, h1, x, omega) + x * omega * (h2 - h1))
        / (x * x)
}

/// Central difference `(f(x + step) − f(x − step)) / (2·step)`.
pub fn finite_difference<F>(f: F, x: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(domain(format!("step must be positive, got {step}")));
    }
    Ok((f(x + step)? - f(x - step)?) / (2.0 * step))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneViolation {
    /// Index of the later grid point.
    pub index: usize,
    pub drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCheckReport {
    pub function: AuxFunction,
    pub direction: Direction,
    pub grid: Vec<f64>,
    pub first_violation: Option<MonotoneViolation>,
    /// Largest derivative value of the wrong sign over the grid; zero when
    /// every closed-form derivative has the expected sign.
    pub max_derivative_sign_error: f64,
    /// For `f3`, whether it is strictly negative at every positive grid point.
    pub strictly_negative: Option<bool>,
}

impl MonotoneCheckReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
            && self.max_derivative_sign_error <= MONOTONE_TOL
            && self.strictly_negative != Some(false)
    }
}

/// Compares successive grid values and the sign of the closed-form derivative.
pub fn check_monotone(f: &AuxFunction, grid: &[f64]) -> Result<MonotoneCheckReport> {
    f.validate()?;
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(domain("grid must be strictly increasing"));
    }
    for &x in grid {
        f.check_argument(x)?;
    }
    let values: Vec<f64> = grid.iter().map(|&x| f.eval_unchecked(x)).collect();
    let sign = match f.direction() {
        Direction::NonIncreasing => 1.0,
        Direction::NonDecreasing => -1.0,
    };
    let first_violation = values.windows(2).enumerate().find_map(|(i, w)| {
        // positive when the function moves the wrong way
        let drop = sign * (w[1] - w[0]);
        (drop > MONOTONE_TOL).then_some(MonotoneViolation { index: i + 1, drop })
    });
    let max_derivative_sign_error = grid
        .iter()
        .map(|&x| (sign * f.derivative_unchecked(x)).max(0.0))
        .fold(0.0, f64::max);
    let strictly_negative = matches!(f, AuxFunction::F3 { .. }).then(|| {
        grid.iter()
            .zip(&values)
            .filter(|(&x, _)| x > 0.0)
            .all(|(_, &v)| v < 0.0)
    });
    Ok(MonotoneCheckReport {
        function: *f,
        direction: f.direction(),
        grid: grid.to_vec(),
        first_violation,
        max_derivative_sign_error,
        strictly_negative,
    })
}

/// Superadditivity re-scan that evaluates every coalition value afresh
/// instead of reading a tabulated game.
pub fn brute_force_superadditivity(params: &ChannelParams) -> Result<SuperadditivityCheck> {
    let params = validate(params.clone())?;
    let n = params.num_transmitters();
    if n > MAX_BRUTE_FORCE_TRANSMITTERS {
        return Err(Error::TooManyTransmitters {
            count: n,
            max: MAX_BRUTE_FORCE_TRANSMITTERS,
        });
    }
    let full = Coalition::full(n);
    let v = |c: Coalition| coalition_value(&params, c).map(|r| r.bits());
    for s_bits in nonempty_subsets(full.bits()) {
        let s = Coalition::from_bits(s_bits);
        for t_bits in nonempty_subsets(s.complement(n).bits()) {
            let t = Coalition::from_bits(t_bits);
            let excess = v(s)? + v(t)? - v(s.union(t))?;
            if excess > DEFAULT_EPS {
                let (first, second) = if s < t { (s, t) } else { (t, s) };
                return Ok(SuperadditivityCheck {
                    holds: false,
                    violation: Some(SuperadditivityViolation {
                        first,
                        second,
                        excess,
                    }),
                });
            }
        }
    }
    Ok(SuperadditivityCheck {
        holds: true,
        violation: None,
    })
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn logspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let (a, b) = (start.log10(), stop.log10());
    linspace(a, b, points)
        .into_iter()
        .enumerate()
        .map(|(i, e)| match i {
            0 => start,
            _ if i + 1 == points => stop,
            _ => 10f64.powf(e),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub draws: usize,
    pub grid_points: usize,
    pub derivative_points: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0x5eed,
            draws: 1000,
            grid_points: 101,
            derivative_points: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionSummary {
    pub function: FunctionId,
    pub draws: usize,
    pub monotone_failures: usize,
    pub derivative_checks: usize,
    pub derivative_failures: usize,
    pub max_relative_derivative_error: f64,
    pub max_derivative_sign_error: f64,
    /// Worst witness of a failed draw, if any.
    pub first_failure: Option<AuxFunction>,
}

impl FunctionSummary {
    pub fn passed(&self) -> bool {
        self.monotone_failures == 0 && self.derivative_failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub functions: Vec<FunctionSummary>,
    /// Largest sampled value of [`a_omega`]; must not be positive.
    pub max_a_omega: f64,
    /// Number of sampled points where [`g_aux_derivative`] is negative
    /// beyond rounding.
    pub g_derivative_failures: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.functions.iter().all(FunctionSummary::passed)
            && self.max_a_omega <= MONOTONE_TOL
            && self.g_derivative_failures == 0
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn draw_gains(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let x: f64 = rng.random_range(0.0..1.0);
        let y: f64 = rng.random_range(0.0..1.0);
        let (h1, h2) = if x < y { (x, y) } else { (y, x) };
        if h2 - h1 > 1e-3 {
            return (h1, h2);
        }
    }
}

fn draw_function(id: FunctionId, rng: &mut ChaCha8Rng) -> AuxFunction {
    let (h1, h2) = draw_gains(rng);
    let k = rng.random_range(1..=5u32);
    let a = rng.random_range(0.0..=5.0);
    let pos = |rng: &mut ChaCha8Rng| rng.random_range(0.01..=5.0);
    match id {
        FunctionId::F1 => AuxFunction::F1 { k, h1, h2, a },
        FunctionId::F2 => AuxFunction::F2 {
            k,
            h1,
            h2,
            a,
            b: a + pos(rng),
        },
        FunctionId::F3 => AuxFunction::F3 { k, h1, h2, a },
        FunctionId::F4 => AuxFunction::F4 {
            k,
            h1,
            h2,
            a,
            c: rng.random_range(0.1..=5.0),
        },
        FunctionId::F5 => AuxFunction::F5 {
            h1,
            h2,
            a: pos(rng),
            b: pos(rng),
            c: pos(rng),
            d: pos(rng),
        },
        FunctionId::F6 => AuxFunction::F6 {
            h1,
            h2,
            a: pos(rng),
            b: pos(rng),
        },
    }
}

/// Argument grid covering the natural range of each function.
pub fn default_grid(f: &AuxFunction, points: usize) -> Vec<f64> {
    match *f {
        AuxFunction::F4 { c, .. } => (0..points).map(|i| c * i as f64 / points as f64).collect(),
        AuxFunction::F5 { .. } | AuxFunction::F6 { .. } => logspace(1e-3, 1e3, points),
        _ => linspace(0.0, 10.0, points),
    }
}

/// Random interior argument and a matching difference step. Points where a
/// derivative vanishes by construction are avoided.
fn derivative_probe(f: &AuxFunction, rng: &mut ChaCha8Rng) -> (f64, f64) {
    match *f {
        AuxFunction::F4 { c, .. } => {
            let x = c * rng.random_range(0.05..0.95);
            (x, 1e-5)
        }
        AuxFunction::F5 { .. } | AuxFunction::F6 { .. } => {
            // rounding in the log ratios dominates below this relative step
            let w = 10f64.powf(rng.random_range(-2.0..2.0));
            (w, 1e-4 * w)
        }
        AuxFunction::F3 { .. } => {
            let x = rng.random_range(0.5..10.0);
            (x, 1e-5 * x)
        }
        _ => {
            let x = rng.random_range(0.1..10.0);
            (x, 1e-5 * x.max(1.0))
        }
    }
}

struct DrawOutcome {
    monotone: MonotoneCheckReport,
    derivative_errors: Vec<f64>,
    max_a_omega: f64,
    g_failures: usize,
}

fn run_draw(id: FunctionId, cfg: &SuiteConfig, stream: u64) -> Result<DrawOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let f = draw_function(id, &mut rng);
    let grid = default_grid(&f, cfg.grid_points);
    let monotone = check_monotone(&f, &grid)?;
    let mut derivative_errors = Vec::with_capacity(cfg.derivative_points);
    for _ in 0..cfg.derivative_points {
        let (x, step) = derivative_probe(&f, &mut rng);
        let numeric = finite_difference(|t| f.eval(t), x, step)?;
        let closed = f.derivative(x)?;
        derivative_errors.push((numeric - closed).abs() / closed.abs());
    }
    let mut max_a_omega = f64::NEG_INFINITY;
    let mut g_failures = 0;
    match f {
        AuxFunction::F5 { h1, h2, a, b, c, d } => {
            for &w in &grid {
                max_a_omega = max_a_omega.max(a_omega(h1, h2, a, b, c, d, w));
            }
        }
        AuxFunction::F6 { h1, h2, a, b } => {
            for &w in &grid {
                for x in [a, a + b] {
                    let scale = ((h1 * h2 * x * x - w * w) * ln_ratio(h2, h1, x, w)).abs()
                        + x * w * (h2 - h1);
                    if g_aux_derivative(h1, h2, w, x) < -1e-12 * scale / (x * x) {
                        g_failures += 1;
                    }
                }
            }
        }
        _ => {}
    }
    Ok(DrawOutcome {
        monotone,
        derivative_errors,
        max_a_omega,
        g_failures,
    })
}

/// Seeded random-parameter sweep over all six functions.
pub fn run_auxiliary_suite(cfg: SuiteConfig) -> Result<SuiteReport> {
    let mut functions = Vec::with_capacity(FunctionId::ALL.len());
    let mut max_a_omega = f64::NEG_INFINITY;
    let mut g_derivative_failures = 0;
    for (fid, &id) in FunctionId::ALL.iter().enumerate() {
        let outcomes = (0..cfg.draws)
            .into_par_iter()
            .map(|i| run_draw(id, &cfg, (fid * cfg.draws + i) as u64))
            .collect::<Result<Vec<_>>>()?;
        let mut summary = FunctionSummary {
            function: id,
            draws: cfg.draws,
            monotone_failures: 0,
            derivative_checks: 0,
            derivative_failures: 0,
            max_relative_derivative_error: 0.0,
            max_derivative_sign_error: 0.0,
            first_failure: None,
        };
        for o in outcomes {
            let bad_derivatives = o
                .derivative_errors
                .iter()
                // NaN errors count as failures
                .filter(|&&e| e.is_nan() || e > DERIVATIVE_REL_TOL)
                .count();
            summary.derivative_checks += o.derivative_errors.len();
            summary.derivative_failures += bad_derivatives;
            summary.max_relative_derivative_error = o
                .derivative_errors
                .iter()
                .fold(summary.max_relative_derivative_error, |m, &e| m.max(e));
            summary.max_derivative_sign_error = summary
                .max_derivative_sign_error
                .max(o.monotone.max_derivative_sign_error);
            if !o.monotone.passed() {
                summary.monotone_failures += 1;
            }
            if (!o.monotone.passed() || bad_derivatives > 0) && summary.first_failure.is_none() {
                summary.first_failure = Some(o.monotone.function);
            }
            max_a_omega = max_a_omega.max(o.max_a_omega);
            g_derivative_failures += o.g_failures;
        }
        functions.push(summary);
    }
    Ok(SuiteReport {
        config: cfg,
        functions,
        max_a_omega,
        g_derivative_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1(k: u32, h1: f64, h2: f64, a: f64) -> AuxFunction {
        AuxFunction::F1 { k, h1, h2, a }
    }

    #[test]
    fn f1_values() {
        assert_eq!(f1(1, 0.0, 0.5, 0.0).eval(0.0).unwrap(), 0.0);
        let v = f1(1, 0.3, 1.0, 0.0).eval(2.0).unwrap();
        assert!((v + 0.453_445_297_804_259_26).abs() < 1e-15);
    }

    #[test]
    fn f6_with_zero_increment_is_one() {
        let f = AuxFunction::F6 {
            h1: 0.2,
            h2: 0.7,
            a: 1.0,
            b: 0.0,
        };
        for w in [1e-3, 0.5, 1.0, 40.0] {
            assert!((f.eval(w).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_checks() {
        assert!(f1(1, 0.5, 0.5, 0.0).eval(1.0).is_err());
        assert!(f1(0, 0.1, 0.5, 0.0).eval(1.0).is_err());
        assert!(f1(1, 0.1, 0.5, 0.0).eval(-1.0).is_err());
        let f2 = AuxFunction::F2 {
            k: 1,
            h1: 0.1,
            h2: 0.5,
            a: 1.0,
            b: 1.0,
        };
        assert!(matches!(f2.eval(1.0), Err(Error::DomainViolation(_))));
        let f4 = AuxFunction::F4 {
            k: 1,
            h1: 0.1,
            h2: 0.5,
            a: 1.0,
            c: 2.0,
        };
        assert!(f4.eval(1.9).is_ok());
        assert!(f4.eval(2.0).is_err());
        let f5 = AuxFunction::F5 {
            h1: 0.1,
            h2: 0.5,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 0.0,
        };
        assert!(f5.eval(1.0).is_err());
        let f6 = AuxFunction::F6 {
            h1: 0.1,
            h2: 0.5,
            a: 1.0,
            b: 1.0,
        };
        assert!(f6.eval(0.0).is_err());
    }

    #[test]
    fn monotone_examples() {
        let f = f1(2, 0.2, 0.8, 1.0);
        let rep = check_monotone(&f, &linspace(0.0, 10.0, 101)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.strictly_negative, None);

        let f3 = AuxFunction::F3 {
            k: 3,
            h1: 0.1,
            h2: 0.9,
            a: 0.0,
        };
        let rep = check_monotone(&f3, &linspace(0.0, 10.0, 101)).unwrap();
        assert_eq!(rep.strictly_negative, Some(true));
        assert!(rep.passed());

        let f5 = AuxFunction::F5 {
            h1: 0.1,
            h2: 0.6,
            a: 0.5,
            b: 1.0,
            c: 2.0,
            d: 0.7,
        };
        assert!(check_monotone(&f5, &logspace(1e-3, 1e3, 101))
            .unwrap()
            .passed());
        let f6 = AuxFunction::F6 {
            h1: 0.3,
            h2: 0.4,
            a: 2.0,
            b: 3.0,
        };
        assert!(check_monotone(&f6, &logspace(1e-3, 1e3, 101))
            .unwrap()
            .passed());

        assert!(check_monotone(&f, &[1.0, 1.0]).is_err());
        assert!(check_monotone(&f, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let fs = [
            f1(2, 0.2, 0.8, 1.0),
            AuxFunction::F2 {
                k: 2,
                h1: 0.2,
                h2: 0.8,
                a: 0.5,
                b: 1.5,
            },
            AuxFunction::F3 {
                k: 2,
                h1: 0.2,
                h2: 0.8,
                a: 0.5,
            },
            AuxFunction::F4 {
                k: 2,
                h1: 0.2,
                h2: 0.8,
                a: 0.5,
                c: 3.0,
            },
            AuxFunction::F5 {
                h1: 0.2,
                h2: 0.8,
                a: 0.5,
                b: 1.0,
                c: 1.5,
                d: 2.0,
            },
            AuxFunction::F6 {
                h1: 0.2,
                h2: 0.8,
                a: 0.5,
                b: 1.0,
            },
        ];
        for f in fs {
            for x in [0.3, 1.1, 2.5] {
                let numeric = finite_difference(|t| f.eval(t), x, 1e-5).unwrap();
                let closed = f.derivative(x).unwrap();
                assert!(
                    (numeric - closed).abs() <= 1e-6 * closed.abs(),
                    "{f:?} at {x}: {numeric} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn finite_difference_basics() {
        assert_eq!(finite_difference(|_| Ok(3.0), 1.0, 1e-5).unwrap(), 0.0);
        assert!(finite_difference(Ok, 1.0, 0.0).is_err());
        let f = f1(1, 0.1, 0.5, 0.0);
        assert!(finite_difference(|t| f.eval(t), 0.0, 1e-5).is_err());
    }

    #[test]
    fn auxiliary_signs() {
        for &w in &logspace(1e-3, 1e3, 21) {
            assert!(a_omega(0.1, 0.9, 0.3, 1.2, 0.8, 2.0, w) <= 1e-12);
            assert!(g_aux_derivative(0.1, 0.9, w, 0.7) >= -1e-12);
        }
        // g' matches a difference of g
        let (h1, h2, w, x) = (0.2, 0.7, 1.3, 0.9);
        let numeric = finite_difference(|t| Ok(g_aux(h1, h2, w, t)), x, 1e-5).unwrap();
        assert!((numeric - g_aux_derivative(h1, h2, w, x)).abs() < 1e-8);
    }

    #[test]
    fn brute_force_agrees() {
        let p = ChannelParams::degraded([2.0, 1.4], 0.3, 0.0);
        assert!(brute_force_superadditivity(&p).unwrap().holds);
        let q = ChannelParams::two_user([1.0, 0.4], [0.1, 1.5], 0.1);
        let check = brute_force_superadditivity(&q).unwrap();
        assert!(!check.holds);
        assert_eq!(check.violation.unwrap().first, Coalition::singleton(0));
        let single = ChannelParams::degraded([1.0], 0.2, 0.0);
        assert!(brute_force_superadditivity(&single).unwrap().holds);
        let big = ChannelParams::degraded(vec![1.0; 7], 0.2, 0.0);
        assert!(brute_force_superadditivity(&big).is_err());
    }

    #[test]
    fn grids() {
        let g = logspace(1e-3, 1e3, 7);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1e3);
        assert!((g[3] - 1.0).abs() < 1e-12);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let f4 = AuxFunction::F4 {
            k: 1,
            h1: 0.1,
            h2: 0.5,
            a: 1.0,
            c: 2.0,
        };
        let grid = default_grid(&f4, 101);
        assert!(*grid.last().unwrap() < 2.0);
    }

    #[test]
    fn small_suite_is_deterministic() {
        let cfg = SuiteConfig {
            seed: 7,
            draws: 20,
            ..SuiteConfig::default()
        };
        let a = run_auxiliary_suite(cfg).unwrap();
        let b = run_auxiliary_suite(cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{a:#?}");
        assert_eq!(a.functions[0].function.to_string(), "f1");
    }
}

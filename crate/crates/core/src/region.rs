//! Achievable secrecy-rate regions and two-dimensional boundary export.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{build_game, RateVector};
use crate::math::{half_log2_ratio, nonempty_subsets};
use crate::model::{validate, ChannelParams, Coalition, GameKind};
use crate::value::grand_value_two_user;

pub const DEFAULT_RESOLUTION: usize = 32;

/// Transmit powers, one per transmitter. Active transmitters use a power in
/// `(Λ, Γ_l]`; inactive ones stay silent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    powers: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(params: &ChannelParams, powers: Vec<f64>) -> Result<Self> {
        if powers.len() != params.num_transmitters() {
            return Err(Error::InvalidPowerAllocation(format!(
                "{} powers for {} transmitters",
                powers.len(),
                params.num_transmitters()
            )));
        }
        for (l, (&p, &g)) in powers.iter().zip(&params.gammas).enumerate() {
            let ok = if g > params.lambda {
                p > params.lambda && p <= g
            } else {
                p == 0.0
            };
            if !ok {
                return Err(Error::InvalidPowerAllocation(format!(
                    "power {p} of transmitter {} outside its admissible range",
                    l + 1
                )));
            }
        }
        Ok(PowerAllocation { powers })
    }

    /// Every active transmitter at its power constraint.
    pub fn full(params: &ChannelParams) -> Self {
        let powers = params
            .gammas
            .iter()
            .map(|&g| if g > params.lambda { g } else { 0.0 })
            .collect();
        PowerAllocation { powers }
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    fn power_of(&self, c: Coalition) -> f64 {
        c.members().map(|l| self.powers[l]).sum()
    }
}

fn subset_bound(h: f64, h_lambda: f64, p: &PowerAllocation, t: Coalition, rest: Coalition) -> f64 {
    let p_t = p.power_of(t);
    let leaked = h * p_t / (1.0 + h * p.power_of(rest));
    half_log2_ratio(h_lambda * p_t, leaked).max(0.0)
}

fn rates_admissible(params: &ChannelParams, r: &RateVector, eps: f64) -> Result<bool> {
    let n = params.num_transmitters();
    if r.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: r.len(),
        });
    }
    let inactive = params.active_transmitters().complement(n);
    Ok(r.as_slice().iter().all(|&x| x >= -eps) && inactive.members().all(|l| r[l].abs() <= eps))
}

fn at_power(params: &ChannelParams, h: f64, r: &RateVector, p: &PowerAllocation, eps: f64) -> bool {
    let active = params.active_transmitters();
    let h_lambda = params.h_lambda();
    nonempty_subsets(active.bits())
        .map(Coalition::from_bits)
        .all(|t| {
            let rest = active.intersection(t.complement(params.num_transmitters()));
            r.sum_over(t) <= subset_bound(h, h_lambda, p, t, rest) + eps
        })
}

/// Membership in the degraded region for one power allocation.
pub fn degraded_region_contains_at_power(
    params: &ChannelParams,
    r: &RateVector,
    p: &PowerAllocation,
    eps: f64,
) -> Result<bool> {
    let h = params.degraded_gain()?;
    let p = PowerAllocation::new(params, p.powers.clone())?;
    Ok(rates_admissible(params, r, eps)? && at_power(params, h, r, &p, eps))
}

/// Grid of power allocations `Λ + (Γ_l − Λ)·k/resolution`, `k = 1..=resolution`,
/// over the active transmitters, full-power corner first.
fn power_grid(params: &ChannelParams, resolution: usize) -> Vec<PowerAllocation> {
    let active: Vec<usize> = params.active_transmitters().members().collect();
    let axis = |l: usize, k: usize| {
        let g = params.gammas[l];
        if k == resolution {
            g
        } else {
            params.lambda + (g - params.lambda) * k as f64 / resolution as f64
        }
    };
    let count = resolution.pow(active.len() as u32);
    (0..count)
        .map(|idx| {
            let mut powers = vec![0.0; params.num_transmitters()];
            let mut rest = idx;
            for &l in &active {
                // digit 0 maps to full power so the corner comes first
                let k = resolution - rest % resolution;
                rest /= resolution;
                powers[l] = axis(l, k);
            }
            PowerAllocation { powers }
        })
        .collect()
}

/// Membership in the union over a power grid. Acceptance is exact; a
/// rejection only means no grid point admits `r`.
pub fn degraded_region_contains(
    params: &ChannelParams,
    r: &RateVector,
    resolution: usize,
    eps: f64,
) -> Result<bool> {
    let params = validate(params.clone())?;
    let h = params.degraded_gain()?;
    if resolution == 0 {
        return Err(Error::InvalidResolution);
    }
    if !rates_admissible(&params, r, eps)? {
        return Ok(false);
    }
    if at_power(&params, h, r, &PowerAllocation::full(&params), eps) {
        return Ok(true);
    }
    Ok(power_grid(&params, resolution)
        .par_iter()
        .any(|p| at_power(&params, h, r, p, eps)))
}

/// Single-rate and sum-rate caps of the two-user achievable region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoUserBounds {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

pub fn two_user_bounds(params: &ChannelParams) -> Result<TwoUserBounds> {
    let (h1, h2) = params.two_user_gains()?;
    if params.gammas.iter().any(|&g| g <= params.lambda) {
        return Err(Error::PowerBelowLambda {
            lambda: params.lambda,
        });
    }
    let (g1, g2) = (params.gammas[0], params.gammas[1]);
    let hl = params.h_lambda();
    let single =
        |g: f64, h: f64, other: f64| half_log2_ratio(hl * g, g * h / (1.0 + other)).max(0.0);
    Ok(TwoUserBounds {
        r1: single(g1, h1, h2 * g2),
        r2: single(g2, h2, h1 * g1),
        sum: grand_value_two_user(g1, g2, h1, h2, params.lambda).bits(),
    })
}

pub fn two_user_region_contains(params: &ChannelParams, r: &RateVector, eps: f64) -> Result<bool> {
    let b = two_user_bounds(params)?;
    if r.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            found: r.len(),
        });
    }
    Ok(r[0] >= -eps
        && r[1] >= -eps
        && r[0] <= b.r1 + eps
        && r[1] <= b.r2 + eps
        && r[0] + r[1] <= b.sum + eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Achievable,
    Core,
    Cstar,
}

impl std::str::FromStr for RegionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "achievable" => Ok(RegionKind::Achievable),
            "core" => Ok(RegionKind::Core),
            "cstar" => Ok(RegionKind::Cstar),
            other => Err(Error::Parse(format!(
                "unknown region {other:?}, expected achievable, core or cstar"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexRole {
    Origin,
    R1Axis,
    R2Axis,
    Corner,
    SegmentEnd,
    Hull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub r1_bits: f64,
    pub r2_bits: f64,
    pub role: VertexRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPolygon {
    pub kind: RegionKind,
    pub vertices: Vec<Vertex>,
}

impl RegionPolygon {
    pub fn write_csv<W: Write>(&self, out: W, precision: usize) -> Result<()> {
        let mut w = csv_writer(out);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["r1_bits", "r2_bits"]).map_err(io)?;
        for v in &self.vertices {
            w.write_record([
                format!("{:.precision$}", v.r1_bits),
                format!("{:.precision$}", v.r2_bits),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("polygon serializes")
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Header-only polygon file marking an empty core.
pub fn write_empty_core_csv<W: Write>(mut out: W) -> Result<()> {
    out.write_all(b"# core is empty\nr1_bits,r2_bits\n")
        .map_err(|e| Error::Parse(e.to_string()))
}

fn vertex(r1: f64, r2: f64, role: VertexRole) -> Vertex {
    Vertex {
        r1_bits: r1,
        r2_bits: r2,
        role,
    }
}

/// Drops repeated points of a closed ring and rotates it to start at the
/// vertex with maximal `R1`, ties going to maximal `R2`.
fn normalize_ring(mut ring: Vec<Vertex>) -> Vec<Vertex> {
    const SAME: f64 = 1e-15;
    let same = |a: &Vertex, b: &Vertex| {
        (a.r1_bits - b.r1_bits).abs() <= SAME && (a.r2_bits - b.r2_bits).abs() <= SAME
    };
    ring.dedup_by(|b, a| same(a, b));
    while ring.len() > 1 && same(&ring[0], ring.last().unwrap()) {
        ring.pop();
    }
    if let Some(start) = (0..ring.len()).max_by(|&i, &j| {
        (ring[i].r1_bits, ring[i].r2_bits)
            .partial_cmp(&(ring[j].r1_bits, ring[j].r2_bits))
            .unwrap()
            .then(j.cmp(&i))
    }) {
        ring.rotate_left(start);
    }
    ring
}

/// `{0 ≤ R1 ≤ b1, 0 ≤ R2 ≤ b2, R1 + R2 ≤ s}`, counterclockwise.
fn capped_box(b1: f64, b2: f64, s: f64) -> Vec<Vertex> {
    let a = b1.min(s);
    let c = b2.min(s);
    normalize_ring(vec![
        vertex(0.0, 0.0, VertexRole::Origin),
        vertex(a, 0.0, VertexRole::R1Axis),
        vertex(a, c.min(s - a), VertexRole::Corner),
        vertex(a.min(s - c), c, VertexRole::Corner),
        vertex(0.0, c, VertexRole::R2Axis),
    ])
}

fn cross(o: &Vertex, a: &Vertex, b: &Vertex) -> f64 {
    (a.r1_bits - o.r1_bits) * (b.r2_bits - o.r2_bits)
        - (a.r2_bits - o.r2_bits) * (b.r1_bits - o.r1_bits)
}

/// Counterclockwise convex hull (monotone chain), collinear points dropped.
fn convex_hull(mut pts: Vec<Vertex>) -> Vec<Vertex> {
    pts.sort_by(|a, b| {
        (a.r1_bits, a.r2_bits)
            .partial_cmp(&(b.r1_bits, b.r2_bits))
            .unwrap()
    });
    pts.dedup_by(|a, b| a.r1_bits == b.r1_bits && a.r2_bits == b.r2_bits);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vertex> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vertex>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

fn degraded_achievable(params: &ChannelParams, resolution: usize) -> Result<Vec<Vertex>> {
    let h = params.degraded_gain()?;
    let hl = params.h_lambda();
    let (one, two) = (Coalition::singleton(0), Coalition::singleton(1));
    let active = params.active_transmitters();
    let corners: Vec<Vertex> = power_grid(params, resolution)
        .par_iter()
        .flat_map_iter(|p| {
            let b1 = if active.contains(0) {
                subset_bound(h, hl, p, one, active.intersection(two))
            } else {
                0.0
            };
            let b2 = if active.contains(1) {
                subset_bound(h, hl, p, two, active.intersection(one))
            } else {
                0.0
            };
            let s = subset_bound(h, hl, p, active, Coalition::EMPTY);
            capped_box(b1, b2, s)
        })
        .collect();
    let hull = convex_hull(corners)
        .into_iter()
        .map(|v| {
            let role = match (v.r1_bits == 0.0, v.r2_bits == 0.0) {
                (true, true) => VertexRole::Origin,
                (false, true) => VertexRole::R1Axis,
                (true, false) => VertexRole::R2Axis,
                (false, false) => VertexRole::Hull,
            };
            Vertex { role, ..v }
        })
        .collect();
    Ok(normalize_ring(hull))
}

fn segment(a: (f64, f64), b: (f64, f64)) -> Vec<Vertex> {
    normalize_ring(vec![
        vertex(a.0, a.1, VertexRole::SegmentEnd),
        vertex(b.0, b.1, VertexRole::SegmentEnd),
    ])
}

fn core_segment(params: &ChannelParams, eps: f64) -> Result<Vec<Vertex>> {
    let game = build_game(params)?;
    let v1 = game.value(Coalition::singleton(0));
    let v2 = game.value(Coalition::singleton(1));
    let grand = game.grand_value();
    if v1 + v2 > grand + eps {
        return Err(Error::EmptyCore);
    }
    Ok(segment((grand - v2, v2), (v1, grand - v1)))
}

fn cstar_segment(params: &ChannelParams) -> Result<Vec<Vertex>> {
    let h = params.degraded_gain()?;
    let hl = params.h_lambda();
    let active = params.active_transmitters();
    let bound = |c: Coalition| {
        let p = params.power_of(c);
        half_log2_ratio(hl * p, h * p)
    };
    if h >= hl || active.is_empty() {
        return Ok(vec![vertex(0.0, 0.0, VertexRole::Origin)]);
    }
    let total = bound(active);
    let (b1, b2) = match (active.contains(0), active.contains(1)) {
        (true, true) => (
            bound(Coalition::singleton(0)),
            bound(Coalition::singleton(1)),
        ),
        (true, false) => (total, 0.0),
        _ => (0.0, total),
    };
    Ok(segment((b1, total - b1), (total - b2, b2)))
}

/// Vertex list of a two-dimensional rate set. The core and its achievable
/// subset lie on the efficiency line and come out as segments.
pub fn export_two_user_polygons(
    params: &ChannelParams,
    which: RegionKind,
    resolution: usize,
) -> Result<RegionPolygon> {
    let params = validate(params.clone())?;
    if params.num_transmitters() != 2 {
        return Err(Error::NotTwoDimensional(params.num_transmitters()));
    }
    if resolution == 0 {
        return Err(Error::InvalidResolution);
    }
    let vertices = match (which, params.kind()) {
        (RegionKind::Achievable, GameKind::TwoUser) => {
            let b = two_user_bounds(&params)?;
            capped_box(b.r1, b.r2, b.sum)
        }
        (RegionKind::Achievable, GameKind::Degraded) => degraded_achievable(&params, resolution)?,
        (RegionKind::Core, _) => core_segment(&params, crate::game::DEFAULT_EPS)?,
        (RegionKind::Cstar, _) => cstar_segment(&params)?,
    };
    Ok(RegionPolygon {
        kind: which,
        vertices,
    })
}

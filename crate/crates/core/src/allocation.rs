//! Axiomatic fair secrecy-rate allocations.
//!
//! The degraded allocation is computed on the transmitters sorted by
//! decreasing power (stable on index), with inactive transmitters carried
//! at zero power, and mapped back to the caller's indices.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{build_game, RateVector};
use crate::math::half_log2_ratio;
use crate::model::{scale_game, validate, ChannelParams, Gains, GameKind};
use crate::value::{coalition_value, grand_value_two_user};

/// Largest game whose symmetry check enumerates every relabeling.
pub const MAX_FULL_PERMUTATIONS: usize = 6;

/// Relative slack used to accept a reduced power equal to its upper end.
const GAMMA_STAR_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaStar {
    /// Zero-based index of the transmitter whose power is reduced.
    pub which: usize,
    pub value: f64,
    /// Both transmitters already contribute equally; `which` is then 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairAllocation {
    pub rates: RateVector,
    /// Zero-based transmitter indices by decreasing power.
    pub ordering: Vec<usize>,
    pub gamma_star: Option<GammaStar>,
    /// `|Σ R_l − v(L)|`.
    pub efficiency_residual: f64,
}

/// Indices sorted by decreasing power, ties kept in index order.
pub fn descending_order(gammas: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gammas.len()).collect();
    order.sort_by(|&i, &j| gammas[j].total_cmp(&gammas[i]));
    order
}

/// Powers in decreasing order with inactive transmitters set to zero.
fn effective_sorted_powers(params: &ChannelParams, order: &[usize]) -> Vec<f64> {
    order
        .iter()
        .map(|&l| {
            let g = params.gammas[l];
            if g > params.lambda {
                g
            } else {
                0.0
            }
        })
        .collect()
}

/// `s_l = l·Γ_l + Σ_{i>l} Γ_i` for one-based ranks `l`.
fn stacked_powers(powers: &[f64]) -> Vec<f64> {
    let n = powers.len();
    let mut out = vec![0.0; n];
    let mut tail = 0.0;
    for idx in (0..n).rev() {
        out[idx] = (idx + 1) as f64 * powers[idx] + tail;
        tail += powers[idx];
    }
    out
}

/// `φ_{x,l}` for every rank of the given decreasing power profile.
pub fn phi_values(powers_desc: &[f64], x: f64) -> Vec<f64> {
    let stacked = stacked_powers(powers_desc);
    let mut phi = vec![0.0; powers_desc.len()];
    let mut tail = 0.0;
    for idx in (0..powers_desc.len()).rev() {
        let top = 0.5 * (x * stacked[idx]).ln_1p() / std::f64::consts::LN_2;
        phi[idx] = (top - tail) / (idx + 1) as f64;
        tail += phi[idx];
    }
    phi
}

/// `φ_{x,rank}` of a degraded game, `rank` zero-based in decreasing power.
pub fn phi(params: &ChannelParams, x: f64, rank: usize) -> Result<f64> {
    params.degraded_gain()?;
    let n = params.num_transmitters();
    if rank >= n {
        return Err(Error::IndexOutOfRange {
            index: rank,
            len: n,
        });
    }
    let order = descending_order(&params.gammas);
    Ok(phi_values(&effective_sorted_powers(params, &order), x)[rank])
}

/// Fair allocation of a degraded game.
pub fn fair_allocation_degraded(params: &ChannelParams) -> Result<FairAllocation> {
    let params = validate(params.clone())?;
    let h = params.degraded_gain()?;
    let n = params.num_transmitters();
    let h_lambda = params.h_lambda();
    let order = descending_order(&params.gammas);
    let mut rates = vec![0.0; n];
    if h < h_lambda {
        let powers = effective_sorted_powers(&params, &order);
        let stacked = stacked_powers(&powers);
        let mut tail = 0.0;
        for idx in (0..n).rev() {
            let r = if powers[idx] > 0.0 {
                (half_log2_ratio(h_lambda * stacked[idx], h * stacked[idx]) - tail)
                    / (idx + 1) as f64
            } else {
                0.0
            };
            rates[order[idx]] = r;
            tail += r;
        }
    }
    let grand = coalition_value(&params, params.full_coalition())?.bits();
    let efficiency_residual = (rates.iter().sum::<f64>() - grand).abs();
    Ok(FairAllocation {
        rates: RateVector(rates),
        ordering: order,
        gamma_star: None,
        efficiency_residual,
    })
}

fn check_gains(h1: f64, h2: f64, h_lambda: f64) -> Result<()> {
    if h1 < h_lambda && h2 < h_lambda {
        Ok(())
    } else {
        Err(Error::GainsOutOfRange { h1, h2, h_lambda })
    }
}

/// Reduced power for transmitter `own` that equates its grand-coalition
/// contribution with that of a copy of the other transmitter.
fn gamma_star_candidate(other_power: f64, h_own: f64, h_other: f64, h_lambda: f64) -> f64 {
    other_power * (h_lambda - h_other)
        / (h_lambda - h_own + 2.0 * h_lambda * other_power * (h_other - h_own))
}

pub fn gamma_star(params: &ChannelParams) -> Result<GammaStar> {
    let (h1, h2) = params.two_user_gains()?;
    let h_lambda = params.h_lambda();
    check_gains(h1, h2, h_lambda)?;
    let (g1, g2) = (params.gammas[0], params.gammas[1]);
    let c1 = gamma_star_candidate(g2, h1, h2, h_lambda);
    let c2 = gamma_star_candidate(g1, h2, h1, h_lambda);
    let near = |c: f64, own: f64| (c - own).abs() <= GAMMA_STAR_REL_TOL * own;
    let valid = |c: f64, own: f64| c.is_finite() && c > 0.0 && (c <= own || near(c, own));
    if near(c1, g1) && near(c2, g2) {
        return Ok(GammaStar {
            which: 0,
            value: g1,
            degenerate: true,
        });
    }
    if valid(c1, g1) {
        Ok(GammaStar {
            which: 0,
            value: c1.min(g1),
            degenerate: false,
        })
    } else if valid(c2, g2) {
        Ok(GammaStar {
            which: 1,
            value: c2.min(g2),
            degenerate: false,
        })
    } else {
        Err(Error::NoGammaStar)
    }
}

/// Rates when transmitter `reduced` is the one whose power is lowered: the
/// other one gets half of what two copies of itself would secure.
fn two_user_rates(g: [f64; 2], h: [f64; 2], lambda: f64, reduced: usize) -> [f64; 2] {
    let other = 1 - reduced;
    let h_lambda = 1.0 / (1.0 + lambda);
    let grand = grand_value_two_user(g[0], g[1], h[0], h[1], lambda).bits();
    let mut rates = [0.0; 2];
    rates[other] = 0.5 * half_log2_ratio(2.0 * h_lambda * g[other], 2.0 * h[other] * g[other]);
    rates[reduced] = grand - rates[other];
    rates
}

/// Fair allocation of the two-user non-degraded game.
pub fn fair_allocation_two_user(params: &ChannelParams) -> Result<FairAllocation> {
    let params = validate(params.clone())?;
    let (h1, h2) = params.two_user_gains()?;
    check_gains(h1, h2, params.h_lambda())?;
    if params.gammas.iter().any(|&g| g <= params.lambda) {
        return Err(Error::PowerBelowLambda {
            lambda: params.lambda,
        });
    }
    let star = gamma_star(&params)?;
    let g = [params.gammas[0], params.gammas[1]];
    let rates = two_user_rates(g, [h1, h2], params.lambda, star.which);
    let grand = coalition_value(&params, params.full_coalition())?.bits();
    Ok(FairAllocation {
        rates: RateVector(rates.to_vec()),
        ordering: descending_order(&params.gammas),
        gamma_star: Some(star),
        efficiency_residual: (rates[0] + rates[1] - grand).abs(),
    })
}

pub fn fair_allocation(params: &ChannelParams) -> Result<FairAllocation> {
    match params.kind() {
        GameKind::Degraded => fair_allocation_degraded(params),
        GameKind::TwoUser => fair_allocation_two_user(params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    pub residual: f64,
}

impl AxiomCheck {
    fn new(residual: f64, eps: f64) -> Self {
        AxiomCheck {
            passed: residual <= eps,
            residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomReport {
    pub efficiency: AxiomCheck,
    pub symmetry: AxiomCheck,
    pub envy_freeness: AxiomCheck,
    /// Ratio form of the equal-contribution identity at the reduced power;
    /// two-user games only.
    pub value_identity: Option<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.efficiency.passed
            && self.symmetry.passed
            && self.envy_freeness.passed
            && self.value_identity.is_none_or(|c| c.passed)
    }
}

/// Relabelings used by the symmetry check, as maps `l ↦ π(l)`.
fn relabelings(n: usize) -> Vec<Vec<usize>> {
    if n <= MAX_FULL_PERMUTATIONS {
        (0..n).permutations(n).collect()
    } else {
        let mut out = vec![(0..n).collect::<Vec<_>>()];
        for [i, j] in (0..n).array_combinations() {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, j);
            out.push(p);
        }
        out
    }
}

/// Moves the parameters of transmitter `l` to label `π(l)`.
fn relabel(params: &ChannelParams, pi: &[usize]) -> ChannelParams {
    let mut gammas = vec![0.0; pi.len()];
    for (l, &target) in pi.iter().enumerate() {
        gammas[target] = params.gammas[l];
    }
    let gains = match params.gains {
        Gains::TwoUser(h1, h2) if pi[0] == 1 => Gains::TwoUser(h2, h1),
        other => other,
    };
    ChannelParams {
        gammas,
        gains,
        lambda: params.lambda,
    }
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, x| if x.abs() > m { x.abs() } else { m })
}

/// Recomputes each axiom's defining relation for `allocation`.
pub fn verify_axioms(
    params: &ChannelParams,
    allocation: &FairAllocation,
    eps: f64,
) -> Result<AxiomReport> {
    let game = build_game(params)?;
    let r = allocation.rates.as_slice();
    if r.len() != game.num_transmitters() {
        return Err(Error::LengthMismatch {
            expected: game.num_transmitters(),
            found: r.len(),
        });
    }
    let efficiency = AxiomCheck::new((allocation.rates.total() - game.grand_value()).abs(), eps);

    let mut symmetry_residual: f64 = 0.0;
    for pi in relabelings(r.len()) {
        let relabeled = fair_allocation(&relabel(params, &pi))?;
        let worst = max_abs((0..r.len()).map(|l| r[l] - relabeled.rates[pi[l]]));
        symmetry_residual = symmetry_residual.max(worst);
    }
    let symmetry = AxiomCheck::new(symmetry_residual, eps);

    let (envy_freeness, value_identity) = match params.gains {
        Gains::Degraded(_) => {
            let mut worst: f64 = 0.0;
            for i in 0..r.len() {
                for (j, &rj) in r.iter().enumerate() {
                    if params.gammas[i] > params.gammas[j] {
                        let mut reduced = params.clone();
                        reduced.gammas[i] = params.gammas[j];
                        let alloc = fair_allocation_degraded(&reduced)?;
                        worst = worst.max((alloc.rates[i] - rj).abs());
                    }
                }
            }
            (AxiomCheck::new(worst, eps), None)
        }
        Gains::TwoUser(h1, h2) => {
            let star = allocation.gamma_star.ok_or(Error::NoGammaStar)?;
            let i = star.which;
            let j = 1 - i;
            let h = [h1, h2];
            let mut g = [params.gammas[0], params.gammas[1]];
            g[i] = star.value;
            let h_lambda = params.h_lambda();
            let reduced_ratio =
                (1.0 + h_lambda * (g[0] + g[1])) / (1.0 + h[0] * g[0] + h[1] * g[1]);
            let copies_ratio = (1.0 + 2.0 * h_lambda * g[j]) / (1.0 + 2.0 * h[j] * g[j]);
            let identity = AxiomCheck::new((reduced_ratio - copies_ratio).abs(), eps);
            let reduced = two_user_rates(g, h, params.lambda, i);
            (
                AxiomCheck::new((reduced[i] - r[j]).abs(), eps),
                Some(identity),
            )
        }
    };

    Ok(AxiomReport {
        efficiency,
        symmetry,
        envy_freeness,
        value_identity,
    })
}

/// `R*_{rank} / R*_{rank+1}` over the decreasing-power ordering, evaluated on
/// the game scaled by each `ω`. `None` where the scaled jammer leaves no
/// secrecy (`h ≥ h_Λ` after scaling), so both rates vanish.
pub fn ratio_curve(
    params: &ChannelParams,
    rank: usize,
    omegas: &[f64],
) -> Result<Vec<Option<f64>>> {
    let params = validate(params.clone())?;
    params.degraded_gain()?;
    let n = params.num_transmitters();
    if rank + 1 >= n {
        return Err(Error::IndexOutOfRange {
            index: rank + 1,
            len: n,
        });
    }
    let order = descending_order(&params.gammas);
    let (hi, lo) = (order[rank], order[rank + 1]);
    if params.gammas[lo] <= params.lambda {
        return Err(Error::InactiveIndex(rank + 1));
    }
    if params.gammas[hi] == params.gammas[lo] {
        return Err(Error::EqualPowers(rank, rank + 1));
    }
    omegas
        .par_iter()
        .map(|&omega| {
            let alloc = fair_allocation_degraded(&scale_game(&params, omega)?)?;
            let lo_rate = alloc.rates[lo];
            Ok((lo_rate > 0.0).then(|| alloc.rates[hi] / lo_rate))
        })
        .collect()
}

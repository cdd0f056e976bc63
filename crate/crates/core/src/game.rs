//! Tabulated games, superadditivity and the core.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::math::{half_log2_ratio, nonempty_subsets};
use crate::model::{validate, ChannelParams, Coalition, GameKind, MAX_TRANSMITTERS};
use crate::value::{coalition_value, SecrecyRate};

/// Default absolute tolerance for membership tests, in bits.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Largest game handed to the linear-programming core check.
pub const MAX_LP_TRANSMITTERS: usize = 16;

/// One secrecy rate per transmitter, in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateVector(pub Vec<f64>);

impl RateVector {
    pub fn new(rates: impl Into<Vec<f64>>) -> Self {
        RateVector(rates.into())
    }

    pub fn zeros(n: usize) -> Self {
        RateVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `R_S`, the total rate of the members of `coalition`.
    pub fn sum_over(&self, coalition: Coalition) -> f64 {
        coalition.members().map(|l| self.0[l]).sum()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl std::ops::Index<usize> for RateVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A coalitional game tabulated over every subset of transmitters.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    params: ChannelParams,
    values: Vec<SecrecyRate>,
}

/// Tabulates the value of every coalition.
pub fn build_game(params: &ChannelParams) -> Result<Game> {
    let params = validate(params.clone())?;
    let n = params.num_transmitters();
    if n > MAX_TRANSMITTERS {
        return Err(Error::TooManyTransmitters {
            count: n,
            max: MAX_TRANSMITTERS,
        });
    }
    let values = (0..1u32 << n)
        .into_par_iter()
        .map(|bits| coalition_value(&params, Coalition::from_bits(bits)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Game { params, values })
}

impl Game {
    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn num_transmitters(&self) -> usize {
        self.params.num_transmitters()
    }

    pub fn kind(&self) -> GameKind {
        self.params.kind()
    }

    pub fn grand_coalition(&self) -> Coalition {
        self.params.full_coalition()
    }

    pub fn value(&self, coalition: Coalition) -> f64 {
        self.values[coalition.bits() as usize].bits()
    }

    pub fn grand_value(&self) -> f64 {
        self.value(self.grand_coalition())
    }

    /// `(coalition, value)` pairs in bitmask order, starting with the empty set.
    pub fn table(&self) -> impl Iterator<Item = (Coalition, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(bits, v)| (Coalition::from_bits(bits as u32), v.bits()))
    }

    /// Writes `coalition_bitmask,members,value_bits` rows.
    pub fn write_csv<W: Write>(&self, out: W, precision: usize) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["coalition_bitmask", "members", "value_bits"])
            .map_err(io)?;
        for (c, v) in self.table() {
            w.write_record([
                c.bits().to_string(),
                c.to_string(),
                format!("{v:.precision$}"),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperadditivityViolation {
    pub first: Coalition,
    pub second: Coalition,
    /// `v(S) + v(T) − v(S ∪ T)`, positive.
    pub excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperadditivityCheck {
    pub holds: bool,
    pub violation: Option<SuperadditivityViolation>,
}

/// Checks `v(S) + v(T) ≤ v(S ∪ T) + eps` over disjoint non-empty pairs with
/// `min(S) < min(T)`, reporting the lexicographically first violation.
pub fn is_superadditive(game: &Game, eps: f64) -> SuperadditivityCheck {
    let n = game.num_transmitters();
    let full = Coalition::full(n);
    for s_bits in 1..=full.bits() {
        let s = Coalition::from_bits(s_bits);
        let s_min = s.min_member().expect("non-empty");
        // T ranges over subsets of the complement whose smallest member exceeds min(S)
        let allowed = s.complement(n).bits() & !((2u32 << s_min) - 1);
        for t_bits in nonempty_subsets(allowed) {
            let t = Coalition::from_bits(t_bits);
            let excess = game.value(s) + game.value(t) - game.value(s.union(t));
            if excess > eps {
                return SuperadditivityCheck {
                    holds: false,
                    violation: Some(SuperadditivityViolation {
                        first: s,
                        second: t,
                        excess,
                    }),
                };
            }
        }
    }
    SuperadditivityCheck {
        holds: true,
        violation: None,
    }
}

/// Interval bounds `v(S) ≤ R_S ≤ v(L) − v(Sᶜ)` equivalent to core membership.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoreConstraint {
    pub coalition: Coalition,
    pub lower: f64,
    pub upper: f64,
}

impl CoreConstraint {
    pub fn is_feasible(&self, eps: f64) -> bool {
        self.lower <= self.upper + eps
    }
}

impl Serialize for Coalition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members().map(|m| m + 1))
    }
}

/// One constraint per non-empty coalition, in bitmask order.
pub fn core_constraints(game: &Game) -> Vec<CoreConstraint> {
    let n = game.num_transmitters();
    let grand = game.grand_value();
    (1..=Coalition::full(n).bits())
        .map(|bits| {
            let s = Coalition::from_bits(bits);
            CoreConstraint {
                coalition: s,
                lower: game.value(s),
                upper: grand - game.value(s.complement(n)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreMembership {
    pub contains: bool,
    pub efficiency_residual: f64,
    /// Coalitions whose rate falls short of their value; the grand coalition
    /// is listed when efficiency fails.
    pub violated: Vec<Coalition>,
}

fn check_len(game: &Game, r: &RateVector) -> Result<()> {
    let n = game.num_transmitters();
    if r.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: r.len(),
        });
    }
    Ok(())
}

/// Tests `Σ R_l = v(L)` and `R_S ≥ v(S)` for every coalition, within `eps`.
pub fn core_contains(game: &Game, r: &RateVector, eps: f64) -> Result<CoreMembership> {
    check_len(game, r)?;
    let full = game.grand_coalition();
    let efficiency_residual = (r.total() - game.grand_value()).abs();
    let mut violated = Vec::new();
    if efficiency_residual > eps {
        violated.push(full);
    }
    for bits in 1..full.bits() {
        let s = Coalition::from_bits(bits);
        if r.sum_over(s) < game.value(s) - eps {
            violated.push(s);
        }
    }
    Ok(CoreMembership {
        contains: violated.is_empty(),
        efficiency_residual,
        violated,
    })
}

/// Tests membership in the explicitly achievable subset of the core of a
/// degraded game: zero rate for inactive transmitters, the active set sharing
/// the grand value exactly, and every strict subset of the active set bounded
/// by its own jamming-free secrecy sum-rate.
pub fn cstar_contains(game: &Game, r: &RateVector, eps: f64) -> Result<bool> {
    let params = game.params();
    let h = params.degraded_gain()?;
    check_len(game, r)?;
    let h_lambda = params.h_lambda();
    let active = params.active_transmitters();
    let inactive = active.complement(params.num_transmitters());
    if inactive.members().any(|l| r[l].abs() > eps) {
        return Ok(false);
    }
    let bound = |s: Coalition| {
        let power = params.power_of(s);
        half_log2_ratio(h_lambda * power, h * power)
    };
    if (r.sum_over(active) - bound(active)).abs() > eps {
        return Ok(false);
    }
    Ok(nonempty_subsets(active.bits())
        .map(Coalition::from_bits)
        .filter(|&s| s != active)
        .all(|s| r.sum_over(s) <= bound(s) + eps))
}

/// Closed-form emptiness criterion for the two-user game without an external
/// jammer and with a positive grand value.
pub fn core_is_empty_two_user(params: &ChannelParams) -> Result<bool> {
    let (h1, h2) = params.two_user_gains()?;
    if params.lambda != 0.0 {
        return Err(Error::LambdaNotZero(params.lambda));
    }
    let g = [params.gammas[0], params.gammas[1]];
    let h = [h1, h2];
    if g[0] + g[1] <= h1 * g[0] + h2 * g[1] {
        return Err(Error::ZeroGrandValue);
    }
    let shared = 1.0 + h1 * g[0] + h2 * g[1];
    let criterion = (0..2)
        .map(|l| {
            let other = 1 - l;
            let power_ratio = g[l] / g[other];
            let rate_ratio = shared / ((1.0 + h[l] * g[l]) * (1.0 + g[other]));
            power_ratio.min(rate_ratio)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(criterion > 1.0)
}

/// Whether the grand coalition is worth at least the sum of the standalone
/// values. For two transmitters this is exactly core non-emptiness.
pub fn cooperation_beneficial(game: &Game) -> bool {
    let n = game.num_transmitters();
    let standalone: f64 = (0..n).map(|l| game.value(Coalition::singleton(l))).sum();
    game.grand_value() >= standalone
}

/// Decides core non-emptiness by phase-one linear programming and returns a
/// witness point when the core is non-empty.
pub fn core_nonempty_lp(game: &Game) -> Result<Option<RateVector>> {
    let n = game.num_transmitters();
    if n > MAX_LP_TRANSMITTERS {
        return Err(Error::TooManyTransmitters {
            count: n,
            max: MAX_LP_TRANSMITTERS,
        });
    }
    let full = game.grand_coalition();
    let grand = game.grand_value();
    // rates are non-negative in any core point since singleton values are
    let mut a = Vec::with_capacity(1 << n);
    let mut b = Vec::with_capacity(1 << n);
    a.push(vec![1.0; n]);
    b.push(grand);
    a.push(vec![-1.0; n]);
    b.push(-grand);
    for bits in 1..full.bits() {
        let s = Coalition::from_bits(bits);
        a.push(
            (0..n)
                .map(|l| if s.contains(l) { -1.0 } else { 0.0 })
                .collect(),
        );
        b.push(-game.value(s));
    }
    Ok(lp::find_feasible_point(&a, &b).map(RateVector))
}

//! Closed-form coalition values.
//!
//! A coalition's value is the secrecy sum-rate it can guarantee while every
//! transmitter outside it jams at full power and discloses its signal to the
//! eavesdropper. All rates are in bits per channel use.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::half_log2_ratio;
use crate::model::{derive, effective_gain, ChannelParams, Coalition, Gains, GameKind};

/// A non-negative secrecy rate in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SecrecyRate(f64);

impl SecrecyRate {
    pub const ZERO: SecrecyRate = SecrecyRate(0.0);

    /// Applies the `[·]⁺` clamp.
    pub fn clamped(bits: f64) -> Self {
        SecrecyRate(bits.max(0.0))
    }

    pub fn bits(self) -> f64 {
        self.0
    }
}

impl From<SecrecyRate> for f64 {
    fn from(r: SecrecyRate) -> f64 {
        r.0
    }
}

/// Value of `coalition` in the degraded game.
pub fn value_degraded(params: &ChannelParams, coalition: Coalition) -> Result<SecrecyRate> {
    let h = params.degraded_gain()?;
    if coalition.is_empty() {
        return Ok(SecrecyRate::ZERO);
    }
    let d = derive(params, coalition);
    let power = params.power_of(d.active_set);
    Ok(SecrecyRate::clamped(half_log2_ratio(
        d.h_eff * power,
        h * power,
    )))
}

/// Maximal secrecy sum-rate of the degraded channel with all transmitters
/// cooperating against the external jammer.
pub fn sum_rate_degraded(params: &ChannelParams) -> Result<SecrecyRate> {
    let h = params.degraded_gain()?;
    let power = params.power_of(params.active_transmitters());
    Ok(SecrecyRate::clamped(half_log2_ratio(
        params.h_lambda() * power,
        h * power,
    )))
}

/// Value of `coalition` in the two-transmitter non-degraded game.
pub fn value_two_user(params: &ChannelParams, coalition: Coalition) -> Result<SecrecyRate> {
    let (h1, h2) = params.two_user_gains()?;
    let (g1, g2) = (params.gammas[0], params.gammas[1]);
    let lambda = params.lambda;
    let single = |own: f64, own_h: f64, other: f64| {
        let threshold = (other.sqrt() + lambda.sqrt()).powi(2);
        if own > threshold {
            SecrecyRate::clamped(half_log2_ratio(own / (1.0 + threshold), own_h * own))
        } else {
            SecrecyRate::ZERO
        }
    };
    Ok(match coalition.bits() {
        0b00 => SecrecyRate::ZERO,
        0b01 => single(g1, h1, g2),
        0b10 => single(g2, h2, g1),
        // transmitters at or below the jammer power stay silent, as in the degraded game
        0b11 => {
            let active = |g: f64| if g > lambda { g } else { 0.0 };
            grand_value_two_user(active(g1), active(g2), h1, h2, lambda)
        }
        _ => {
            return Err(Error::IndexOutOfRange {
                index: coalition.bits() as usize,
                len: 2,
            })
        }
    })
}

pub(crate) fn grand_value_two_user(g1: f64, g2: f64, h1: f64, h2: f64, lambda: f64) -> SecrecyRate {
    SecrecyRate::clamped(half_log2_ratio(
        effective_gain(lambda) * (g1 + g2),
        h1 * g1 + h2 * g2,
    ))
}

/// Dispatches on the kind of game the parameters describe.
pub fn coalition_value(params: &ChannelParams, coalition: Coalition) -> Result<SecrecyRate> {
    match params.kind() {
        GameKind::Degraded => value_degraded(params, coalition),
        GameKind::TwoUser => value_two_user(params, coalition),
    }
}

/// Reinterprets a two-transmitter degraded instance as a two-user instance
/// with equal gains.
pub fn as_two_user(params: &ChannelParams) -> Result<ChannelParams> {
    match params.gains {
        Gains::Degraded(h) if params.num_transmitters() == 2 => Ok(ChannelParams {
            gains: Gains::TwoUser(h, h),
            ..params.clone()
        }),
        Gains::Degraded(_) => Err(Error::GainCountMismatch {
            found: params.num_transmitters(),
        }),
        Gains::TwoUser(..) => Err(Error::WrongGameKind {
            expected: GameKind::Degraded,
        }),
    }
}

//! Channel parameters, coalitions and the quantities derived from them.
//!
//! Noise variances at the legitimate receiver and at the eavesdropper are
//! normalized to one. A change of both variances by a common factor is
//! expressed through [`scale_game`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of transmitters a tabulated game may have.
pub const MAX_TRANSMITTERS: usize = 24;

/// Eavesdropper channel gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gains {
    /// One gain shared by every transmitter.
    Degraded(f64),
    /// Per-transmitter gains of a two-transmitter non-degraded channel.
    TwoUser(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Degraded,
    TwoUser,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameKind::Degraded => f.write_str("degraded"),
            GameKind::TwoUser => f.write_str("two-user"),
        }
    }
}

/// Power constraints, eavesdropper gains and external jammer power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsFile", into = "ParamsFile")]
pub struct ChannelParams {
    pub gammas: Vec<f64>,
    pub gains: Gains,
    pub lambda: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GainsField {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    gammas: Vec<f64>,
    h: GainsField,
    #[serde(default)]
    lambda: f64,
}

impl TryFrom<ParamsFile> for ChannelParams {
    type Error = Error;

    fn try_from(file: ParamsFile) -> Result<Self> {
        let gains = match file.h {
            GainsField::Scalar(h) => Gains::Degraded(h),
            GainsField::Vector(v) => match v.as_slice() {
                [h] => Gains::Degraded(*h),
                [h1, h2] => Gains::TwoUser(*h1, *h2),
                _ => {
                    return Err(Error::UnsupportedGame(format!(
                        "gain vectors of length {} are not supported",
                        v.len()
                    )))
                }
            },
        };
        Ok(ChannelParams {
            gammas: file.gammas,
            gains,
            lambda: file.lambda,
        })
    }
}

impl From<ChannelParams> for ParamsFile {
    fn from(p: ChannelParams) -> Self {
        let h = match p.gains {
            Gains::Degraded(h) => GainsField::Scalar(h),
            Gains::TwoUser(h1, h2) => GainsField::Vector(vec![h1, h2]),
        };
        ParamsFile {
            gammas: p.gammas,
            h,
            lambda: p.lambda,
        }
    }
}

impl ChannelParams {
    pub fn degraded(gammas: impl Into<Vec<f64>>, h: f64, lambda: f64) -> Self {
        ChannelParams {
            gammas: gammas.into(),
            gains: Gains::Degraded(h),
            lambda,
        }
    }

    pub fn two_user(gammas: [f64; 2], gains: [f64; 2], lambda: f64) -> Self {
        ChannelParams {
            gammas: gammas.to_vec(),
            gains: Gains::TwoUser(gains[0], gains[1]),
            lambda,
        }
    }

    /// Parses and validates a JSON parameter document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let params: ChannelParams = serde_json::from_str(text).map_err(|e| {
            // surface domain errors raised during conversion as such
            let msg = e.to_string();
            if let Some(rest) = msg.strip_prefix("unsupported game: ") {
                Error::UnsupportedGame(rest.to_string())
            } else {
                Error::Parse(msg)
            }
        })?;
        validate(params)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameters serialize")
    }

    pub fn num_transmitters(&self) -> usize {
        self.gammas.len()
    }

    pub fn kind(&self) -> GameKind {
        match self.gains {
            Gains::Degraded(_) => GameKind::Degraded,
            Gains::TwoUser(..) => GameKind::TwoUser,
        }
    }

    pub fn full_coalition(&self) -> Coalition {
        Coalition::full(self.num_transmitters())
    }

    /// Effective gain `1 / (1 + Λ)` induced by the external jammer alone.
    pub fn h_lambda(&self) -> f64 {
        effective_gain(self.lambda)
    }

    /// Shared eavesdropper gain, if degraded.
    pub fn degraded_gain(&self) -> Result<f64> {
        match self.gains {
            Gains::Degraded(h) => Ok(h),
            Gains::TwoUser(..) => Err(Error::WrongGameKind {
                expected: GameKind::Degraded,
            }),
        }
    }

    pub fn two_user_gains(&self) -> Result<(f64, f64)> {
        match self.gains {
            Gains::TwoUser(h1, h2) => Ok((h1, h2)),
            Gains::Degraded(_) => Err(Error::WrongGameKind {
                expected: GameKind::TwoUser,
            }),
        }
    }

    /// Transmitters whose power constraint exceeds the external jammer power.
    pub fn active_transmitters(&self) -> Coalition {
        active_set(self, self.full_coalition(), self.lambda)
    }

    /// Sum of the power constraints of the members of `coalition`.
    pub fn power_of(&self, coalition: Coalition) -> f64 {
        coalition.members().map(|l| self.gammas[l]).sum()
    }
}

/// Checks every parameter invariant and returns the parameters unchanged.
pub fn validate(params: ChannelParams) -> Result<ChannelParams> {
    if params.gammas.is_empty() {
        return Err(Error::NoTransmitters);
    }
    for (index, &value) in params.gammas.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositivePower { index, value });
        }
    }
    if !(params.lambda >= 0.0 && params.lambda.is_finite()) {
        return Err(Error::NegativeLambda(params.lambda));
    }
    let gains: &[f64] = match &params.gains {
        Gains::Degraded(h) => std::slice::from_ref(h),
        Gains::TwoUser(h1, h2) => {
            if params.gammas.len() != 2 {
                return Err(Error::GainCountMismatch {
                    found: params.gammas.len(),
                });
            }
            &[*h1, *h2]
        }
    };
    if let Some(&bad) = gains.iter().find(|h| !(**h >= 0.0 && h.is_finite())) {
        return Err(Error::NegativeGain(bad));
    }
    Ok(params)
}

/// Effective eavesdropper-relative gain `1 / (1 + x)` under jamming power `x`.
#[inline]
pub fn effective_gain(jamming: f64) -> f64 {
    1.0 / (1.0 + jamming)
}

/// Worst-case jamming power `(√Λ + Σ_{l∈complement} √Γ_l)²` faced by the
/// coalition whose complement is given.
pub fn jammer_power(params: &ChannelParams, complement: Coalition) -> f64 {
    let others: f64 = complement.members().map(|l| params.gammas[l].sqrt()).sum();
    // expanded so that an empty complement returns Λ exactly
    params.lambda + others * (2.0 * params.lambda.sqrt() + others)
}

/// Members of `coalition` whose power constraint is strictly above `threshold`.
pub fn active_set(params: &ChannelParams, coalition: Coalition, threshold: f64) -> Coalition {
    coalition
        .members()
        .filter(|&l| params.gammas[l] > threshold)
        .collect()
}

/// Divides every power constraint and the jammer power by `omega`.
pub fn scale_game(params: &ChannelParams, omega: f64) -> Result<ChannelParams> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NonPositiveOmega(omega));
    }
    Ok(ChannelParams {
        gammas: params.gammas.iter().map(|g| g / omega).collect(),
        gains: params.gains,
        lambda: params.lambda / omega,
    })
}

/// Quantities every value computation for a coalition starts from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub lambda_sc: f64,
    pub h_eff: f64,
    pub active_set: Coalition,
}

pub fn derive(params: &ChannelParams, coalition: Coalition) -> DerivedQuantities {
    let n = params.num_transmitters();
    let lambda_sc = jammer_power(params, coalition.complement(n));
    DerivedQuantities {
        lambda_sc,
        h_eff: effective_gain(lambda_sc),
        active_set: active_set(params, coalition, lambda_sc),
    }
}

/// A set of transmitters, stored as a bitmask over indices `0..L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_bits(bits: u32) -> Self {
        Coalition(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= 32, "coalition bitmask holds at most 32 transmitters");
        if n == 32 {
            Coalition(u32::MAX)
        } else {
            Coalition((1u32 << n) - 1)
        }
    }

    pub fn singleton(index: usize) -> Self {
        Coalition(1 << index)
    }

    /// Builds a coalition from zero-based member indices.
    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        members.into_iter().collect()
    }

    pub fn contains(self, index: usize) -> bool {
        index < 32 && self.0 & (1 << index) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn complement(self, n: usize) -> Self {
        Coalition(!self.0 & Coalition::full(n).0)
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member index, if any.
    pub fn min_member(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Coalition::full(n))
    }

    /// Zero-based member indices in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            Some(i as usize)
        })
    }

    /// Parses a comma-separated list of one-based member numbers, e.g. `"1,3"`.
    /// The empty string denotes the empty coalition.
    pub fn parse_one_based(text: &str, n: usize) -> Result<Self> {
        let mut c = Coalition::EMPTY;
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let k: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("invalid transmitter number {tok:?}")))?;
            if k == 0 || k > n {
                return Err(Error::Parse(format!(
                    "transmitter number {k} outside 1..={n}"
                )));
            }
            c = c.union(Coalition::singleton(k - 1));
        }
        Ok(c)
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Coalition(iter.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }
}

/// One-based listing, e.g. `{1,2}`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validate_accepts_legal_instances() {
        assert!(validate(ChannelParams::degraded([2.0, 1.4], 0.3, 0.0)).is_ok());
        assert!(validate(ChannelParams::degraded([1.0], 0.0, 0.0)).is_ok());
    }

    #[test]
    fn validate_rejects_pair_gains_with_three_transmitters() {
        let p = ChannelParams {
            gammas: vec![1.0, 0.4, 0.5],
            gains: Gains::TwoUser(0.6, 0.8),
            lambda: 0.1,
        };
        assert_eq!(validate(p), Err(Error::GainCountMismatch { found: 3 }));
    }

    #[test]
    fn validate_error_paths() {
        assert_eq!(
            validate(ChannelParams::degraded([1.0, 0.0], 0.3, 0.0)),
            Err(Error::NonPositivePower {
                index: 1,
                value: 0.0
            })
        );
        assert_eq!(
            validate(ChannelParams::degraded([1.0], 0.3, -0.1)),
            Err(Error::NegativeLambda(-0.1))
        );
        assert_eq!(
            validate(ChannelParams::degraded([1.0], -0.3, 0.0)),
            Err(Error::NegativeGain(-0.3))
        );
        assert_eq!(
            validate(ChannelParams::degraded(Vec::new(), 0.3, 0.0)),
            Err(Error::NoTransmitters)
        );
    }

    #[test]
    fn json_ingestion() {
        let p = ChannelParams::from_json_str(r#"{"gammas":[2,1.4],"h":0.3}"#).unwrap();
        assert_eq!(p, ChannelParams::degraded([2.0, 1.4], 0.3, 0.0));

        let p = ChannelParams::from_json_str(r#"{"gammas":[1,0.4],"h":[0.6,0.8],"lambda":0.1}"#)
            .unwrap();
        assert_eq!(p, ChannelParams::two_user([1.0, 0.4], [0.6, 0.8], 0.1));

        let err =
            ChannelParams::from_json_str(r#"{"gammas":[1,0.4,1],"h":[0.6,0.8,0.1]}"#).unwrap_err();
        assert!(matches!(err, Error::UnsupportedGame(_)), "{err:?}");

        let err =
            ChannelParams::from_json_str(r#"{"gammas":[1,0.4,1],"h":[0.6,0.8]}"#).unwrap_err();
        assert_eq!(err, Error::GainCountMismatch { found: 3 });

        assert!(ChannelParams::from_json_str("{").unwrap_err().is_parse());
    }

    #[test]
    fn json_round_trip() {
        let p = ChannelParams::two_user([1.0, 0.4], [0.1, 1.5], 0.1);
        assert_eq!(
            ChannelParams::from_json_str(&p.to_json_string()).unwrap(),
            p
        );
    }

    #[test]
    fn jammer_power_examples() {
        let p = ChannelParams::degraded([1.0, 0.4], 0.3, 0.1);
        // (√0.4 + √0.1)² = 0.9
        assert!(close(jammer_power(&p, Coalition::singleton(1)), 0.9, 1e-12));
        // (1 + √0.1)²
        assert!(close(
            jammer_power(&p, Coalition::singleton(0)),
            1.732_455_532_033_675_9,
            1e-12
        ));
        assert_eq!(jammer_power(&p, Coalition::EMPTY), p.lambda);
    }

    #[test]
    fn active_set_examples() {
        let p = ChannelParams::degraded([2.0, 1.4], 0.3, 0.0);
        let both = Coalition::from_members([0, 1]);
        assert_eq!(active_set(&p, both, 0.0), both);
        assert_eq!(
            active_set(&p, Coalition::singleton(1), 2.0),
            Coalition::EMPTY
        );
        let q = ChannelParams::degraded([1.0, 0.4], 0.3, 0.1);
        assert_eq!(
            active_set(&q, Coalition::singleton(0), 0.9),
            Coalition::singleton(0)
        );
        // boundary counts as inactive
        assert_eq!(active_set(&p, both, 1.4), Coalition::singleton(0));
    }

    #[test]
    fn scale_game_examples() {
        let p = ChannelParams::degraded([2.0, 1.4], 0.3, 0.0);
        assert_eq!(scale_game(&p, 1.0).unwrap(), p);
        let s = scale_game(&p, 2.0).unwrap();
        assert_eq!(s.gammas, vec![1.0, 0.7]);
        assert_eq!(s.lambda, 0.0);
        let q = ChannelParams::degraded([1.0, 0.4], 0.3, 0.1);
        let s = scale_game(&q, 0.5).unwrap();
        assert_eq!(s.gammas, vec![2.0, 0.8]);
        assert!(close(s.lambda, 0.2, 1e-15));
        assert_eq!(scale_game(&p, 0.0), Err(Error::NonPositiveOmega(0.0)));
        assert!(scale_game(&p, -1.0).is_err());
    }

    #[test]
    fn coalition_arithmetic() {
        let s = Coalition::from_members([0, 2]);
        assert_eq!(s.complement(3), Coalition::singleton(1));
        assert_eq!(s.members().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(Coalition::EMPTY.to_string(), "{}");
        assert_eq!(Coalition::parse_one_based("1, 3", 3).unwrap(), s);
        assert_eq!(Coalition::parse_one_based("", 3).unwrap(), Coalition::EMPTY);
        assert!(Coalition::parse_one_based("4", 3).is_err());
        assert!(Coalition::parse_one_based("x", 3).is_err());
        assert_eq!(s.min_member(), Some(0));
        assert!(Coalition::singleton(1).is_disjoint(s));
        assert!(!s.fits(2));
    }

    #[test]
    fn derived_quantities() {
        let p = ChannelParams::degraded([2.0, 1.4], 0.3, 0.0);
        let d = derive(&p, Coalition::singleton(0));
        assert!(close(d.lambda_sc, 1.4, 1e-12));
        assert!(close(d.h_eff, 1.0 / 2.4, 1e-15));
        assert_eq!(d.active_set, Coalition::singleton(0));
    }
}

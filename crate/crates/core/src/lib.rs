//! Coalitional analysis of Gaussian multiple-access wiretap channels with an
//! external jammer: coalition values, the core, fair secrecy-rate
//! allocations, achievable regions and numeric verification helpers.

mod error;
mod math;

pub mod allocation;
pub mod game;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod region;
pub mod report;
pub mod sweep;
pub mod value;

pub use error::{Error, Result};
pub use game::{build_game, Game, RateVector, DEFAULT_EPS};
pub use model::{ChannelParams, Coalition, Gains, GameKind};
pub use value::SecrecyRate;

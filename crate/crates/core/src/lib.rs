//! Lower and upper bounds on the two-way quantum and secret-key capacities of
//! phase-insensitive bosonic Gaussian channels.
//!
//! Every channel is reduced to its [`CompositionForm`] `(g, λ)`: pure loss of
//! transmissivity `λ` followed by a pure amplifier of gain `g`.

pub mod baselines;
pub mod bell;
pub mod channel;
pub mod config;
pub mod distill;
pub mod error;
pub mod gaussian;
pub mod multirail;
pub mod numeric;
pub mod rate;
pub mod verify;

pub use channel::{ChannelKind, CompositionForm, PiBGC};
pub use config::Config;
pub use error::{Error, Result};

//! Outage analysis of a LEO-satellite IoT uplink with amplify-and-forward
//! relaying over Shadowed-Rician fading.
//!
//! Exact staircase evaluations, high-SNR asymptotes, Monte Carlo estimates
//! and the link budget that sets the feasible SNR range.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod linkbudget;
pub mod mcsim;
pub mod oracle;
pub mod outage;
pub mod quad;
pub mod specfun;

pub use channel::{LinkSnr, ShadowedRician, SrParams, SumSr};
pub use error::{Error, Result};
pub use linkbudget::LinkBudget;
pub use mcsim::{McConfig, OutageEstimate};
pub use outage::{HopPair, Outage, StaircaseConfig, Threshold};

//! Equilibrium computation for the multi-access computation-offloading game.
//!
//! Mobile users choose between computing a task locally and offloading it to
//! a cloud through one of several shared access points. This crate provides:
//!
//! * the game model and cost formulas ([`model`]),
//! * best-reply dynamics, the elastic-cloud ordinal potential and
//!   improvement-path execution with cycle detection ([`dynamics`]),
//! * a compiled-in instance on which better-response dynamics provably cycle
//!   under the non-elastic cloud ([`cycle`]),
//! * the inductive equilibrium solver for the non-elastic cloud
//!   ([`inductive`]),
//! * exhaustive-search oracles: optimal profiles, equilibrium enumeration and
//!   the analytic price-of-anarchy bound ([`oracle`]),
//! * a seeded scenario generator and batch experiment runner ([`scenario`],
//!   [`batch`]).
//!
//! With the default `parallel` feature, batch runs and exhaustive scans use
//! rayon; building with `--no-default-features` selects a sequential
//! fallback with identical outputs.

pub mod batch;
pub mod cycle;
pub mod dynamics;
pub mod error;
pub mod inductive;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod solve;

mod par;

pub use error::{Error, Result};
pub use model::{
    AccessPoint, CloudKind, CloudModel, Congestion, CostBreakdown, GameInstance, MobileUser,
    NashWitness, StrategyProfile, IMPROVEMENT_EPS,
};

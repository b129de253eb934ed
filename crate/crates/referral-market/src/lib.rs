//! Equilibria of a two-period referral-hiring labor market with majority
//! and minority worker groups.
//!
//! Workers are equally able and equally employed at the start; the only
//! asymmetry is group size acting through homophilous tie formation.  The
//! crate computes the resulting referral-offer shares, wage dispersion
//! equilibrium, compensating network parameters, and welfare gap, ingests
//! friendship-nomination data to estimate the model primitives, and
//! cross-checks every analytic limit against a finite-population Monte
//! Carlo simulation.

pub mod calibrate;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod parity;
pub mod sim;
pub mod welfare;

pub use error::{Error, Result};
pub use model::{Group, ModelParam, NetworkParams, WorkerCell};

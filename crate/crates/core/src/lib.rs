//! eqlab: a simulation and optimization toolkit that quantifies how three
//! common algorithmic-fairness constraints — blinding, equalized decision
//! rates, and equalized error rates — change screening decisions and group
//! welfare, and that solves the budget-constrained transportation-voucher
//! allocation problem to trace the efficiency-vs-demographic-share frontier.
//!
//! Modules:
//! - [`population`]: deterministic synthetic populations and CSV ingestion
//! - [`riskmodel`]: logistic risk models under blind/aware feature sets and
//!   true/proxy labels
//! - [`calibration`]: per-group reliability curves and miscalibration metrics
//! - [`policy`]: screening policies, group metrics, and welfare accounting
//! - [`allocation`]: the two-row voucher LP and its share/appearances frontier
//! - [`cli`]: the command-line front end

pub mod allocation;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod population;
pub mod policy;
pub mod riskmodel;
pub mod rng;
pub mod svg;

pub use error::{Error, Result};

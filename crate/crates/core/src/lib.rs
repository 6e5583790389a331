//! Minimum sample size calculations for multinomial logistic regression
//! prediction models, plus the model fitting, calibration and simulation
//! machinery needed to check them.
//!
//! The usual path is: describe the outcome distribution with
//! [`rsq::OutcomeDistribution`], obtain an adjusted Cox-Snell R² per pair of
//! outcome categories (directly, from a C-statistic via [`cstat`], or from the
//! Nagelkerke fallback in [`rsq`]), then run the three criteria in
//! [`criteria`] and take the maximum.

pub mod calibration;
pub mod cli;
pub mod config;
pub mod criteria;
pub mod cstat;
mod error;
pub mod glm;
pub mod report;
pub mod rsq;
pub mod simstudy;

pub use error::{Error, Result};

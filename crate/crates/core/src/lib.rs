//! Elo-covariate Poisson regression models for international football,
//! Monte Carlo simulation of World-Cup-format tournaments, ordinal forecast
//! scoring and Sankey flow output.

pub mod bivpois;
pub mod dataio;
pub mod elo;
pub mod error;
pub mod glm;
pub mod matchmodels;
pub mod pipeline;
pub mod presets;
pub mod report;
pub mod scoring;
pub mod tournament;

pub use error::{Error, Result};

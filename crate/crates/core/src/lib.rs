//! Multiplex financial and trade network analysis: return correlation
//! networks, flow layers, centralities and spanning trees, plus the
//! regression battery used to relate them.

pub mod econometrics;
pub mod error;
pub mod gravity;
pub mod multilayer;
pub mod netcore;
pub mod stats;
pub mod timeseries;

pub use error::{Error, Result};

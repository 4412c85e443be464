//! Numerical lab comparing Thurston's Lipschitz metric with Teichmüller-metric
//! estimators on the once-punctured torus and on regular annuli.

pub mod annulus;
pub mod error;
pub mod experiments;
pub mod holonomy;
pub mod hypkernel;
pub mod metrics;
pub mod topology;

pub use error::{Error, Result};

//! Linearized optomechanics with radiation pressure and a delayed
//! photothermal force.

pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod covariance;
pub mod params;
pub mod quadrature;
pub mod response;
pub mod stability;
pub mod steady_state;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use model::LinearizedSystem;
pub use params::{DerivedParams, SystemParams};

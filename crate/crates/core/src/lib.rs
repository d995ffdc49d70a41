//! Synthetic Wi-Fi access-point traffic from weekly seed profiles.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! - [`timeseries`]: CSV ingestion, resampling onto a regular grid, calendar features
//! - [`seed`]: 168-slot weekly mean/variance profiles extracted from a real series
//! - [`synth`]: Gauss-Markov generator (baseline + Gaussian + AR(1) noise)
//! - [`validate`]: fidelity battery comparing real and synthetic series
//! - [`dataset`] and [`forecast`]: sliding-window datasets and forecasters
//!
//! [`doe`] runs factorial experiment grids over all of the above, [`plots`]
//! emits tidy CSVs for figures and [`cli`] wires everything into the
//! `wifisynth` binary. [`corpus`] simulates richer AP traffic for demos and
//! tests.
//!
//! Runnable examples live under `examples/`, one per capability.

pub mod error;
pub mod timeseries;
pub mod seed;
pub mod synth;
pub mod validate;
pub mod dataset;
pub mod forecast;
pub mod corpus;
pub mod doe;
pub mod plots;
pub mod cli;

pub use error::{Error, Result};

//! Numerical toolkit for diamond networks with conferencing relays.
//!
//! A diamond network connects a central processor through noiseless
//! finite-capacity fronthaul links to a set of relays which jointly
//! transmit to a single user over a multiple-access channel; conferencing
//! links between the relays allow cooperation. This crate computes lower
//! and upper bounds on the capacity of the two- and three-relay Gaussian
//! instances, projects the coding scheme's link-rate constraints with an
//! exact Fourier-Motzkin engine, and verifies the covering / packing /
//! codebook-size arguments behind the achievability scheme by seeded
//! Monte Carlo experiments at small blocklengths.
//!
//! Module map:
//!
//! * [`info`] - discrete information measures over joint pmf tensors
//! * [`gaussian`] - covariance assembly and the log-determinant engine
//! * [`two_relay`] - closed-form two-relay bounds and their optimizers
//! * [`three_relay`] - symmetric three-relay bounds and sweeps
//! * [`fme`] - exact-rational Fourier-Motzkin elimination
//! * [`typicality`] - Monte Carlo covering / packing / dictionary runs
//!
//! Grid sweeps and Monte Carlo trials are embarrassingly parallel; with
//! the default `parallel` feature they fan out over a rayon pool while
//! reducing in deterministic index order, so results are bit-identical
//! to the sequential fallback (`--no-default-features`).

pub mod error;
pub mod exec;
pub mod fme;
pub mod gaussian;
pub mod info;
pub mod optim;
pub mod report;
pub mod three_relay;
pub mod two_relay;
pub mod typicality;

pub use error::{Error, Result};

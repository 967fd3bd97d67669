//! Randomized quasi-Monte Carlo integration toolkit.
//!
//! The crate builds equal-weight cubature rules from randomized
//! low-discrepancy constructions (Owen-scrambled (0,d)-sequences, Latin
//! hypercube samples, Cranley-Patterson rotations) and randomized Frolov
//! lattices, wraps them behind a single estimator interface with
//! reproducible counter-based randomness, and ships a replication harness
//! that turns the estimators' consistency properties (unbiasedness, variance
//! decay, convergence of the mean error, median failure-probability
//! amplification, strong-law trajectories) into finite-sample checks.
//!
//! Start with the runnable examples (`cargo run --release -p rqmc --example
//! scrambled_net_integration`) or the `rqmc` command-line tool.

pub mod discrepancy;
pub mod error;
pub mod estimators;
pub mod frolov;
pub mod harness;
pub mod integrand;
pub mod point_set;
pub mod quadrature;
pub mod randomize;
pub mod rng;
pub mod scramble;
pub mod sequences;
pub mod stats;
pub mod testfunctions;
pub mod verify;

pub use error::{Error, Result};
pub use estimators::{EstimateRecord, EstimatorSpec, MedianConfig, Method, Substrate};
pub use integrand::Integrand;
pub use point_set::{PointSet, Provenance};
pub use rng::{RngStream, Seed};

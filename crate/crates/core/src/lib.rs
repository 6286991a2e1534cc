//! Monte Carlo simulation of handover skipping in dense downlink cellular
//! networks.
//!
//! A run samples a base-station deployment (homogeneous PPP or two-tier
//! Matérn cluster), walks a straight user trajectory through it, lets a
//! handover policy decide which cells to skip, and scores the resulting
//! service schedule: coverage, spectral efficiency, handover rate and cost,
//! and average throughput versus velocity.
//!
//! | module | role |
//! |---|---|
//! | [`geometry`] | deployments, max-RSS association, cell areas |
//! | [`mobility`] | trajectories and cell-visit extraction |
//! | [`radio`] | SINR under best-connected, blackout and CoMP service |
//! | [`policy`] | skip decisions and service schedules |
//! | [`metrics`] | estimators and the cost/throughput formulas |
//! | [`experiment`] | scenario configs, replications, reproduction, calibration |

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod mobility;
pub mod policy;
pub mod radio;
pub mod rng;

pub use error::{Error, Result};

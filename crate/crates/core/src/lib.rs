//! Exponential and cosine step-size schedules for SGD.
//!
//! The crate provides the schedules themselves, analytically characterized
//! test problems with stochastic gradient oracles, an SGD driver, closed-form
//! evaluators for the convergence bounds these schedules enjoy, and seeded
//! experiment runners that check the bounds and the noise-adaptation
//! behaviour empirically.
//!
//! ```
//! use adaptive_stepsizes::prelude::*;
//!
//! let problem = quadratic_objective(vec![1.0, 4.0]).unwrap();
//! let schedule = ScheduleSpec::cosine(1.0 / problem.smoothness(), 1000).unwrap();
//! let cfg = RunConfig::new(problem.point_with_gap(1.0), schedule);
//! let trace = sgd_run(&problem, &NoiseOracle::exact(), &cfg).unwrap();
//! assert!(trace.final_gap < 1e-12);
//! ```

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod numeric;
pub mod optimizer;
pub mod problems;
pub mod rng;
pub mod schedules;
pub mod verify;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::optimizer::{
        sample_weighted_iterate, sgd_restart_run, sgd_run, IterateRecording, RunConfig, RunTrace,
    };
    pub use crate::problems::{
        pl_ratio, polar_pl_objective, quadratic_objective, NoiseKind, NoiseOracle, Objective, PolarPl, Quadratic,
    };
    pub use crate::rng::Stream;
    pub use crate::schedules::{exponential_alpha, RestartParams, ScheduleKind, ScheduleSpec};
}

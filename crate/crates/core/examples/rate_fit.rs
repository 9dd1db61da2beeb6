//! Empirical convergence rates under additive noise: log-log slopes of
//! the mean final gap for the exponential and cosine schedules.
//!
//! ```bash
//! cargo run --release --example rate_fit
//! ```

use adaptive_stepsizes::experiments::{rate_study, EnsembleOptions, RateStudy, ScheduleTemplate, StartPoint};
use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let q = quadratic_objective(vec![1.0; 10])?;
    let study = RateStudy {
        objective: &q,
        start: StartPoint::Fixed(q.point_with_gap(1.0)),
        oracle: NoiseOracle::additive_gaussian(0.1)?,
        schedules: vec![ScheduleTemplate::Exponential { beta: 1.0 }, ScheduleTemplate::Cosine],
        eta0: 1.0,
        horizons: vec![100, 1_000, 10_000],
        options: EnsembleOptions {
            n_seeds: 50,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            ..EnsembleOptions::default()
        },
    };
    for report in rate_study(&study)? {
        for r in &report.records {
            println!(
                "{:<12} T {:>6}: mean gap {:.4e}",
                report.schedule, r.horizon, r.result.mean_gap
            );
        }
        println!(
            "{:<12} slope {:.3} (r^2 {:.4})\n",
            report.schedule, report.fit.slope, report.fit.r_squared
        );
    }
    Ok(())
}

//! Monte-Carlo mean gaps against the PL bounds for the exponential,
//! cosine and polynomial schedules.
//!
//! ```bash
//! cargo run --release --example bound_validation
//! ```

use adaptive_stepsizes::experiments::{bound_validation, BoundValidation, EnsembleOptions, ScheduleTemplate};
use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let lambdas: Vec<f64> = (0..10).map(|i| 1.0 + i as f64 / 9.0).collect();
    let q = quadratic_objective(lambdas)?;
    let v = BoundValidation {
        objective: &q,
        x1: q.point_with_gap(1.0),
        oracles: vec![NoiseOracle::exact(), NoiseOracle::additive_gaussian(0.1)?],
        schedules: vec![
            ScheduleTemplate::Exponential { beta: 1.0 },
            ScheduleTemplate::Cosine,
            ScheduleTemplate::PolyPl { mu: 1.0 },
        ],
        horizons: vec![100, 1_000, 10_000],
        options: EnsembleOptions {
            n_seeds: 100,
            ..EnsembleOptions::default()
        },
    };
    for r in bound_validation(&v)? {
        println!(
            "sigma {:<4} {:<12} T {:>6}: mean + ci {:.3e}  bound {:.3e}  {}",
            r.level,
            r.schedule,
            r.horizon,
            r.result.mean_gap + r.result.ci95_halfwidth,
            r.bound.unwrap_or(f64::NAN),
            if r.within_bound() == Some(true) {
                "ok"
            } else {
                "EXCEEDED"
            }
        );
    }
    Ok(())
}

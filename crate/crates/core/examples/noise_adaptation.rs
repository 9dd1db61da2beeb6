//! The three-noise-level study on the polar function: one set of
//! hyperparameters, exact gradients, slight noise and heavy noise.
//!
//! ```bash
//! cargo run --release --example noise_adaptation
//! ```

use std::f64::consts::FRAC_PI_4;

use adaptive_stepsizes::experiments::{
    noise_adaptation_study, noise_study_summary, EnsembleOptions, NoiseStudy, ScheduleTemplate, StartPoint,
};
use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let g = polar_pl_objective();
    let study = NoiseStudy {
        objective: &g,
        start: StartPoint::Fixed(PolarPl::from_polar(0.9, FRAC_PI_4).to_vec()),
        levels: vec![0.0, 0.05, 1.0],
        schedules: vec![
            ScheduleTemplate::Constant,
            ScheduleTemplate::Exponential { beta: 1.0 },
            ScheduleTemplate::Cosine,
        ],
        eta0: 1.0 / g.smoothness(),
        horizon: 10_000,
        options: EnsembleOptions {
            n_seeds: 100,
            curve_every: 10,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            ..EnsembleOptions::default()
        },
    };
    let records = noise_adaptation_study(&study)?;
    print!("{}", noise_study_summary(&records));
    Ok(())
}

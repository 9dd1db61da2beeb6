//! One SGD run per schedule on a noisy quadratic, with and without
//! Nesterov momentum, the step-size-weighted random iterate, and a trace
//! written as CSV.
//!
//! ```bash
//! cargo run --release --example sgd_run
//! ```

use adaptive_stepsizes::experiments::ScheduleTemplate;
use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let q = quadratic_objective(vec![0.5, 1.0, 2.0])?;
    let oracle = NoiseOracle::additive_gaussian(0.1)?;
    let x1 = q.point_with_gap(1.0);
    let eta0 = 1.0 / q.smoothness();
    let horizon = 5000;

    for template in [
        ScheduleTemplate::Constant,
        ScheduleTemplate::Exponential { beta: 1.0 },
        ScheduleTemplate::Cosine,
    ] {
        let name = template.name();
        let schedule = template.instantiate(eta0, horizon)?;
        let plain = sgd_run(&q, &oracle, &RunConfig::new(x1.clone(), schedule).with_seed(3))?;
        let slower = template.instantiate(eta0 / 10.0, horizon)?;
        let nesterov = sgd_run(
            &q,
            &oracle,
            &RunConfig::new(x1.clone(), slower).with_seed(3).with_momentum(0.9),
        )?;
        println!(
            "{name:<12} final gap {:.3e}   with momentum 0.9 and eta0/10: {:.3e}",
            plain.final_gap, nesterov.final_gap
        );
    }

    let cfg = RunConfig::new(x1.clone(), ScheduleSpec::cosine(eta0, horizon)?)
        .with_seed(3)
        .with_record(IterateRecording::All);
    let full = sgd_run(&q, &oracle, &cfg)?;
    let mut rng = Stream::from_seed(42);
    let (t, x) = sample_weighted_iterate(&full, &mut rng)?;
    println!(
        "\nweighted iterate: t = {t}, ||grad f||^2 = {:.3e}; expectation over the draw {:.3e}",
        q.gradient(&x).iter().map(|g| g * g).sum::<f64>(),
        full.weighted_grad_sq()?
    );

    let trace = sgd_run(
        &q,
        &oracle,
        &RunConfig::new(x1, ScheduleSpec::cosine(eta0, 10)?).with_seed(3),
    )?;
    println!();
    trace.write_csv(std::io::stdout()).expect("stdout");
    Ok(())
}

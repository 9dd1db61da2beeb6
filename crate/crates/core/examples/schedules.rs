//! Step sizes of every schedule family over a short horizon, plus the
//! closed-form partial sums.
//!
//! ```bash
//! cargo run --example schedules
//! ```

use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let horizon = 20;
    let schedules = [
        ScheduleSpec::exponential(1.0, 1.0, horizon)?,
        ScheduleSpec::cosine(1.0, horizon)?,
        ScheduleSpec::inverse_sqrt(1.0, 1.0, horizon)?,
        ScheduleSpec::inverse_linear(1.0, 0.2, horizon)?,
        ScheduleSpec::stagewise(1.0, vec![10, 15], 0.1, horizon)?,
        ScheduleSpec::constant(1.0, horizon)?,
        ScheduleSpec::poly_pl(1.0, 0.0, 0.25, horizon)?,
    ];

    print!("{:>3}", "t");
    for s in &schedules {
        print!(" {:>14}", s.kind().name());
    }
    println!();
    for t in 1..=horizon {
        print!("{t:>3}");
        for s in &schedules {
            print!(" {:>14.6}", s.step_size(t)?);
        }
        println!();
    }

    println!();
    for s in &schedules {
        println!(
            "{:<15} sum over 1..={horizon}: {:.6}",
            s.kind().name(),
            s.schedule_sum(1, horizon)?
        );
    }
    // The cosine sum is eta0 (T - 1) / 2 exactly.
    println!("cosine identity: {}", (horizon as f64 - 1.0) / 2.0);
    println!(
        "exponential alpha for beta = 1: {:.6}",
        exponential_alpha(1.0, horizon)?
    );
    Ok(())
}

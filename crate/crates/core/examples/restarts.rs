//! Cosine annealing with warm restarts: stage layout, a run across
//! growing stages, and the restart bound for a few growth factors.
//!
//! ```bash
//! cargo run --release --example restarts
//! ```

use adaptive_stepsizes::bounds::{bound_restart_pl, BoundInputs};
use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let stages = RestartParams::new(50, 2.0, 4)?;
    println!("stage lengths {:?}, total {}", stages.stage_lengths(), stages.total());

    let q = quadratic_objective(vec![0.5, 1.0])?;
    let oracle = NoiseOracle::additive_gaussian(0.05)?;
    let trace = sgd_restart_run(
        &q,
        &oracle,
        1.0 / q.smoothness(),
        stages.clone(),
        q.point_with_gap(1.0),
        11,
        0.0,
    )?;
    let mut start = 0;
    for (i, len) in stages.stage_lengths().into_iter().enumerate() {
        let end = start + len;
        let gap_after = trace.value_gap.get(end).copied().unwrap_or(trace.final_gap);
        println!(
            "stage {i}: steps {:>4}..{:>4}  eta {:.3} -> {:.3}  gap after {:.3e}",
            start + 1,
            end,
            trace.eta[start],
            trace.eta[end - 1],
            gap_after
        );
        start = end;
    }

    println!();
    for r in [1.0, 1.5, 2.0] {
        let inputs = BoundInputs {
            mu: 0.5,
            b: 0.01,
            t0: 50,
            r,
            l: 4,
            ..BoundInputs::default()
        };
        let v = bound_restart_pl(&inputs)?;
        println!("restart bound, r = {r}: {:.4e}", v.total);
    }
    Ok(())
}

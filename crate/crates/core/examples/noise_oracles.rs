//! Empirical second moment of each stochastic gradient model against
//! `a ||grad f||^2 + b`.
//!
//! ```bash
//! cargo run --release --example noise_oracles
//! ```

use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let q = quadratic_objective(vec![1.0, 2.0, 3.0])?;
    let x = [1.0, -0.5, 0.25];
    let exact = q.gradient(&x);
    let draws = 200_000;

    for oracle in [
        NoiseOracle::exact(),
        NoiseOracle::additive_gaussian(0.3)?,
        NoiseOracle::relative(0.5)?,
        NoiseOracle::mixed(0.5, 0.3)?,
    ] {
        let mut rng = Stream::from_seed(1);
        let mut total = 0.0;
        for _ in 0..draws {
            let g = oracle.sample_gradient(&q, &x, &mut rng)?;
            total += g.iter().zip(&exact).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        println!(
            "{:<48} empirical {:.5}  predicted {:.5}",
            format!("{:?}", oracle.kind()),
            total / draws as f64,
            oracle.second_moment(&exact)
        );
    }
    Ok(())
}

//! Evaluate every convergence bound across horizons and show how the
//! noise and transient terms trade off.
//!
//! ```bash
//! cargo run --example bounds
//! ```

use adaptive_stepsizes::bounds::{bound_exp_pl_with, cos_pl_noise_unrounded, BoundInputs, ExpDenominator, Theorem};
use adaptive_stepsizes::Result;

fn main() -> Result<()> {
    let base = BoundInputs {
        smoothness: 2.0,
        mu: 0.5,
        a: 0.5,
        b: 0.01,
        beta: 1.0,
        c: 2.0,
        delta1: 1.0,
        t0: 100,
        r: 2.0,
        l: 3,
        ..BoundInputs::default()
    };

    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "T", "exp-pl", "cos-pl", "exp-nc", "cos-nc", "poly-pl", "restart"
    );
    for horizon in [100, 1_000, 10_000, 100_000] {
        let inputs = BoundInputs {
            horizon,
            ..base.clone()
        };
        print!("{horizon:>8}");
        for theorem in Theorem::ALL {
            print!(" {:>12.4e}", theorem.evaluate(&inputs)?.total);
        }
        println!();
    }

    let inputs = BoundInputs {
        horizon: 10_000,
        ..base.clone()
    };
    println!("\nterms at T = 10000:");
    for theorem in Theorem::ALL {
        let v = theorem.evaluate(&inputs)?;
        let terms: Vec<String> = v
            .terms
            .iter()
            .map(|t| format!("{} = {:.3e}", t.name, t.value))
            .collect();
        println!("  {:<8} {}", theorem.name(), terms.join(", "));
    }

    let sum_form = bound_exp_pl_with(&inputs, ExpDenominator::Sum)?;
    println!("\nexp-pl with L + a in the exponent: {:.4e}", sum_form.total);
    println!(
        "cos-pl noise term before rounding its constant: {:.4e}",
        cos_pl_noise_unrounded(&inputs)?
    );

    // Choosing beta = L(1 + a) / mu balances the two exponential-schedule terms.
    let tuned = BoundInputs {
        beta: base.smoothness * (1.0 + base.a) / base.mu,
        ..inputs
    };
    println!(
        "exp-pl with beta = L(1+a)/mu: {:.4e}",
        Theorem::ExpPl.evaluate(&tuned)?.total
    );
    Ok(())
}

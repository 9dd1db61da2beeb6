//! Spot checks of the auxiliary inequalities and the gamma function.
//!
//! ```bash
//! cargo run --example lemmas
//! ```

use adaptive_stepsizes::bounds::{gamma, verify_lemma2, verify_lemma3, verify_lemma4, verify_lemma5, verify_lemma6};
use adaptive_stepsizes::verify::lemma_suite;
use adaptive_stepsizes::Result;

fn main() -> Result<()> {
    println!("gamma(0.5)^2 = {:.15} (pi)", gamma(0.5)?.powi(2));
    println!("|sum cos(t pi / T) + 1| at T = 1e6: {:.2e}", verify_lemma3(1_000_000)?);

    let c = verify_lemma4(1.0, 3)?;
    println!(
        "alpha(beta=1, T=3) = {:.5}, ratio {:.4} <= {:.4}",
        c.alpha, c.ratio, c.ratio_bound
    );

    println!("1 - x <= ln(1/x) at x = 0.5: {}", verify_lemma5(0.5)?);

    let c = verify_lemma6(2.0, 1.0, 10)?;
    println!("sum e^(-t) t^2 = {:.5} <= {:.5}", c.lhs, c.rhs);

    let c = verify_lemma2(&[0.5, 0.5], &[1.0, 1.0], 0.0)?;
    println!("recursion {} vs unrolled {}", c.direct, c.unrolled);

    println!("\nfull grids:");
    for o in lemma_suite()? {
        println!(
            "  {:<20} {}  {}",
            o.name,
            if o.passed { "pass" } else { "FAIL" },
            o.detail
        );
    }
    Ok(())
}

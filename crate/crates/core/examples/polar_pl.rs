//! The non-convex polar test function: values along a ray and the
//! minimum PL ratio over the unit disk.
//!
//! ```bash
//! cargo run --example polar_pl
//! ```

use std::f64::consts::PI;

use adaptive_stepsizes::prelude::*;

fn main() -> Result<()> {
    let g = polar_pl_objective();
    println!("smoothness used for step sizes: {}", g.smoothness());
    println!("PL constant on r <= 1: {:.6}", g.pl_constant().unwrap_or(f64::NAN));

    println!("\n{:>6} {:>12} {:>12}", "r", "g(r, pi/3)", "|grad|");
    for i in 0..=10 {
        let r = 0.1 * i as f64;
        let x = PolarPl::from_polar(r, PI / 3.0);
        let grad = g.gradient(&x);
        println!(
            "{r:>6.2} {:>12.6} {:>12.6}",
            g.value(&x),
            grad.iter().map(|v| v * v).sum::<f64>().sqrt()
        );
    }

    let mut worst = (f64::INFINITY, 0.0, 0.0);
    for i in 1..=100 {
        for j in 0..100 {
            let (r, theta) = (0.01 * i as f64, 2.0 * PI * j as f64 / 100.0);
            let ratio = pl_ratio(&g, &PolarPl::from_polar(r, theta))?;
            if ratio < worst.0 {
                worst = (ratio, r, theta);
            }
        }
    }
    println!(
        "\nsmallest ||grad||^2 / (2 gap) on the grid: {:.6} at r = {:.2}, theta = {:.3} (1/24 = {:.6})",
        worst.0,
        worst.1,
        worst.2,
        1.0 / 24.0
    );
    Ok(())
}

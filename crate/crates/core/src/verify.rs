//! Self-contained check suites behind `stepsizes verify`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::bounds::{gamma, verify_lemma2, verify_lemma3, verify_lemma4, verify_lemma5, verify_lemma6};
use crate::error::Result;
use crate::optimizer::{sgd_run, RunConfig};
use crate::problems::{pl_ratio, polar_pl_objective, quadratic_objective, NoiseOracle, Objective, PolarPl};
use crate::rng::Stream;
use crate::schedules::ScheduleSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

/// Gamma accuracy plus the lemma grids: cosine sum, exponential ratio,
/// `1 - x <= ln(1/x)`, the Gamma-tail sum, and recursion unrolling.
pub fn lemma_suite() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    let g1 = gamma(1.0)?;
    let g_half = gamma(0.5)?;
    let err = ((g1 - 1.0).abs()).max((g_half - PI.sqrt()).abs() / PI.sqrt());
    out.push(CheckOutcome::new(
        "gamma",
        err <= 1e-10,
        format!("max relative error {err:.3e}"),
    ));

    let mut worst = 0.0f64;
    for k in 0..200 {
        let t = 10f64.powf(6.0 * k as f64 / 199.0).round() as usize;
        worst = worst.max(verify_lemma3(t)?);
    }
    out.push(CheckOutcome::new(
        "cosine-sum",
        worst <= 1e-10,
        format!("max residual {worst:.3e} over 200 T"),
    ));

    let mut failures = 0usize;
    let mut pairs = 0usize;
    for t in 3..=1000usize {
        for beta in 1..t {
            pairs += 1;
            if !verify_lemma4(beta as f64, t)?.holds() {
                failures += 1;
            }
        }
    }
    out.push(CheckOutcome::new(
        "exponential-ratio",
        failures == 0,
        format!("{failures} failures over {pairs} (beta, T) pairs"),
    ));

    let mut failures = 0usize;
    for k in 0..=1200 {
        if !verify_lemma5(10f64.powf(-6.0 + k as f64 / 100.0))? {
            failures += 1;
        }
    }
    out.push(CheckOutcome::new(
        "log-inequality",
        failures == 0,
        format!("{failures} failures over 1201 x"),
    ));

    let mut failures = Vec::new();
    for a in [0.0, 0.5, 1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0, 4.0] {
        for b in [0.01, 0.1, 0.5, 1.0] {
            for t in [10, 100, 10_000] {
                if !verify_lemma6(a, b, t)?.holds {
                    failures.push(format!("(a={a}, b={b}, T={t})"));
                }
            }
        }
    }
    out.push(CheckOutcome::new(
        "gamma-tail-sum",
        failures.is_empty(),
        if failures.is_empty() {
            "84 configurations".to_string()
        } else {
            failures.join(" ")
        },
    ));

    let mut rng = Stream::from_seed(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a: Vec<f64> = (0..50).map(|_| 1.5 * rng.next_f64()).collect();
        let b: Vec<f64> = (0..50).map(|_| 3.0 * rng.next_f64()).collect();
        let c = verify_lemma2(&a, &b, 10.0 * rng.next_f64())?;
        worst = worst.max((c.direct - c.unrolled).abs() / c.direct.abs().max(f64::MIN_POSITIVE));
    }
    out.push(CheckOutcome::new(
        "recursion-unrolling",
        worst <= 1e-12,
        format!("max relative gap {worst:.3e}"),
    ));
    Ok(out)
}

/// Minimum PL ratio of the polar objective on a 100 x 100 grid with
/// `r` in `(0.01, 1]`.
pub fn pl_suite() -> Result<Vec<CheckOutcome>> {
    let obj = polar_pl_objective();
    let mut min = f64::INFINITY;
    for i in 0..100 {
        let r = 0.01 + 0.99 * (i + 1) as f64 / 100.0;
        for j in 0..100 {
            let theta = 2.0 * PI * j as f64 / 100.0;
            min = min.min(pl_ratio(&obj, &PolarPl::from_polar(r, theta))?);
        }
    }
    let threshold = 1.0 / 24.0 - 1e-9;
    Ok(vec![CheckOutcome::new(
        "polar-pl-ratio",
        min >= threshold,
        format!("min ratio {min:.6} over 10000 points (need >= 1/24)"),
    )])
}

/// Empirical `E ||g - grad f||^2` against `a ||grad f||^2 + b` for every
/// oracle kind at ten fixed points, `draws` samples each, 1% tolerance.
pub fn noise_suite(draws: usize) -> Result<Vec<CheckOutcome>> {
    let obj = quadratic_objective(vec![1.0, 2.0, 3.0, 4.0])?;
    let oracles = [
        ("exact", NoiseOracle::exact()),
        ("additive", NoiseOracle::additive_gaussian(0.5)?),
        ("relative", NoiseOracle::relative(2.0)?),
        ("mixed", NoiseOracle::mixed(0.5, 0.3)?),
    ];
    let mut points_rng = Stream::from_seed(10);
    let points: Vec<Vec<f64>> = (0..10)
        .map(|_| (0..4).map(|_| 4.0 * points_rng.next_f64() - 2.0).collect())
        .collect();

    let mut out = Vec::new();
    for (seed, (name, oracle)) in oracles.iter().enumerate() {
        let mut worst = 0.0f64;
        for (i, x) in points.iter().enumerate() {
            let exact = obj.gradient(x);
            let expected = oracle.second_moment(&exact);
            let mut rng = Stream::from_seed(1000 * seed as u64 + i as u64);
            let mut g = vec![0.0; x.len()];
            let mut total = 0.0;
            for _ in 0..draws {
                g.copy_from_slice(&exact);
                oracle.perturb(&mut g, &mut rng);
                total += g.iter().zip(&exact).map(|(gi, ei)| (gi - ei) * (gi - ei)).sum::<f64>();
            }
            let empirical = total / draws as f64;
            let err = if expected == 0.0 {
                empirical
            } else {
                (empirical - expected).abs() / expected
            };
            worst = worst.max(err);
        }
        out.push(CheckOutcome::new(
            format!("noise-{name}"),
            worst <= 0.01,
            format!("max relative error {worst:.3e} over 10 points x {draws} draws"),
        ));
    }
    Ok(out)
}

/// Exact-gradient runs with `eta_t <= 1/L` must satisfy
/// `f(x_{t+1}) <= f(x_t) - (eta_t / 2) ||grad f(x_t)||^2` at every step.
pub fn descent_suite() -> Result<Vec<CheckOutcome>> {
    let quad = quadratic_objective(vec![1.0, 4.0])?;
    let polar = polar_pl_objective();
    let problems: [(&str, &dyn Objective, Vec<f64>); 2] = [
        ("quadratic", &quad, quad.point_with_gap(1.0)),
        ("polar", &polar, PolarPl::from_polar(0.9, FRAC_PI_4).to_vec()),
    ];
    let mut out = Vec::new();
    for (name, obj, x1) in problems {
        let eta0 = 1.0 / obj.smoothness();
        let horizon = 1000;
        let schedules = [
            ScheduleSpec::exponential(eta0, 1.0, horizon)?,
            ScheduleSpec::cosine(eta0, horizon)?,
            ScheduleSpec::constant(eta0, horizon)?,
        ];
        for schedule in schedules {
            let label = format!("descent-{name}-{}", schedule.kind().name());
            let trace = sgd_run(obj, &NoiseOracle::exact(), &RunConfig::new(x1.clone(), schedule))?;
            let mut violations = 0usize;
            for t in 0..trace.len() {
                let next = trace.value_gap.get(t + 1).copied().unwrap_or(trace.final_gap);
                if next > trace.value_gap[t] - 0.5 * trace.eta[t] * trace.grad_sq[t] + 1e-12 {
                    violations += 1;
                }
            }
            out.push(CheckOutcome::new(
                label,
                violations == 0,
                format!("{violations} violations over {horizon} steps"),
            ));
        }
    }
    Ok(out)
}

//! Acceptance checks: one line per criterion, non-zero exit on any failure.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use adaptive_stepsizes::bounds::{bound_restart_pl, restart_c2, BoundInputs};
use adaptive_stepsizes::experiments::{
    bound_validation, noise_adaptation_study, rate_study, BoundValidation, EnsembleOptions, NoiseStudy, RateStudy,
    ScheduleTemplate, StartPoint,
};
use adaptive_stepsizes::prelude::*;
use adaptive_stepsizes::verify::{all_passed, lemma_suite, noise_suite, pl_suite, CheckOutcome};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn failures(outcomes: &[CheckOutcome]) -> String {
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        format!("{} checks", outcomes.len())
    } else {
        format!("failed: {}", failed.join(", "))
    }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn lemmas() -> Result<Verdict> {
    let outcomes = lemma_suite()?;
    Ok(verdict(all_passed(&outcomes), failures(&outcomes)))
}

fn pl_certificate() -> Result<Verdict> {
    let outcomes = pl_suite()?;
    let detail = outcomes
        .iter()
        .map(|o| o.detail.as_str())
        .collect::<Vec<_>>()
        .join("; ");
    Ok(verdict(all_passed(&outcomes), detail))
}

fn cosine_sum() -> Result<Verdict> {
    let eta0 = 0.7;
    let mut worst = 0.0f64;
    for horizon in 2..=1000usize {
        let s = ScheduleSpec::cosine(eta0, horizon)?;
        let sum = s.direct_sum(1, horizon)?;
        let expected = eta0 * (horizon as f64 - 1.0) / 2.0;
        worst = worst.max((sum - expected).abs() / (1e-12 * horizon as f64));
    }
    Ok(verdict(worst <= 1.0, format!("max |error| / (1e-12 T) = {worst:.3e}")))
}

fn noise_law() -> Result<Verdict> {
    let outcomes = noise_suite(1_000_000)?;
    Ok(verdict(all_passed(&outcomes), failures(&outcomes)))
}

fn noiseless_adaptivity() -> Result<Verdict> {
    let q = quadratic_objective(vec![0.01, 1.0])?;
    let x1 = q.point_with_gap(1.0);
    let horizon = 1 << 14;
    let eta0 = 1.0 / q.smoothness();
    let oracle = NoiseOracle::exact();
    let mut parts = Vec::new();
    let mut passed = true;
    for schedule in [
        ScheduleSpec::exponential(eta0, 1.0, horizon)?,
        ScheduleSpec::cosine(eta0, horizon)?,
    ] {
        let trace = sgd_run(&q, &oracle, &RunConfig::new(x1.clone(), schedule.clone()))?;
        passed &= trace.final_gap <= 1e-6;
        parts.push(format!("{} {:.3e}", schedule.kind().name(), trace.final_gap));
    }
    Ok(verdict(passed, format!("final gaps: {}", parts.join(", "))))
}

fn noisy_rates() -> Result<Verdict> {
    let q = quadratic_objective(vec![1.0; 10])?;
    let study = RateStudy {
        objective: &q,
        start: StartPoint::Fixed(q.point_with_gap(1.0)),
        oracle: NoiseOracle::additive_gaussian(0.1)?,
        schedules: vec![ScheduleTemplate::Cosine, ScheduleTemplate::Exponential { beta: 1.0 }],
        eta0: 1.0 / q.smoothness(),
        horizons: vec![100, 1_000, 10_000, 100_000],
        options: EnsembleOptions {
            n_seeds: 100,
            jobs: jobs(),
            ..EnsembleOptions::default()
        },
    };
    let reports = rate_study(&study)?;
    let mut passed = true;
    let mut parts = Vec::new();
    for (report, max_slope) in reports.iter().zip([-0.6, -0.7]) {
        passed &= report.fit.slope <= max_slope && report.fit.r_squared >= 0.9;
        parts.push(format!(
            "{} slope {:.4} (<= {max_slope}) r2 {:.4}",
            report.schedule, report.fit.slope, report.fit.r_squared
        ));
    }
    Ok(verdict(passed, parts.join(", ")))
}

fn bound_domination() -> Result<Verdict> {
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
            jobs: jobs(),
            ..EnsembleOptions::default()
        },
    };
    let records = bound_validation(&v)?;
    let exceeded: Vec<String> = records
        .iter()
        .filter(|r| r.within_bound() != Some(true))
        .map(|r| format!("{}@{}/T={}", r.schedule, r.level, r.horizon))
        .collect();
    let tightest = records
        .iter()
        .filter_map(|r| r.bound.map(|b| (r.result.mean_gap + r.result.ci95_halfwidth) / b))
        .filter(|x| x.is_finite())
        .fold(0.0f64, f64::max);
    let detail = if exceeded.is_empty() {
        format!(
            "{} configurations, max (mean + ci) / bound = {tightest:.3}",
            records.len()
        )
    } else {
        format!("exceeded: {}", exceeded.join(", "))
    };
    Ok(verdict(exceeded.is_empty() && records.len() == 18, detail))
}

fn synthetic_shape() -> Result<Verdict> {
    let g = polar_pl_objective();
    let study = NoiseStudy {
        objective: &g,
        start: StartPoint::Fixed(PolarPl::from_polar(0.9, FRAC_PI_4).to_vec()),
        levels: vec![1.0],
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
            jobs: jobs(),
            ..EnsembleOptions::default()
        },
    };
    let records = noise_adaptation_study(&study)?;
    let constant = &records[0].result;
    let decrease = constant
        .last_quarter_decrease()
        .ok_or_else(|| Error::Degenerate("constant curve too short".into()))?;
    let mut passed = decrease < 0.2;
    let mut parts = vec![format!("constant last-quarter decrease {:.2}%", 100.0 * decrease)];
    for r in &records[1..] {
        let ratio = constant.mean_gap / r.result.mean_gap;
        passed &= ratio >= 2.0;
        parts.push(format!("{} {ratio:.1}x below constant", r.schedule));
    }
    Ok(verdict(passed, parts.join(", ")))
}

fn restart_consistency() -> Result<Verdict> {
    let q = quadratic_objective(vec![0.5, 1.0, 2.0])?;
    let oracle = NoiseOracle::mixed(0.3, 0.2)?;
    let x1 = q.point_with_gap(1.0);
    let (eta0, t0) = (0.4, 257);
    let restart = sgd_restart_run(&q, &oracle, eta0, RestartParams::new(t0, 1.0, 0)?, x1.clone(), 11, 0.0)?;
    let single_cfg = RunConfig::new(x1, ScheduleSpec::cosine(eta0, t0)?)
        .with_seed(11)
        .with_first_index(0);
    let single = sgd_run(&q, &oracle, &single_cfg)?;
    let cosine_index0 = (0..t0)
        .map(|t| eta0 * (1.0 + (std::f64::consts::PI * t as f64 / t0 as f64).cos()) / 2.0)
        .zip(&restart.eta)
        .all(|(a, b)| a.to_bits() == b.to_bits());
    let bitwise = restart == single && restart.eta.len() == t0;

    let mut worst = 0.0f64;
    for (t0, l, mu, smoothness, a) in [
        (10, 0, 1.0, 1.0, 0.0),
        (10, 3, 0.5, 2.0, 0.5),
        (50, 7, 0.1, 1.0, 1.0),
        (2, 20, 1.0, 4.0, 0.0),
    ] {
        let inputs = BoundInputs {
            smoothness,
            mu,
            a,
            b: 0.0,
            t0,
            r: 1.0,
            l,
            delta1: 1.7,
            ..BoundInputs::default()
        };
        let total = (t0 * (l + 1)) as f64;
        let expected = (-mu * restart_c2(&inputs) * (total - l as f64 - 1.0)).exp() * inputs.delta1;
        let got = bound_restart_pl(&inputs)?.total;
        worst = worst.max((got - expected).abs() / expected.clamp(f64::MIN_POSITIVE, 1.0));
    }
    Ok(verdict(
        bitwise && cosine_index0 && worst <= 1e-12,
        format!("restart trace bitwise equal: {bitwise}, step sizes at t = 0..T-1: {cosine_index0}, bound error {worst:.2e}"),
    ))
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map(|entries| {
            entries
                .filter_map(|e| e.ok())
                .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
                .map(|e| {
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        fs::read(e.path()).unwrap_or_default(),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn determinism() -> Result<Verdict> {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().map_err(|e| Error::Io(e.to_string()))?;
    let invocations: [(&[&str], &str); 4] = [
        (&["run"], "quadratic_run.toml"),
        (&["study", "noise-adaptation"], "noise_adaptation.toml"),
        (&["study", "bound-validation"], "bound_validation.toml"),
        (&["study", "rates"], "rates.toml"),
    ];
    let mut mismatches = Vec::new();
    let mut files = 0;
    for (i, (command, config)) in invocations.iter().enumerate() {
        let mut outputs = Vec::new();
        for (k, jobs) in ["1", "1", "8", "8"].iter().enumerate() {
            let out_dir = tmp.path().join(format!("{i}-{k}"));
            let status = Command::new(env!("CARGO_BIN_EXE_stepsizes"))
                .args(["--jobs", jobs, "--output-dir"])
                .arg(&out_dir)
                .args(*command)
                .arg(configs.join(config))
                .output()
                .map_err(|e| Error::Io(e.to_string()))?
                .status;
            if !status.success() {
                mismatches.push(format!("{config} exited with {status}"));
            }
            outputs.push(csv_bytes(&out_dir));
        }
        files += outputs[0].len();
        if outputs[0].is_empty() || outputs.iter().any(|o| *o != outputs[0]) {
            mismatches.push(format!("{config} differs"));
        }
    }
    let detail = if mismatches.is_empty() {
        format!("{files} CSV files identical over 2 runs each at --jobs 1 and --jobs 8")
    } else {
        mismatches.join(", ")
    };
    Ok(verdict(mismatches.is_empty(), detail))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("lemma suite", Some(Duration::from_secs(10)), lemmas),
        ("PL certificate", Some(Duration::from_secs(1)), pl_certificate),
        ("cosine sum identity", None, cosine_sum),
        ("noise-model law", Some(Duration::from_secs(30)), noise_law),
        (
            "noiseless adaptivity",
            Some(Duration::from_secs(1)),
            noiseless_adaptivity,
        ),
        ("noisy rates", Some(Duration::from_secs(300)), noisy_rates),
        ("bound domination", Some(Duration::from_secs(300)), bound_domination),
        ("synthetic study shape", Some(Duration::from_secs(120)), synthetic_shape),
        ("restart consistency", None, restart_consistency),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let timing = match limit {
            Some(l) => format!("{:.2}s / {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        let ok = passed && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name} ({timing}): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! The `stepsizes` command line.
//!
//! Exit codes: 0 success, 1 a check or embedded assertion failed,
//! 2 usage or configuration error, 3 numerical divergence.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{bound_exp_pl_with, BoundInputs, ExpDenominator, Theorem};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::experiments::{
    bound_validation, fit_rate, noise_adaptation_study, noise_study_summary, rate_study, run_ensemble,
    write_curves_csv, write_report_csv, BoundValidation, EnsembleOptions, NoiseStudy, RateFit, RateStudy, StartPoint,
};
use crate::numeric::sci17;
use crate::optimizer::{sgd_run, IterateRecording, RunConfig};
use crate::problems::NoiseOracle;
use crate::verify::{all_passed, descent_suite, lemma_suite, noise_suite, pl_suite, CheckOutcome};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "stepsizes", version, about = "Exponential and cosine step sizes for SGD")]
struct Cli {
    /// Worker threads for seed ensembles; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Directory for CSV output (overrides `output.path`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one seed ensemble described by a config file.
    Run { config: PathBuf },
    /// Evaluate a convergence bound and print its terms as CSV.
    Bounds(BoundArgs),
    /// Run a built-in check suite.
    Verify {
        suite: Suite,
        /// Draws per point for the noise suite.
        #[arg(long, default_value_t = 1_000_000)]
        draws: usize,
    },
    /// Run a study described by a config file.
    Study { study: StudyKind, config: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Lemmas,
    Pl,
    Noise,
    Descent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StudyKind {
    NoiseAdaptation,
    BoundValidation,
    Rates,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// exp-pl, cos-pl, exp-nc, cos-nc, poly-pl or restart.
    theorem: String,
    #[arg(long = "L")]
    smoothness: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    delta1: Option<f64>,
    #[arg(long = "T0")]
    t0: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    l: Option<usize>,
    /// exp-pl only: use `L + a` in the transient exponent.
    #[arg(long)]
    sum_denominator: bool,
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Divergence { .. } | Error::EnsembleDiverged { .. } => EXIT_DIVERGED,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    if cli.jobs == 0 {
        return Err(Error::Parameter("--jobs must be at least 1".into()));
    }
    match &cli.command {
        Command::Run { config } => cmd_run(cli, config),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Verify { suite, draws } => cmd_verify(*suite, *draws),
        Command::Study { study, config } => cmd_study(cli, *study, config),
    }
}

fn output_dir(cli: &Cli, config: &Config) -> Result<PathBuf> {
    let dir = match &cli.output_dir {
        Some(d) => d.clone(),
        None => PathBuf::from(config.str("output.path")?.unwrap_or(".")),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_file(dir: &Path, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf).map_err(|e| Error::Io(e.to_string()))?;
    let path = dir.join(name);
    fs::write(&path, buf).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn ensemble_options(cli: &Cli, config: &Config) -> Result<EnsembleOptions> {
    Ok(EnsembleOptions {
        n_seeds: config.usize("run.n_seeds")?.unwrap_or(1),
        base_seed: config.u64("run.base_seed")?.unwrap_or(0),
        momentum: config.f64("run.momentum")?.unwrap_or(0.0),
        curve_every: config.usize("output.curve_every")?.unwrap_or(0),
        jobs: cli.jobs,
    })
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<u8> {
    let config = Config::load(path)?;
    let obj = config.objective()?;
    let oracle = config.oracle()?;
    let schedule = config.schedule(obj.as_ref(), &oracle)?;
    let start = config.start_point(obj.as_ref())?;
    let record = config.record()?;
    let opts = ensemble_options(cli, &config)?;
    if opts.n_seeds == 0 {
        return Err(config.error("run.n_seeds", "must be at least 1"));
    }
    let dir = output_dir(cli, &config)?;

    let run_cfg = RunConfig::new(start.point(opts.base_seed), schedule.clone())
        .with_seed(opts.base_seed)
        .with_momentum(opts.momentum)
        .with_record(record);
    let trace = sgd_run(obj.as_ref(), &oracle, &run_cfg)?;
    write_file(&dir, "trace.csv", |w| trace.write_csv(w))?;
    if record != IterateRecording::None {
        write_file(&dir, "iterates.csv", |w| {
            let header: Vec<String> = (0..obj.dim()).map(|i| format!("x{i}")).collect();
            writeln!(w, "t,{}", header.join(","))?;
            for (t, x) in &trace.iterates {
                let coords: Vec<String> = x.iter().map(|v| sci17(*v)).collect();
                writeln!(w, "{t},{}", coords.join(","))?;
            }
            Ok(())
        })?;
    }

    let result = run_ensemble(obj.as_ref(), &oracle, &schedule, &start, &opts)?;
    let name = schedule.kind().name();
    write_file(&dir, "summary.csv", |w| {
        writeln!(w, "schedule,T,n_seeds,mean_gap,std_gap,ci95")?;
        writeln!(
            w,
            "{name},{},{},{},{},{}",
            result.horizon,
            result.n_seeds,
            sci17(result.mean_gap),
            sci17(result.std_gap),
            sci17(result.ci95_halfwidth)
        )
    })?;
    write_file(&dir, "seeds.csv", |w| {
        writeln!(w, "seed,final_gap")?;
        for (seed, gap) in result.seeds(opts.base_seed).zip(&result.final_gaps) {
            writeln!(w, "{seed},{}", sci17(*gap))?;
        }
        Ok(())
    })?;
    if !result.curve.is_empty() {
        write_file(&dir, "curve.csv", |w| {
            writeln!(w, "t,mean_gap")?;
            for p in &result.curve {
                writeln!(w, "{},{}", p.t, sci17(p.mean_gap))?;
            }
            Ok(())
        })?;
    }
    println!(
        "{name} on {}: T = {}, {} seeds, mean final gap {:.6e} (ci95 {:.3e})",
        obj.name(),
        result.horizon,
        result.n_seeds,
        result.mean_gap,
        result.ci95_halfwidth
    );
    if let Ok(g) = trace.weighted_grad_sq() {
        println!("seed {}: step-weighted mean of ||grad f||^2 = {g:.6e}", opts.base_seed);
    }
    println!("wrote {}", dir.display());
    Ok(EXIT_OK)
}

fn cmd_bounds(args: &BoundArgs) -> Result<u8> {
    let theorem = Theorem::from_name(&args.theorem).ok_or_else(|| {
        let names: Vec<&str> = Theorem::ALL.iter().map(|t| t.name()).collect();
        Error::Parameter(format!("unknown theorem `{}` ({})", args.theorem, names.join(", ")))
    })?;
    let d = BoundInputs::default();
    let inputs = BoundInputs {
        smoothness: args.smoothness.unwrap_or(d.smoothness),
        mu: args.mu.unwrap_or(d.mu),
        a: args.a.unwrap_or(d.a),
        b: args.b.unwrap_or(d.b),
        horizon: args.horizon.unwrap_or(d.horizon),
        beta: args.beta.unwrap_or(d.beta),
        c: args.c.unwrap_or(d.c),
        delta1: args.delta1.unwrap_or(d.delta1),
        t0: args.t0.unwrap_or(d.t0),
        r: args.r.unwrap_or(d.r),
        l: args.l.unwrap_or(d.l),
    };
    let value = match (theorem, args.sum_denominator) {
        (Theorem::ExpPl, true) => bound_exp_pl_with(&inputs, ExpDenominator::Sum)?,
        (_, true) => return Err(Error::Parameter("--sum-denominator applies to exp-pl only".into())),
        (t, false) => t.evaluate(&inputs)?,
    };
    println!("theorem,term,value,total");
    for term in &value.terms {
        println!(
            "{},{},{},{}",
            theorem.name(),
            term.name,
            sci17(term.value),
            sci17(value.total)
        );
    }
    Ok(EXIT_OK)
}

fn print_checks(outcomes: &[CheckOutcome]) {
    println!("check,status,detail");
    for o in outcomes {
        println!("{},{},{}", o.name, if o.passed { "pass" } else { "FAIL" }, o.detail);
    }
}

fn cmd_verify(suite: Suite, draws: usize) -> Result<u8> {
    if draws == 0 {
        return Err(Error::Parameter("--draws must be at least 1".into()));
    }
    let outcomes = match suite {
        Suite::Lemmas => lemma_suite()?,
        Suite::Pl => pl_suite()?,
        Suite::Noise => noise_suite(draws)?,
        Suite::Descent => descent_suite()?,
    };
    print_checks(&outcomes);
    Ok(if all_passed(&outcomes) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn write_rates(dir: &Path, fits: &[(String, RateFit)]) -> Result<()> {
    write_file(dir, "rates.csv", |w| {
        writeln!(w, "schedule,slope,intercept,r_squared")?;
        for (name, f) in fits {
            writeln!(
                w,
                "{name},{},{},{}",
                sci17(f.slope),
                sci17(f.intercept),
                sci17(f.r_squared)
            )?;
        }
        Ok(())
    })
}

/// Applies `study.max_slope` and `study.min_r2`, printing each fit.
fn check_fits(config: &Config, fits: &[(String, RateFit)]) -> Result<bool> {
    let max_slope = config.f64("study.max_slope")?;
    let min_r2 = config.f64("study.min_r2")?;
    let mut ok = true;
    for (name, f) in fits {
        let pass = max_slope.is_none_or(|m| f.slope <= m) && min_r2.is_none_or(|m| f.r_squared >= m);
        ok &= pass;
        println!(
            "{name}: slope {:.4}, r^2 {:.4}{}",
            f.slope,
            f.r_squared,
            if pass { "" } else { "  FAIL" }
        );
    }
    Ok(ok)
}

fn cmd_study(cli: &Cli, study: StudyKind, path: &Path) -> Result<u8> {
    let config = Config::load(path)?;
    let dir = output_dir(cli, &config)?;
    let opts = ensemble_options(cli, &config)?;
    let template_names = |default: &[&str]| -> Result<Vec<String>> {
        Ok(config
            .str_list("study.schedules")?
            .unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect()))
    };

    if let StudyKind::Rates = study {
        if let Some(gaps) = config.f64_list("study.gaps")? {
            let ts: Vec<f64> = config
                .f64_list("study.Ts")?
                .ok_or_else(|| config.error("study.Ts", "required with study.gaps"))?;
            let fit = fit_rate(&ts, &gaps).map_err(|e| config.error("study.gaps", e))?;
            let fits = vec![("input".to_string(), fit)];
            write_rates(&dir, &fits)?;
            return Ok(if check_fits(&config, &fits)? {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            });
        }
    }

    let obj = config.objective()?;
    let templates = |default: &[&str]| -> Result<Vec<_>> {
        template_names(default)?
            .iter()
            .map(|name| config.template(name, obj.as_ref()))
            .collect()
    };
    let horizons = || -> Result<Vec<usize>> {
        config
            .usize_list("study.Ts")?
            .ok_or_else(|| config.error("study.Ts", "required for this study"))
    };

    match study {
        StudyKind::NoiseAdaptation => {
            let horizon = config
                .usize("run.T")?
                .ok_or_else(|| config.error("run.T", "required for the noise-adaptation study"))?;
            let levels = config.f64_list("study.levels")?.unwrap_or_else(|| vec![0.0, 0.05, 1.0]);
            let study = NoiseStudy {
                objective: obj.as_ref(),
                start: config.start_point(obj.as_ref())?,
                levels,
                schedules: templates(&["constant", "exponential", "cosine"])?,
                eta0: config.eta0(obj.as_ref(), &NoiseOracle::exact())?,
                horizon,
                options: opts,
            };
            let records = noise_adaptation_study(&study)?;
            write_file(&dir, "report.csv", |w| write_report_csv(&records, w))?;
            if records.iter().any(|r| !r.result.curve.is_empty()) {
                write_file(&dir, "curves.csv", |w| write_curves_csv(&records, w))?;
            }
            let summary = noise_study_summary(&records);
            write_file(&dir, "summary.txt", |w| w.write_all(summary.as_bytes()))?;
            print!("{summary}");
            Ok(EXIT_OK)
        }
        StudyKind::BoundValidation => {
            let oracles = match config.f64_list("study.levels")? {
                Some(levels) => levels
                    .into_iter()
                    .map(NoiseOracle::gaussian_or_exact)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| config.error("study.levels", e))?,
                None => vec![config.oracle()?],
            };
            let StartPoint::Fixed(x1) = config.start_point(obj.as_ref())? else {
                return Err(config.error("run.random_start", "bound validation needs a fixed start point"));
            };
            let v = BoundValidation {
                objective: obj.as_ref(),
                x1,
                oracles,
                schedules: templates(&["exponential", "cosine", "poly_pl"])?,
                horizons: horizons()?,
                options: opts,
            };
            let records = bound_validation(&v)?;
            write_file(&dir, "report.csv", |w| write_report_csv(&records, w))?;
            let mut ok = true;
            for r in &records {
                let within = r.within_bound() == Some(true);
                ok &= within;
                println!(
                    "sigma {} {:<12} T {:>7}: mean {:.4e} + ci {:.2e} vs bound {:.4e}{}",
                    r.level,
                    r.schedule,
                    r.horizon,
                    r.result.mean_gap,
                    r.result.ci95_halfwidth,
                    r.bound.unwrap_or(f64::NAN),
                    if within { "" } else { "  EXCEEDED" }
                );
            }
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        StudyKind::Rates => {
            let oracle = config.oracle()?;
            let study = RateStudy {
                objective: obj.as_ref(),
                start: config.start_point(obj.as_ref())?,
                eta0: config.eta0(obj.as_ref(), &oracle)?,
                oracle,
                schedules: templates(&["exponential", "cosine"])?,
                horizons: horizons()?,
                options: opts,
            };
            let reports = rate_study(&study)?;
            let records: Vec<_> = reports.iter().flat_map(|r| r.records.clone()).collect();
            write_file(&dir, "report.csv", |w| write_report_csv(&records, w))?;
            let fits: Vec<(String, RateFit)> = reports.iter().map(|r| (r.schedule.clone(), r.fit)).collect();
            write_rates(&dir, &fits)?;
            Ok(if check_fits(&config, &fits)? {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

//! Seed ensembles, log-log rate fits, the noise-adaptation study and
//! empirical-versus-theoretical bound validation.

use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::bounds::{bound_cos_pl, bound_exp_pl, bound_poly_pl, BoundInputs};
use crate::error::{Error, Result};
use crate::numeric::sci17;
use crate::optimizer::{sgd_run, RunConfig};
use crate::problems::{NoiseKind, NoiseOracle, Objective};
use crate::rng::Stream;
use crate::schedules::{RestartParams, ScheduleSpec};

/// Smallest ensemble for which a normal-approximation CI is reported.
pub const MIN_SEEDS_FOR_CI: usize = 30;

/// A schedule family with its horizon left open.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleTemplate {
    Exponential {
        beta: f64,
    },
    Cosine,
    /// The horizon is fixed by the stages; `instantiate` ignores `T`.
    CosineRestart {
        t0: usize,
        r: f64,
        l: usize,
    },
    InverseSqrt {
        alpha: f64,
    },
    InverseLinear {
        alpha: f64,
    },
    Stagewise {
        milestones: Milestones,
        factor: f64,
    },
    Constant,
    PolyPl {
        mu: f64,
    },
}

impl ScheduleTemplate {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Cosine => "cosine",
            Self::CosineRestart { .. } => "cosine_restart",
            Self::InverseSqrt { .. } => "inverse_sqrt",
            Self::InverseLinear { .. } => "inverse_linear",
            Self::Stagewise { .. } => "stagewise",
            Self::Constant => "constant",
            Self::PolyPl { .. } => "poly_pl",
        }
    }

    pub fn instantiate(&self, eta0: f64, horizon: usize) -> Result<ScheduleSpec> {
        match self {
            Self::Exponential { beta } => ScheduleSpec::exponential(eta0, *beta, horizon),
            Self::Cosine => ScheduleSpec::cosine(eta0, horizon),
            Self::CosineRestart { t0, r, l } => ScheduleSpec::cosine_restart(eta0, RestartParams::new(*t0, *r, *l)?),
            Self::InverseSqrt { alpha } => ScheduleSpec::inverse_sqrt(eta0, *alpha, horizon),
            Self::InverseLinear { alpha } => ScheduleSpec::inverse_linear(eta0, *alpha, horizon),
            Self::Stagewise { milestones, factor } => {
                ScheduleSpec::stagewise(eta0, milestones.resolve(horizon)?, *factor, horizon)
            }
            Self::Constant => ScheduleSpec::constant(eta0, horizon),
            Self::PolyPl { mu } => ScheduleSpec::poly_pl_with_cap(eta0, *mu, horizon),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Milestones {
    /// Fixed step indices.
    Steps(Vec<usize>),
    /// Fractions of the horizon, placed at `round(f T)`.
    Fractions(Vec<f64>),
}

impl Milestones {
    pub fn resolve(&self, horizon: usize) -> Result<Vec<usize>> {
        match self {
            Self::Steps(steps) => Ok(steps.clone()),
            Self::Fractions(fractions) => fractions
                .iter()
                .map(|f| {
                    if *f > 0.0 && *f < 1.0 {
                        Ok(((f * horizon as f64).round() as usize).max(1))
                    } else {
                        Err(Error::Parameter(format!(
                            "milestone fractions must lie in (0, 1), got {f}"
                        )))
                    }
                })
                .collect(),
        }
    }
}

/// Where each ensemble member starts.
#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    Fixed(Vec<f64>),
    /// `center` plus an independent uniform draw in `[-half_width, half_width]`
    /// per coordinate, from a stream derived from the member's seed.
    Uniform {
        center: Vec<f64>,
        half_width: f64,
    },
}

impl StartPoint {
    pub fn point(&self, seed: u64) -> Vec<f64> {
        match self {
            Self::Fixed(x) => x.clone(),
            Self::Uniform { center, half_width } => {
                let mut rng = Stream::from_seed(!seed);
                center
                    .iter()
                    .map(|c| c + half_width * (2.0 * rng.next_f64() - 1.0))
                    .collect()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Fixed(x) | Self::Uniform { center: x, .. } => x.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    pub n_seeds: usize,
    pub base_seed: u64,
    pub momentum: f64,
    /// Mean-gap curve spacing; 0 disables the curve.
    pub curve_every: usize,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            n_seeds: 1,
            base_seed: 0,
            momentum: 0.0,
            curve_every: 0,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: usize,
    pub mean_gap: f64,
}

/// Aggregate of the final gaps `f(x_{T+1}) - f*` over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub horizon: usize,
    pub n_seeds: usize,
    pub mean_gap: f64,
    /// Sample standard deviation (`n - 1` denominator; 0 for one seed).
    pub std_gap: f64,
    /// `1.96 std / sqrt(n)`.
    pub ci95_halfwidth: f64,
    /// Per-seed final gaps in seed order.
    pub final_gaps: Vec<f64>,
    /// Mean gap at `t = 1, 1 + k, 1 + 2k, ...` and at `T + 1`.
    pub curve: Vec<CurvePoint>,
}

impl EnsembleResult {
    pub fn seeds(&self, base_seed: u64) -> impl Iterator<Item = u64> {
        (0..self.n_seeds as u64).map(move |i| base_seed + i)
    }

    /// Mean of the curve over `t / T` in `[from, to]`.
    pub fn window_mean(&self, from: f64, to: f64) -> Option<f64> {
        let t = self.horizon as f64;
        let (sum, count) = self
            .curve
            .iter()
            .filter(|p| (from..=to).contains(&(p.t as f64 / t)))
            .fold((0.0, 0usize), |(s, c), p| (s + p.mean_gap, c + 1));
        (count > 0).then(|| sum / count as f64)
    }

    /// Relative decrease of the mean-gap curve over the last quarter,
    /// comparing window means around `0.75 T` and at the end.
    pub fn last_quarter_decrease(&self) -> Option<f64> {
        let start = self.window_mean(0.70, 0.75)?;
        let end = self.window_mean(0.95, 1.0)?;
        Some(1.0 - end / start)
    }
}

struct SeedOutcome {
    final_gap: f64,
    curve: Vec<f64>,
}

fn curve_indices(horizon: usize, every: usize) -> Vec<usize> {
    if every == 0 {
        return Vec::new();
    }
    let mut ts: Vec<usize> = (1..=horizon).step_by(every).collect();
    ts.push(horizon + 1);
    ts
}

fn run_seed(
    obj: &dyn Objective,
    oracle: &NoiseOracle,
    schedule: &ScheduleSpec,
    start: &StartPoint,
    opts: &EnsembleOptions,
    seed: u64,
) -> Result<SeedOutcome> {
    let cfg = RunConfig::new(start.point(seed), schedule.clone())
        .with_seed(seed)
        .with_momentum(opts.momentum);
    let trace = sgd_run(obj, oracle, &cfg)?;
    let curve = curve_indices(trace.len(), opts.curve_every)
        .into_iter()
        .map(|t| trace.value_gap.get(t - 1).copied().unwrap_or(trace.final_gap))
        .collect();
    Ok(SeedOutcome {
        final_gap: trace.final_gap,
        curve,
    })
}

fn run_seeds(
    obj: &dyn Objective,
    oracle: &NoiseOracle,
    schedule: &ScheduleSpec,
    start: &StartPoint,
    opts: &EnsembleOptions,
    seeds: &[u64],
) -> Result<Vec<(u64, Result<SeedOutcome>)>> {
    let run = |&seed: &u64| (seed, run_seed(obj, oracle, schedule, start, opts, seed));
    if opts.jobs <= 1 {
        return Ok(seeds.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {} worker threads: {e}", opts.jobs)))?;
    Ok(pool.install(|| seeds.par_iter().map(run).collect()))
}

/// Mean, sample standard deviation and 95% CI half-width, summed in order.
pub fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let std = var.sqrt();
    (mean, std, 1.96 * std / n.sqrt())
}

/// Sequential reduction in seed order; divergent seeds are reported together.
fn aggregate(
    horizon: usize,
    curve_every: usize,
    mut outcomes: Vec<(u64, Result<SeedOutcome>)>,
) -> Result<EnsembleResult> {
    outcomes.sort_by_key(|(seed, _)| *seed);
    let mut diverged = Vec::new();
    let mut ok = Vec::with_capacity(outcomes.len());
    for (seed, outcome) in outcomes {
        match outcome {
            Ok(o) => ok.push(o),
            Err(Error::Divergence { .. }) => diverged.push(seed),
            Err(e) => return Err(e),
        }
    }
    if !diverged.is_empty() {
        return Err(Error::EnsembleDiverged { seeds: diverged });
    }
    let final_gaps: Vec<f64> = ok.iter().map(|o| o.final_gap).collect();
    let (mean_gap, std_gap, ci95_halfwidth) = summarize(&final_gaps);
    let n = ok.len() as f64;
    let curve = curve_indices(horizon, curve_every)
        .into_iter()
        .enumerate()
        .map(|(i, t)| CurvePoint {
            t,
            mean_gap: ok.iter().map(|o| o.curve[i]).sum::<f64>() / n,
        })
        .collect();
    Ok(EnsembleResult {
        horizon,
        n_seeds: ok.len(),
        mean_gap,
        std_gap,
        ci95_halfwidth,
        final_gaps,
        curve,
    })
}

/// Runs seeds `base_seed..base_seed + n_seeds` and aggregates their final
/// gaps in seed order, so the result does not depend on `jobs`.
pub fn run_ensemble(
    obj: &dyn Objective,
    oracle: &NoiseOracle,
    schedule: &ScheduleSpec,
    start: &StartPoint,
    opts: &EnsembleOptions,
) -> Result<EnsembleResult> {
    if opts.n_seeds == 0 {
        return Err(Error::Parameter("n_seeds must be at least 1".into()));
    }
    if start.dim() != obj.dim() {
        return Err(Error::Parameter(format!(
            "start point has dimension {}, objective has {}",
            start.dim(),
            obj.dim()
        )));
    }
    let seeds: Vec<u64> = (0..opts.n_seeds as u64).map(|i| opts.base_seed + i).collect();
    let outcomes = run_seeds(obj, oracle, schedule, start, opts, &seeds)?;
    aggregate(schedule.horizon(), opts.curve_every, outcomes)
}

/// Least-squares fit of `ln(gap)` against `ln(T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate(horizons: &[f64], gaps: &[f64]) -> Result<RateFit> {
    if horizons.len() != gaps.len() {
        return Err(Error::Parameter(format!(
            "{} horizons but {} gaps",
            horizons.len(),
            gaps.len()
        )));
    }
    if horizons.len() < 3 {
        return Err(Error::Parameter("a rate fit needs at least 3 points".into()));
    }
    if let Some(g) = gaps.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::Domain(format!("gaps must be positive, got {g}")));
    }
    if let Some(t) = horizons.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::Domain(format!("horizons must be positive, got {t}")));
    }
    let xs: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all horizons are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

/// One `(noise level, schedule, T)` cell of a study report.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub level: f64,
    pub schedule: String,
    pub horizon: usize,
    pub result: EnsembleResult,
    pub bound: Option<f64>,
}

impl StudyRecord {
    /// `mean + ci <= bound`, when a bound applies.
    pub fn within_bound(&self) -> Option<bool> {
        self.bound
            .map(|b| self.result.mean_gap + self.result.ci95_halfwidth <= b)
    }
}

/// Additive standard deviation of an oracle, the study's noise level.
pub fn noise_level(oracle: &NoiseOracle) -> f64 {
    match oracle.kind() {
        NoiseKind::AdditiveGaussian { sigma } | NoiseKind::Mixed { sigma, .. } => sigma,
        NoiseKind::Exact | NoiseKind::Relative { .. } => 0.0,
    }
}

/// CSV `level,schedule,T,mean_gap,ci95,bound,within_bound`.
///
/// The CI cell is empty for stochastic ensembles smaller than
/// [`MIN_SEEDS_FOR_CI`]; bound cells are empty where no bound applies.
pub fn write_report_csv<W: Write>(records: &[StudyRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "level,schedule,T,mean_gap,ci95,bound,within_bound")?;
    for r in records {
        let ci = if r.result.n_seeds >= MIN_SEEDS_FOR_CI || r.result.std_gap == 0.0 {
            sci17(r.result.ci95_halfwidth)
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sci17(r.level),
            r.schedule,
            r.horizon,
            sci17(r.result.mean_gap),
            ci,
            r.bound.map(sci17).unwrap_or_default(),
            r.within_bound().map(|w| w.to_string()).unwrap_or_default(),
        )?;
    }
    Ok(())
}

/// Mean-gap curves as CSV `level,schedule,t,mean_gap`.
pub fn write_curves_csv<W: Write>(records: &[StudyRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "level,schedule,t,mean_gap")?;
    for r in records {
        for p in &r.result.curve {
            writeln!(out, "{},{},{},{}", sci17(r.level), r.schedule, p.t, sci17(p.mean_gap))?;
        }
    }
    Ok(())
}

/// Same hyperparameters at every noise level.
#[derive(Clone)]
pub struct NoiseStudy<'a> {
    pub objective: &'a dyn Objective,
    pub start: StartPoint,
    /// Additive noise standard deviations.
    pub levels: Vec<f64>,
    pub schedules: Vec<ScheduleTemplate>,
    pub eta0: f64,
    pub horizon: usize,
    pub options: EnsembleOptions,
}

/// One ensemble per `(level, schedule)`; levels are additive Gaussian
/// standard deviations and 0 means exact gradients.
pub fn noise_adaptation_study(study: &NoiseStudy) -> Result<Vec<StudyRecord>> {
    let mut records = Vec::new();
    for &level in &study.levels {
        let oracle = NoiseOracle::gaussian_or_exact(level)?;
        for template in &study.schedules {
            let schedule = template.instantiate(study.eta0, study.horizon)?;
            let result = run_ensemble(study.objective, &oracle, &schedule, &study.start, &study.options)?;
            records.push(StudyRecord {
                level,
                schedule: template.name().to_string(),
                horizon: schedule.horizon(),
                result,
                bound: None,
            });
        }
    }
    Ok(records)
}

/// Plain-text digest of a noise study: final gaps, the ratio to the
/// constant schedule at the same level, and the last-quarter decrease.
pub fn noise_study_summary(records: &[StudyRecord]) -> String {
    let mut s = String::new();
    let mut levels: Vec<f64> = Vec::new();
    for r in records {
        if !levels.contains(&r.level) {
            levels.push(r.level);
        }
    }
    for level in levels {
        let _ = writeln!(s, "sigma = {level}");
        let rows: Vec<&StudyRecord> = records.iter().filter(|r| r.level == level).collect();
        let constant = rows
            .iter()
            .find(|r| r.schedule == "constant")
            .map(|r| r.result.mean_gap);
        for r in rows {
            let _ = write!(s, "  {:<15} final mean gap {:.4e}", r.schedule, r.result.mean_gap);
            if let Some(c) = constant.filter(|_| r.schedule != "constant") {
                let _ = write!(s, "  ({:.3}x constant)", r.result.mean_gap / c);
            }
            if let Some(d) = r.result.last_quarter_decrease() {
                let _ = write!(s, "  last-quarter decrease {:.1}%", 100.0 * d);
            }
            s.push('\n');
        }
    }
    s
}

#[derive(Clone)]
pub struct BoundValidation<'a> {
    pub objective: &'a dyn Objective,
    pub x1: Vec<f64>,
    pub oracles: Vec<NoiseOracle>,
    /// Exponential, cosine or poly_pl templates.
    pub schedules: Vec<ScheduleTemplate>,
    pub horizons: Vec<usize>,
    pub options: EnsembleOptions,
}

/// Compares empirical mean final gaps with the matching PL bound at
/// `eta0 = 1 / (L (1 + a))`.
pub fn bound_validation(v: &BoundValidation) -> Result<Vec<StudyRecord>> {
    let obj = v.objective;
    let mu = obj
        .pl_constant()
        .ok_or_else(|| Error::Capability(format!("objective {} has no PL constant", obj.name())))?;
    let l = obj.smoothness();
    let delta1 = obj.value(&v.x1) - obj.f_star();
    let start = StartPoint::Fixed(v.x1.clone());
    let mut records = Vec::new();
    for oracle in &v.oracles {
        let stochastic = !matches!(oracle.kind(), NoiseKind::Exact);
        if stochastic && v.options.n_seeds < MIN_SEEDS_FOR_CI {
            return Err(Error::Parameter(format!(
                "bound validation with a stochastic oracle needs at least {MIN_SEEDS_FOR_CI} seeds"
            )));
        }
        let a = oracle.a();
        let eta0 = 1.0 / (l * (1.0 + a));
        for template in &v.schedules {
            for &horizon in &v.horizons {
                let inputs = BoundInputs {
                    smoothness: l,
                    mu,
                    a,
                    b: oracle.b(obj.dim()),
                    horizon,
                    delta1,
                    ..BoundInputs::default()
                };
                let (schedule, bound) = match template {
                    ScheduleTemplate::Exponential { beta } => (
                        ScheduleSpec::exponential(eta0, *beta, horizon)?,
                        bound_exp_pl(&BoundInputs { beta: *beta, ..inputs })?,
                    ),
                    ScheduleTemplate::Cosine => (ScheduleSpec::cosine(eta0, horizon)?, bound_cos_pl(&inputs)?),
                    ScheduleTemplate::PolyPl { .. } => {
                        (ScheduleSpec::poly_pl(l, a, mu, horizon)?, bound_poly_pl(&inputs)?)
                    }
                    other => {
                        return Err(Error::Capability(format!(
                            "no PL bound for the {} schedule",
                            other.name()
                        )))
                    }
                };
                let result = run_ensemble(obj, oracle, &schedule, &start, &v.options)?;
                records.push(StudyRecord {
                    level: noise_level(oracle),
                    schedule: template.name().to_string(),
                    horizon,
                    result,
                    bound: Some(bound.total),
                });
            }
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub schedule: String,
    pub fit: RateFit,
    pub records: Vec<StudyRecord>,
}

#[derive(Clone)]
pub struct RateStudy<'a> {
    pub objective: &'a dyn Objective,
    pub start: StartPoint,
    pub oracle: NoiseOracle,
    pub schedules: Vec<ScheduleTemplate>,
    pub eta0: f64,
    pub horizons: Vec<usize>,
    pub options: EnsembleOptions,
}

/// Mean final gap per horizon and a log-log fit per schedule.
pub fn rate_study(study: &RateStudy) -> Result<Vec<RateReport>> {
    let mut reports = Vec::new();
    for template in &study.schedules {
        let mut records = Vec::new();
        for &horizon in &study.horizons {
            let schedule = template.instantiate(study.eta0, horizon)?;
            let result = run_ensemble(study.objective, &study.oracle, &schedule, &study.start, &study.options)?;
            records.push(StudyRecord {
                level: noise_level(&study.oracle),
                schedule: template.name().to_string(),
                horizon,
                result,
                bound: None,
            });
        }
        let ts: Vec<f64> = records.iter().map(|r| r.horizon as f64).collect();
        let gaps: Vec<f64> = records.iter().map(|r| r.result.mean_gap).collect();
        reports.push(RateReport {
            schedule: template.name().to_string(),
            fit: fit_rate(&ts, &gaps)?,
            records,
        });
    }
    Ok(reports)
}

//! Plain SGD, optional Nesterov momentum, cosine annealing with warm
//! restarts, and the step-size-weighted random iterate.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::numeric::{norm_sq, sci17};
use crate::problems::{check_dim, NoiseOracle, Objective};
use crate::rng::Stream;
use crate::schedules::{RestartParams, ScheduleKind, ScheduleSpec};

/// Magnitude beyond which a value or gradient norm counts as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterateRecording {
    #[default]
    None,
    /// Keep `x_t` for `t = 1, 1 + k, 1 + 2k, ...`.
    Thinned(usize),
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub x1: Vec<f64>,
    /// Number of SGD updates `T`.
    pub iterations: usize,
    pub schedule: ScheduleSpec,
    /// Nesterov coefficient in `[0, 1)`; zero gives plain SGD.
    pub momentum: f64,
    pub seed: u64,
    pub record: IterateRecording,
    /// Schedule index of the first update. `None` uses `1` for the main
    /// schedules and `0` for restart schedules.
    pub first_index: Option<usize>,
}

impl RunConfig {
    /// Runs the schedule over its whole horizon, plain SGD, seed 0.
    pub fn new(x1: Vec<f64>, schedule: ScheduleSpec) -> Self {
        Self {
            x1,
            iterations: schedule.horizon(),
            schedule,
            momentum: 0.0,
            seed: 0,
            record: IterateRecording::None,
            first_index: None,
        }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_momentum(mut self, momentum: f64) -> Self {
        self.momentum = momentum;
        self
    }

    pub fn with_record(mut self, record: IterateRecording) -> Self {
        self.record = record;
        self
    }

    /// Evaluates the schedule from index `first` on; `0` runs a cosine
    /// schedule the way a single restart stage does.
    pub fn with_first_index(mut self, first: usize) -> Self {
        self.first_index = Some(first);
        self
    }

    /// Schedule index used for the `k`-th update (`k = 0..T`).
    ///
    /// Restart schedules run `0..T`, all others `1..=T`.
    fn step_index(&self, k: usize) -> usize {
        match (self.first_index, self.schedule.kind()) {
            (Some(first), _) => first + k,
            (None, ScheduleKind::CosineRestart(_)) => k,
            (None, _) => k + 1,
        }
    }

    fn validate(&self, obj: &dyn Objective) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Parameter("T must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Parameter(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if let IterateRecording::Thinned(0) = self.record {
            return Err(Error::Parameter("thinning interval must be positive".into()));
        }
        check_dim(obj, &self.x1)?;
        let last = self.step_index(self.iterations - 1);
        if last > self.schedule.max_index() {
            return Err(Error::Parameter(format!(
                "schedule horizon {} is shorter than T = {}",
                self.schedule.horizon(),
                self.iterations
            )));
        }
        Ok(())
    }
}

/// Per-iteration record of one run. Index `i` holds iteration `t = i + 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub eta: Vec<f64>,
    /// `f(x_t) - f*`.
    pub value_gap: Vec<f64>,
    /// `||grad f(x_t)||^2`.
    pub grad_sq: Vec<f64>,
    /// `x_{T+1}`.
    pub final_point: Vec<f64>,
    pub final_gap: f64,
    /// `(t, x_t)` pairs kept according to the run's [`IterateRecording`].
    pub iterates: Vec<(usize, Vec<f64>)>,
    pub record: IterateRecording,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// `sum_t eta_t ||grad f(x_t)||^2 / sum_t eta_t`: the expectation of the
    /// squared gradient norm at the weighted random iterate.
    pub fn weighted_grad_sq(&self) -> Result<f64> {
        let total: f64 = self.eta.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate("all step sizes are zero".into()));
        }
        let weighted: f64 = self.eta.iter().zip(&self.grad_sq).map(|(e, g)| e * g).sum();
        Ok(weighted / total)
    }

    /// CSV with header `t,eta,value_gap,grad_sq`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,eta,value_gap,grad_sq")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                sci17(self.eta[i]),
                sci17(self.value_gap[i]),
                sci17(self.grad_sq[i])
            )?;
        }
        Ok(())
    }
}

fn check_finite(iteration: usize, value: f64, grad_sq: f64) -> Result<()> {
    let grad_norm = grad_sq.sqrt();
    if !value.is_finite() || value.abs() > DIVERGENCE_LIMIT {
        return Err(Error::Divergence {
            iteration,
            detail: format!("objective value {value}"),
        });
    }
    if !grad_norm.is_finite() || grad_norm > DIVERGENCE_LIMIT {
        return Err(Error::Divergence {
            iteration,
            detail: format!("gradient norm {grad_norm}"),
        });
    }
    Ok(())
}

/// Runs `x_{t+1} = x_t - eta_t g_t` for `cfg.iterations` steps.
///
/// With momentum `m > 0` the Nesterov update without dampening is used:
/// `v_t = m v_{t-1} + g_t`, `x_{t+1} = x_t - eta_t (g_t + m v_t)`.
pub fn sgd_run(obj: &dyn Objective, oracle: &NoiseOracle, cfg: &RunConfig) -> Result<RunTrace> {
    cfg.validate(obj)?;
    let dim = obj.dim();
    let steps = cfg.iterations;
    let mut rng = Stream::from_seed(cfg.seed);
    let mut x = cfg.x1.clone();
    let mut grad = vec![0.0; dim];
    let mut velocity = vec![0.0; dim];
    let momentum = cfg.momentum;
    let f_star = obj.f_star();

    let mut trace = RunTrace {
        eta: Vec::with_capacity(steps),
        value_gap: Vec::with_capacity(steps),
        grad_sq: Vec::with_capacity(steps),
        record: cfg.record,
        ..RunTrace::default()
    };

    for k in 0..steps {
        let t = k + 1;
        let eta = cfg.schedule.step_size(cfg.step_index(k))?;
        let value = obj.value(&x);
        obj.gradient_into(&x, &mut grad);
        let grad_sq = norm_sq(&grad);
        check_finite(t, value, grad_sq)?;

        trace.eta.push(eta);
        trace.value_gap.push(value - f_star);
        trace.grad_sq.push(grad_sq);
        match cfg.record {
            IterateRecording::All => trace.iterates.push((t, x.clone())),
            IterateRecording::Thinned(every) if k % every == 0 => trace.iterates.push((t, x.clone())),
            _ => {}
        }

        oracle.perturb(&mut grad, &mut rng);
        if momentum == 0.0 {
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= eta * gi;
            }
        } else {
            for ((xi, gi), vi) in x.iter_mut().zip(&grad).zip(velocity.iter_mut()) {
                *vi = momentum * *vi + gi;
                *xi -= eta * (gi + momentum * *vi);
            }
        }
    }

    let value = obj.value(&x);
    obj.gradient_into(&x, &mut grad);
    check_finite(steps + 1, value, norm_sq(&grad))?;
    trace.final_gap = value - f_star;
    trace.final_point = x;
    Ok(trace)
}

/// SGD with cosine step sizes and warm restarts.
///
/// Stage `i` runs `T_i = round(T0 r^i)` steps with local index `0..T_i`; the
/// last point of a stage starts the next. One random stream and one momentum
/// buffer span all stages.
pub fn sgd_restart_run(
    obj: &dyn Objective,
    oracle: &NoiseOracle,
    eta0: f64,
    restart: RestartParams,
    x1: Vec<f64>,
    seed: u64,
    momentum: f64,
) -> Result<RunTrace> {
    let schedule = ScheduleSpec::cosine_restart(eta0, restart)?;
    let cfg = RunConfig::new(x1, schedule).with_seed(seed).with_momentum(momentum);
    sgd_run(obj, oracle, &cfg)
}

/// Draws `t` with probability `eta_t / sum_i eta_i`; returns `(t, x_t)`.
pub fn sample_weighted_iterate(trace: &RunTrace, rng: &mut Stream) -> Result<(usize, Vec<f64>)> {
    if trace.record != IterateRecording::All || trace.iterates.len() != trace.len() {
        return Err(Error::Capability(
            "weighted iterate sampling needs every iterate recorded (record = all)".into(),
        ));
    }
    let index = weighted_index(&trace.eta, rng)?;
    let (t, x) = &trace.iterates[index];
    Ok((*t, x.clone()))
}

/// Zero-based index drawn proportionally to non-negative weights.
pub fn weighted_index(weights: &[f64], rng: &mut Stream) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("weights sum to zero".into()));
    }
    let target = rng.next_f64() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_positive)
}

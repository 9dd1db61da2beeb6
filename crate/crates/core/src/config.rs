//! Flat `section.key = value` configuration.
//!
//! Values use TOML syntax (quoted strings, `[..]` lists, `#` comments).
//! Every key must be one of [`KNOWN_KEYS`]; errors carry the 1-based line
//! and column of the offending key.
//!
//! ```text
//! problem.kind = "quadratic"
//! problem.lambdas = [1.0, 4.0]
//! noise.kind = "gaussian"
//! noise.sigma = 0.1
//! schedule.kind = "cosine"
//! run.T = 1000
//! run.n_seeds = 30
//! ```

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{Milestones, ScheduleTemplate, StartPoint};
use crate::numeric::sci17;
use crate::optimizer::IterateRecording;
use crate::problems::{NoiseOracle, Objective, PolarPl, Quadratic};
use crate::schedules::{ScheduleKind, ScheduleSpec};

pub const KNOWN_KEYS: &[&str] = &[
    "problem.kind",
    "problem.lambdas",
    "problem.L",
    "problem.x1",
    "problem.gap",
    "noise.kind",
    "noise.sigma",
    "noise.a",
    "schedule.kind",
    "schedule.eta0",
    "schedule.T",
    "schedule.beta",
    "schedule.alpha",
    "schedule.milestones",
    "schedule.factor",
    "schedule.mu",
    "schedule.T0",
    "schedule.r",
    "schedule.l",
    "run.T",
    "run.n_seeds",
    "run.base_seed",
    "run.momentum",
    "run.record_iterates",
    "run.random_start",
    "output.path",
    "output.curve_every",
    "study.levels",
    "study.schedules",
    "study.Ts",
    "study.gaps",
    "study.max_slope",
    "study.min_r2",
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: toml::Value,
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Position of every `key =` line, with `[section]` headers applied.
fn key_positions(text: &str) -> BTreeMap<String, (usize, usize)> {
    let mut positions = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        let column = raw.len() - trimmed.len() + 1;
        if trimmed.starts_with('#') {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('[') {
            section = header.split(']').next().unwrap_or("").trim().to_string();
            continue;
        }
        if let Some((key, _)) = trimmed.split_once('=') {
            let key: String = key
                .trim()
                .split('.')
                .map(|p| p.trim().trim_matches('"'))
                .collect::<Vec<_>>()
                .join(".");
            let full = if section.is_empty() {
                key
            } else {
                format!("{section}.{key}")
            };
            positions.entry(full).or_insert((i + 1, column));
        }
    }
    positions
}

fn flatten(prefix: &str, table: toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (key, value) in table {
        let full = if prefix.is_empty() {
            key
        } else {
            format!("{prefix}.{key}")
        };
        match value {
            toml::Value::Table(inner) => flatten(&full, inner, out),
            other => out.push((full, other)),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            Error::Config {
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })?;
        let positions = key_positions(text);
        let mut flat = Vec::new();
        flatten("", table, &mut flat);
        let mut entries = BTreeMap::new();
        for (key, value) in flat {
            let (line, column) = positions.get(&key).copied().unwrap_or((1, 1));
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config {
                    line,
                    column,
                    message: format!("unknown key `{key}`"),
                });
            }
            entries.insert(key, Entry { value, line, column });
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Error positioned at `key`, or at the top of the file when absent.
    pub fn error(&self, key: &str, message: impl std::fmt::Display) -> Error {
        let (line, column) = self.entries.get(key).map_or((1, 1), |e| (e.line, e.column));
        Error::Config {
            line,
            column,
            message: format!("{key}: {message}"),
        }
    }

    fn value(&self, key: &str) -> Option<&toml::Value> {
        self.entries.get(key).map(|e| &e.value)
    }

    fn number(&self, key: &str, v: &toml::Value) -> Result<f64> {
        match v {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            other => Err(self.error(key, format!("expected a number, got {}", other.type_str()))),
        }
    }

    fn integer(&self, key: &str, v: &toml::Value) -> Result<u64> {
        match v {
            toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            other => Err(self.error(key, format!("expected a non-negative integer, got {other}"))),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.value(key).map(|v| self.number(key, v)).transpose()
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.value(key).map(|v| self.integer(key, v)).transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.value(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.error(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<&Vec<toml::Value>>> {
        match self.value(key) {
            None => Ok(None),
            Some(toml::Value::Array(items)) => Ok(Some(items)),
            Some(other) => Err(self.error(key, format!("expected a list, got {}", other.type_str()))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.list(key)?
            .map(|items| items.iter().map(|v| self.number(key, v)).collect())
            .transpose()
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.list(key)?
            .map(|items| items.iter().map(|v| self.integer(key, v).map(|i| i as usize)).collect())
            .transpose()
    }

    pub fn str_list(&self, key: &str) -> Result<Option<Vec<String>>> {
        self.list(key)?
            .map(|items| {
                items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => Ok(s.clone()),
                        other => Err(self.error(key, format!("expected strings, got {other}"))),
                    })
                    .collect()
            })
            .transpose()
    }

    /// Parameter-validation failures from the library, positioned at `key`.
    fn at<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.error(key, e))
    }

    pub fn objective(&self) -> Result<Box<dyn Objective>> {
        let kind = self.str("problem.kind")?.unwrap_or("quadratic");
        match kind {
            "quadratic" => {
                let lambdas = self
                    .f64_list("problem.lambdas")?
                    .ok_or_else(|| self.error("problem.lambdas", "required for the quadratic problem"))?;
                if self.contains("problem.L") {
                    return Err(self.error("problem.L", "only the polar_pl problem takes a smoothness override"));
                }
                Ok(Box::new(self.at("problem.lambdas", Quadratic::new(lambdas))?))
            }
            "polar_pl" | "polar" => {
                if self.contains("problem.lambdas") {
                    return Err(self.error("problem.lambdas", "not used by the polar_pl problem"));
                }
                let polar = match self.f64("problem.L")? {
                    Some(l) => self.at("problem.L", PolarPl::with_smoothness(l))?,
                    None => PolarPl::default(),
                };
                Ok(Box::new(polar))
            }
            other => Err(self.error(
                "problem.kind",
                format!("unknown problem `{other}` (quadratic, polar_pl)"),
            )),
        }
    }

    pub fn oracle(&self) -> Result<NoiseOracle> {
        let kind = self.str("noise.kind")?.unwrap_or("exact");
        let need = |key: &str| -> Result<f64> {
            self.f64(key)?
                .ok_or_else(|| self.error(key, format!("required for noise.kind = \"{kind}\"")))
        };
        let oracle = match kind {
            "exact" => Ok(NoiseOracle::exact()),
            "gaussian" => NoiseOracle::additive_gaussian(need("noise.sigma")?),
            "relative" => NoiseOracle::relative(need("noise.a")?),
            "mixed" => NoiseOracle::mixed(need("noise.a")?, need("noise.sigma")?),
            other => {
                return Err(self.error(
                    "noise.kind",
                    format!("unknown noise `{other}` (exact, gaussian, relative, mixed)"),
                ))
            }
        };
        self.at("noise.kind", oracle)
    }

    /// `problem.x1`, else all-ones scaled to `problem.gap` (quadratic) or
    /// `(r, theta) = (0.9, pi/4)` (polar); `run.random_start` adds a
    /// per-seed uniform perturbation of that half-width.
    pub fn start_point(&self, obj: &dyn Objective) -> Result<StartPoint> {
        let center = match self.f64_list("problem.x1")? {
            Some(x) if x.len() != obj.dim() => {
                return Err(self.error(
                    "problem.x1",
                    format!("expected {} coordinates, got {}", obj.dim(), x.len()),
                ))
            }
            Some(x) => x,
            None => match obj.name() {
                "quadratic" => {
                    let gap = self.f64("problem.gap")?.unwrap_or(1.0);
                    if !(gap >= 0.0) {
                        return Err(self.error("problem.gap", "must be non-negative"));
                    }
                    let lambdas = self.f64_list("problem.lambdas")?.unwrap_or_default();
                    Quadratic::new(lambdas)
                        .map(|q| q.point_with_gap(gap))
                        .map_err(|e| self.error("problem.lambdas", e))?
                }
                _ => PolarPl::from_polar(0.9, FRAC_PI_4).to_vec(),
            },
        };
        match self.f64("run.random_start")? {
            None => Ok(StartPoint::Fixed(center)),
            Some(w) if w >= 0.0 => Ok(StartPoint::Uniform { center, half_width: w }),
            Some(_) => Err(self.error("run.random_start", "half-width must be non-negative")),
        }
    }

    /// `schedule.eta0`, defaulting to `1 / (L (1 + a))`.
    pub fn eta0(&self, obj: &dyn Objective, oracle: &NoiseOracle) -> Result<f64> {
        Ok(self
            .f64("schedule.eta0")?
            .unwrap_or(1.0 / (obj.smoothness() * (1.0 + oracle.a()))))
    }

    /// Template of family `kind` with parameters from `schedule.*`.
    pub fn template(&self, kind: &str, obj: &dyn Objective) -> Result<ScheduleTemplate> {
        let alpha = || -> Result<f64> { Ok(self.f64("schedule.alpha")?.unwrap_or(1.0)) };
        Ok(match kind {
            "exponential" => ScheduleTemplate::Exponential {
                beta: self.f64("schedule.beta")?.unwrap_or(1.0),
            },
            "cosine" => ScheduleTemplate::Cosine,
            "cosine_restart" => ScheduleTemplate::CosineRestart {
                t0: self.usize("schedule.T0")?.unwrap_or(10),
                r: self.f64("schedule.r")?.unwrap_or(1.0),
                l: self.usize("schedule.l")?.unwrap_or(0),
            },
            "inverse_sqrt" => ScheduleTemplate::InverseSqrt { alpha: alpha()? },
            "inverse_linear" => ScheduleTemplate::InverseLinear { alpha: alpha()? },
            "stagewise" => {
                let milestones = match self.value("schedule.milestones") {
                    None => Milestones::Fractions(vec![0.5, 0.75]),
                    Some(toml::Value::Array(items)) if items.iter().all(|v| v.is_integer()) => {
                        Milestones::Steps(self.usize_list("schedule.milestones")?.unwrap_or_default())
                    }
                    Some(_) => Milestones::Fractions(self.f64_list("schedule.milestones")?.unwrap_or_default()),
                };
                ScheduleTemplate::Stagewise {
                    milestones,
                    factor: self.f64("schedule.factor")?.unwrap_or(0.1),
                }
            }
            "constant" => ScheduleTemplate::Constant,
            "poly_pl" => {
                let mu = match self.f64("schedule.mu")? {
                    Some(mu) => mu,
                    None => obj
                        .pl_constant()
                        .ok_or_else(|| self.error("schedule.mu", "required: the objective has no PL constant"))?,
                };
                ScheduleTemplate::PolyPl { mu }
            }
            other => {
                return Err(self.error(
                    "schedule.kind",
                    format!(
                        "unknown schedule `{other}` (exponential, cosine, cosine_restart, inverse_sqrt, \
                         inverse_linear, stagewise, constant, poly_pl)"
                    ),
                ))
            }
        })
    }

    /// `run.T`, or `schedule.T`; both present must agree.
    pub fn horizon(&self) -> Result<Option<usize>> {
        match (self.usize("run.T")?, self.usize("schedule.T")?) {
            (Some(a), Some(b)) if a != b => Err(self.error("schedule.T", format!("disagrees with run.T = {a}"))),
            (a, b) => Ok(a.or(b)),
        }
    }

    /// The schedule described by `schedule.*`, for the horizon in `run.T`.
    pub fn schedule(&self, obj: &dyn Objective, oracle: &NoiseOracle) -> Result<ScheduleSpec> {
        let kind = self.str("schedule.kind")?.unwrap_or("cosine");
        let eta0 = self.eta0(obj, oracle)?;
        let template = self.template(kind, obj)?;
        let horizon = match (&template, self.horizon()?) {
            (ScheduleTemplate::CosineRestart { .. }, t) => t.unwrap_or(0),
            (_, Some(t)) => t,
            (_, None) => return Err(self.error("run.T", "required")),
        };
        if kind == "exponential" && !self.contains("schedule.beta") {
            if let Some(alpha) = self.f64("schedule.alpha")? {
                return self.at(
                    "schedule.alpha",
                    ScheduleSpec::exponential_with_alpha(eta0, alpha, horizon),
                );
            }
        }
        let spec = self.at("schedule.kind", template.instantiate(eta0, horizon))?;
        if let ScheduleTemplate::CosineRestart { .. } = template {
            if horizon != 0 && horizon != spec.horizon() {
                return Err(self.error(
                    "run.T",
                    format!("restart stages total {} steps, not {horizon}", spec.horizon()),
                ));
            }
        }
        if kind == "exponential" {
            if let (Some(alpha), Some(beta)) = (self.f64("schedule.alpha")?, self.f64("schedule.beta")?) {
                self.at(
                    "schedule.alpha",
                    ScheduleSpec::exponential_checked(eta0, beta, alpha, horizon),
                )?;
            }
        }
        Ok(spec)
    }

    pub fn record(&self) -> Result<IterateRecording> {
        match self.value("run.record_iterates") {
            None => Ok(IterateRecording::None),
            Some(toml::Value::String(s)) if s == "none" => Ok(IterateRecording::None),
            Some(toml::Value::String(s)) if s == "all" => Ok(IterateRecording::All),
            Some(toml::Value::Integer(k)) if *k >= 1 => Ok(IterateRecording::Thinned(*k as usize)),
            Some(other) => Err(self.error(
                "run.record_iterates",
                format!("expected \"none\", \"all\" or a positive integer, got {other}"),
            )),
        }
    }
}

/// Renders a schedule as `schedule.*` lines that [`Config::schedule`] reads back.
pub fn schedule_to_config(spec: &ScheduleSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "schedule.kind = \"{}\"", spec.kind().name());
    let _ = writeln!(s, "schedule.eta0 = {}", sci17(spec.eta0()));
    match spec.kind() {
        ScheduleKind::CosineRestart(p) => {
            let _ = writeln!(s, "schedule.T0 = {}", p.t0);
            let _ = writeln!(s, "schedule.r = {}", sci17(p.r));
            let _ = writeln!(s, "schedule.l = {}", p.l);
            return s;
        }
        _ => {
            let _ = writeln!(s, "schedule.T = {}", spec.horizon());
        }
    }
    match spec.kind() {
        ScheduleKind::Exponential { alpha, beta } => {
            if let Some(beta) = beta {
                let _ = writeln!(s, "schedule.beta = {}", sci17(*beta));
            }
            let _ = writeln!(s, "schedule.alpha = {}", sci17(*alpha));
        }
        ScheduleKind::InverseSqrt { alpha } | ScheduleKind::InverseLinear { alpha } => {
            let _ = writeln!(s, "schedule.alpha = {}", sci17(*alpha));
        }
        ScheduleKind::Stagewise { milestones, factor } => {
            let list: Vec<String> = milestones.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(s, "schedule.milestones = [{}]", list.join(", "));
            let _ = writeln!(s, "schedule.factor = {}", sci17(*factor));
        }
        ScheduleKind::PolyPl { mu } => {
            let _ = writeln!(s, "schedule.mu = {}", sci17(*mu));
        }
        ScheduleKind::Cosine | ScheduleKind::Constant | ScheduleKind::CosineRestart(_) => {}
    }
    s
}

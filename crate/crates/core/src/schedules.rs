//! Step-size schedules and their partial sums.
//!
//! Main schedules are indexed `t = 1..=T` by the optimizer; `t = 0` is
//! accepted and returns the unscaled start value for the decaying rules.
//! Cosine with restarts uses a global index `0..total` that maps onto
//! stage-local indices `0..T_i`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Decay factor `(beta / T)^(1 / T)` of the exponential schedule.
pub fn exponential_alpha(beta: f64, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be positive".into()));
    }
    let t = horizon as f64;
    if !(beta >= 1.0 && beta <= t) {
        return Err(Error::Parameter(format!(
            "beta must lie in [1, T] = [1, {horizon}], got {beta}"
        )));
    }
    Ok((beta / t).powf(1.0 / t))
}

/// Stage structure of cosine annealing with warm restarts.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartParams {
    /// Length of the first stage.
    pub t0: usize,
    /// Growth factor of successive stage lengths.
    pub r: f64,
    /// Index of the last stage; there are `l + 1` stages.
    pub l: usize,
}

impl RestartParams {
    pub fn new(t0: usize, r: f64, l: usize) -> Result<Self> {
        if t0 == 0 {
            return Err(Error::Parameter("T0 must be at least 1".into()));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::Parameter(format!("r must be >= 1, got {r}")));
        }
        let params = Self { t0, r, l };
        if params.stage_lengths().contains(&0) {
            return Err(Error::Parameter("stage length rounded to 0".into()));
        }
        Ok(params)
    }

    /// `T_i = round(T0 * r^i)` for `i = 0..=l`.
    pub fn stage_lengths(&self) -> Vec<usize> {
        (0..=self.l)
            .map(|i| (self.t0 as f64 * self.r.powi(i as i32)).round() as usize)
            .collect()
    }

    pub fn total(&self) -> usize {
        self.stage_lengths().iter().sum()
    }

    /// Maps a global index to `(stage, local index, stage length)`.
    pub fn locate(&self, t: usize) -> Option<(usize, usize, usize)> {
        let mut start = 0;
        for (stage, len) in self.stage_lengths().into_iter().enumerate() {
            if t < start + len {
                return Some((stage, t - start, len));
            }
            start += len;
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    /// `eta0 * alpha^t`; `beta` is kept when alpha was derived from it.
    Exponential {
        alpha: f64,
        beta: Option<f64>,
    },
    /// `(eta0 / 2)(1 + cos(t pi / T))`.
    Cosine,
    CosineRestart(RestartParams),
    /// `eta0 / (1 + alpha sqrt(t))`.
    InverseSqrt {
        alpha: f64,
    },
    /// `eta0 / (1 + alpha t)`.
    InverseLinear {
        alpha: f64,
    },
    /// `eta0 * factor^(number of milestones <= t)`.
    Stagewise {
        milestones: Vec<usize>,
        factor: f64,
    },
    Constant,
    /// `min(eta0, (2t + 1) / (mu (t + 1)^2))` with `eta0 = 1 / (L(1 + a))`.
    PolyPl {
        mu: f64,
    },
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Cosine => "cosine",
            Self::CosineRestart(_) => "cosine_restart",
            Self::InverseSqrt { .. } => "inverse_sqrt",
            Self::InverseLinear { .. } => "inverse_linear",
            Self::Stagewise { .. } => "stagewise",
            Self::Constant => "constant",
            Self::PolyPl { .. } => "poly_pl",
        }
    }
}

/// A validated step-size rule. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpec {
    eta0: f64,
    horizon: usize,
    kind: ScheduleKind,
}

fn check_eta0(eta0: f64) -> Result<()> {
    if eta0 > 0.0 && eta0.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("eta0 must be positive, got {eta0}")))
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::Parameter("horizon T must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl ScheduleSpec {
    /// Exponential schedule with `alpha = (beta / T)^(1 / T)`.
    pub fn exponential(eta0: f64, beta: f64, horizon: usize) -> Result<Self> {
        check_eta0(eta0)?;
        let alpha = exponential_alpha(beta, horizon)?;
        Ok(Self {
            eta0,
            horizon,
            kind: ScheduleKind::Exponential {
                alpha,
                beta: Some(beta),
            },
        })
    }

    /// Exponential schedule with a directly chosen decay factor.
    pub fn exponential_with_alpha(eta0: f64, alpha: f64, horizon: usize) -> Result<Self> {
        check_eta0(eta0)?;
        check_horizon(horizon)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(Self {
            eta0,
            horizon,
            kind: ScheduleKind::Exponential { alpha, beta: None },
        })
    }

    /// Accepts both parametrizations; they must agree to 1e-12.
    pub fn exponential_checked(eta0: f64, beta: f64, alpha: f64, horizon: usize) -> Result<Self> {
        let spec = Self::exponential(eta0, beta, horizon)?;
        let derived = spec.alpha().unwrap_or(f64::NAN);
        if (derived - alpha).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "alpha {alpha} inconsistent with beta {beta} and T {horizon} (expected {derived})"
            )));
        }
        Ok(spec)
    }

    pub fn cosine(eta0: f64, horizon: usize) -> Result<Self> {
        check_eta0(eta0)?;
        check_horizon(horizon)?;
        Ok(Self {
            eta0,
            horizon,
            kind: ScheduleKind::Cosine,
        })
    }

    pub fn cosine_restart(eta0: f64, restart: RestartParams) -> Result<Self> {
        check_eta0(eta0)?;
        let restart = RestartParams::new(restart.t0, restart.r, restart.l)?;
        Ok(Self {
            eta0,
            horizon: restart.total(),
            kind: ScheduleKind::CosineRestart(restart),
        })
    }

    pub fn inverse_sqrt(eta0: f64, alpha: f64, horizon: usize) -> Result<Self> {
        Self::inverse(eta0, alpha, horizon, false)
    }

    pub fn inverse_linear(eta0: f64, alpha: f64, horizon: usize) -> Result<Self> {
        Self::inverse(eta0, alpha, horizon, true)
    }

    fn inverse(eta0: f64, alpha: f64, horizon: usize, linear: bool) -> Result<Self> {
        check_eta0(eta0)?;
        check_horizon(horizon)?;
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be >= 0, got {alpha}")));
        }
        let kind = if linear {
            ScheduleKind::InverseLinear { alpha }
        } else {
            ScheduleKind::InverseSqrt { alpha }
        };
        Ok(Self { eta0, horizon, kind })
    }

    pub fn stagewise(eta0: f64, milestones: Vec<usize>, factor: f64, horizon: usize) -> Result<Self> {
        check_eta0(eta0)?;
        check_horizon(horizon)?;
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::Parameter(format!("factor must lie in (0, 1), got {factor}")));
        }
        if milestones.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("milestones must be strictly increasing".into()));
        }
        if milestones.last().is_some_and(|&m| m >= horizon) {
            return Err(Error::Parameter(format!("milestones must be < T = {horizon}")));
        }
        Ok(Self {
            eta0,
            horizon,
            kind: ScheduleKind::Stagewise { milestones, factor },
        })
    }

    pub fn constant(eta0: f64, horizon: usize) -> Result<Self> {
        check_eta0(eta0)?;
        check_horizon(horizon)?;
        Ok(Self {
            eta0,
            horizon,
            kind: ScheduleKind::Constant,
        })
    }

    /// Polynomial PL schedule with cap `1 / (L(1 + a))`.
    pub fn poly_pl(smoothness: f64, a: f64, mu: f64, horizon: usize) -> Result<Self> {
        if !(smoothness > 0.0) || !(a >= 0.0) {
            return Err(Error::Parameter(format!(
                "need L > 0 and a >= 0, got L = {smoothness}, a = {a}"
            )));
        }
        Self::poly_pl_with_cap(1.0 / (smoothness * (1.0 + a)), mu, horizon)
    }

    pub fn poly_pl_with_cap(eta0: f64, mu: f64, horizon: usize) -> Result<Self> {
        check_eta0(eta0)?;
        check_horizon(horizon)?;
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parameter(format!("mu must be positive, got {mu}")));
        }
        Ok(Self {
            eta0,
            horizon,
            kind: ScheduleKind::PolyPl { mu },
        })
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// Number of steps the schedule is defined for (total over stages for restarts).
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            ScheduleKind::Exponential { alpha, .. }
            | ScheduleKind::InverseSqrt { alpha }
            | ScheduleKind::InverseLinear { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// Whether `step_size` rejects indices beyond the horizon.
    pub fn is_horizon_bound(&self) -> bool {
        matches!(self.kind, ScheduleKind::Cosine | ScheduleKind::CosineRestart(_))
    }

    /// Largest accepted index.
    pub fn max_index(&self) -> usize {
        match self.kind {
            ScheduleKind::Cosine => self.horizon,
            ScheduleKind::CosineRestart(_) => self.horizon - 1,
            _ => usize::MAX,
        }
    }

    fn check_index(&self, t: usize) -> Result<()> {
        if t > self.max_index() {
            Err(Error::Index {
                index: t,
                max: self.max_index(),
            })
        } else {
            Ok(())
        }
    }

    pub fn step_size(&self, t: usize) -> Result<f64> {
        self.check_index(t)?;
        let eta0 = self.eta0;
        let tf = t as f64;
        Ok(match &self.kind {
            ScheduleKind::Exponential { alpha, beta } => match beta {
                // (beta/T)^(t/T) keeps eta_T == eta0 * beta / T exactly.
                Some(beta) => eta0 * (beta / self.horizon as f64).powf(tf / self.horizon as f64),
                None => eta0 * alpha.powf(tf),
            },
            ScheduleKind::Cosine => cosine_value(eta0, t, self.horizon),
            ScheduleKind::CosineRestart(restart) => {
                let (_, local, len) = restart.locate(t).ok_or(Error::Index {
                    index: t,
                    max: self.horizon - 1,
                })?;
                cosine_value(eta0, local, len)
            }
            ScheduleKind::InverseSqrt { alpha } => eta0 / (1.0 + alpha * tf.sqrt()),
            ScheduleKind::InverseLinear { alpha } => eta0 / (1.0 + alpha * tf),
            ScheduleKind::Stagewise { milestones, factor } => {
                let passed = milestones.partition_point(|&m| m <= t);
                eta0 * factor.powi(passed as i32)
            }
            ScheduleKind::Constant => eta0,
            ScheduleKind::PolyPl { mu } => {
                let decay = (2.0 * tf + 1.0) / (mu * (tf + 1.0) * (tf + 1.0));
                eta0.min(decay)
            }
        })
    }

    /// `sum_{t = from}^{to} eta_t`, in closed form where one exists.
    ///
    /// An empty range (`from > to`) sums to zero.
    pub fn schedule_sum(&self, from: usize, to: usize) -> Result<f64> {
        if from > to {
            return Ok(0.0);
        }
        self.check_index(to)?;
        match &self.kind {
            ScheduleKind::Exponential { alpha, beta } => {
                let ln_alpha = match beta {
                    Some(beta) => (beta / self.horizon as f64).ln() / self.horizon as f64,
                    None => alpha.ln(),
                };
                Ok(self.eta0 * geometric_sum(ln_alpha, from, to))
            }
            ScheduleKind::Cosine if from == 1 && to == self.horizon => {
                Ok(self.eta0 * (self.horizon as f64 - 1.0) / 2.0)
            }
            ScheduleKind::Constant => Ok(self.eta0 * (to - from + 1) as f64),
            _ => self.direct_sum(from, to),
        }
    }

    /// Term-by-term compensated summation of `step_size`.
    pub fn direct_sum(&self, from: usize, to: usize) -> Result<f64> {
        if from > to {
            return Ok(0.0);
        }
        self.check_index(to)?;
        let mut acc = NeumaierSum::default();
        for t in from..=to {
            acc.add(self.step_size(t)?);
        }
        Ok(acc.value())
    }
}

fn cosine_value(eta0: f64, t: usize, horizon: usize) -> f64 {
    let angle = t as f64 * PI / horizon as f64;
    0.5 * eta0 * (1.0 + angle.cos())
}

/// `sum_{t=from}^{to} alpha^t` from `ln(alpha)`, stable as alpha -> 1.
fn geometric_sum(ln_alpha: f64, from: usize, to: usize) -> f64 {
    let count = (to - from + 1) as f64;
    if ln_alpha == 0.0 {
        return count;
    }
    // alpha^from * (1 - alpha^count) / (1 - alpha)
    let head = (from as f64 * ln_alpha).exp();
    head * (-(count * ln_alpha).exp_m1()) / (-ln_alpha.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(exponential_alpha(10.0, 10).unwrap(), 1.0);
        assert!(close(
            exponential_alpha(2.0, 8).unwrap(),
            0.840_896_415_253_714_5,
            1e-15
        ));
        assert!(close(
            exponential_alpha(1.0, 100).unwrap(),
            0.954_992_586_021_435_9,
            1e-15
        ));
    }

    #[test]
    fn alpha_rejects_out_of_range_beta() {
        assert!(matches!(exponential_alpha(0.5, 10), Err(Error::Parameter(_))));
        assert!(matches!(exponential_alpha(11.0, 10), Err(Error::Parameter(_))));
        assert!(ScheduleSpec::exponential(1.0, 20.0, 10).is_err());
    }

    #[test]
    fn step_size_examples() {
        let cos = ScheduleSpec::cosine(1.0, 4).unwrap();
        assert_eq!(cos.step_size(2).unwrap(), 0.5);
        assert_eq!(cos.step_size(4).unwrap(), 0.0);
        assert_eq!(cos.step_size(0).unwrap(), 1.0);
        assert!(matches!(cos.step_size(5), Err(Error::Index { index: 5, max: 4 })));

        let exp = ScheduleSpec::exponential_with_alpha(0.1, 0.5, 10).unwrap();
        assert!(close(exp.step_size(3).unwrap(), 0.0125, 1e-15));
        assert_eq!(exp.step_size(0).unwrap(), 0.1);

        let poly = ScheduleSpec::poly_pl(1.0, 0.0, 1.0, 10).unwrap();
        assert_eq!(poly.step_size(1).unwrap(), 0.75);
        assert_eq!(poly.step_size(0).unwrap(), 1.0);
    }

    #[test]
    fn other_zoo_members() {
        let s = ScheduleSpec::inverse_sqrt(1.0, 0.5, 100).unwrap();
        assert!(close(s.step_size(16).unwrap(), 1.0 / 3.0, 1e-15));
        let s = ScheduleSpec::inverse_linear(2.0, 0.25, 100).unwrap();
        assert!(close(s.step_size(4).unwrap(), 1.0, 1e-15));
        let s = ScheduleSpec::constant(0.3, 5).unwrap();
        assert_eq!(s.step_size(1_000).unwrap(), 0.3);
    }

    #[test]
    fn stagewise_is_right_continuous() {
        let s = ScheduleSpec::stagewise(1.0, vec![3, 6], 0.1, 10).unwrap();
        let etas: Vec<f64> = (0..10).map(|t| s.step_size(t).unwrap()).collect();
        assert_eq!(etas[2], 1.0);
        assert!(close(etas[3], 0.1, 1e-15));
        assert!(close(etas[5], 0.1, 1e-15));
        assert!(close(etas[6], 0.01, 1e-15));
    }

    #[test]
    fn stagewise_validation() {
        assert!(ScheduleSpec::stagewise(1.0, vec![5, 3], 0.5, 10).is_err());
        assert!(ScheduleSpec::stagewise(1.0, vec![3, 3], 0.5, 10).is_err());
        assert!(ScheduleSpec::stagewise(1.0, vec![10], 0.5, 10).is_err());
        assert!(ScheduleSpec::stagewise(1.0, vec![2], 1.0, 10).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(ScheduleSpec::cosine(0.0, 10).is_err());
        assert!(ScheduleSpec::cosine(1.0, 0).is_err());
        assert!(ScheduleSpec::exponential_with_alpha(1.0, 1.5, 10).is_err());
        assert!(ScheduleSpec::poly_pl_with_cap(1.0, 0.0, 10).is_err());
        assert!(RestartParams::new(0, 2.0, 1).is_err());
        assert!(RestartParams::new(2, 0.5, 1).is_err());
    }

    #[test]
    fn exponential_consistency_check() {
        let alpha = exponential_alpha(2.0, 8).unwrap();
        assert!(ScheduleSpec::exponential_checked(1.0, 2.0, alpha, 8).is_ok());
        assert!(ScheduleSpec::exponential_checked(1.0, 2.0, alpha + 1e-9, 8).is_err());
    }

    #[test]
    fn exponential_hits_beta_over_t_at_horizon() {
        for (beta, t) in [(1.0, 100usize), (3.0, 7), (2.5, 1000), (10.0, 10)] {
            let s = ScheduleSpec::exponential(0.7, beta, t).unwrap();
            assert_eq!(s.step_size(t).unwrap(), 0.7 * (beta / t as f64));
        }
    }

    #[test]
    fn sum_examples() {
        let cos = ScheduleSpec::cosine(1.0, 3).unwrap();
        assert!(close(cos.schedule_sum(1, 3).unwrap(), 1.0, 1e-15));
        let exp = ScheduleSpec::exponential_with_alpha(1.0, 0.5, 10).unwrap();
        assert!(close(exp.schedule_sum(1, 3).unwrap(), 0.875, 1e-15));
        let c = ScheduleSpec::constant(0.1, 10).unwrap();
        assert!(close(c.schedule_sum(1, 10).unwrap(), 1.0, 1e-15));
        assert_eq!(c.schedule_sum(5, 4).unwrap(), 0.0);
        assert!(matches!(cos.schedule_sum(1, 4), Err(Error::Index { .. })));
    }

    #[test]
    fn closed_forms_match_direct_summation() {
        for t in [2usize, 3, 10, 999, 5000] {
            let cos = ScheduleSpec::cosine(0.3, t).unwrap();
            let a = cos.schedule_sum(1, t).unwrap();
            let b = cos.direct_sum(1, t).unwrap();
            assert!(close(a, b, 1e-12), "cosine T={t}: {a} vs {b}");
            for beta in [1.0, 2.0] {
                let exp = ScheduleSpec::exponential(0.3, beta, t.max(2)).unwrap();
                for (from, to) in [(1, t), (0, t / 2), (t / 3, t)] {
                    let a = exp.schedule_sum(from, to).unwrap();
                    let b = exp.direct_sum(from, to).unwrap();
                    assert!(close(a, b, 1e-12), "exp T={t} {from}..{to}: {a} vs {b}");
                }
            }
        }
        let alpha = ScheduleSpec::exponential_with_alpha(1.0, 0.999, 50).unwrap();
        assert!(close(
            alpha.schedule_sum(1, 300).unwrap(),
            alpha.direct_sum(1, 300).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn restart_stages() {
        let p = RestartParams::new(2, 2.0, 1).unwrap();
        assert_eq!(p.stage_lengths(), vec![2, 4]);
        assert_eq!(p.total(), 6);
        let s = ScheduleSpec::cosine_restart(1.0, p).unwrap();
        assert_eq!(s.horizon(), 6);
        assert_eq!(s.step_size(0).unwrap(), 1.0);
        assert_eq!(s.step_size(2).unwrap(), 1.0);
        assert!(s.step_size(6).is_err());
        // Fractional growth rounds each stage.
        let p = RestartParams::new(3, 1.5, 2).unwrap();
        assert_eq!(p.stage_lengths(), vec![3, 5, 7]);
    }

    #[test]
    fn restart_stage_matches_standalone_cosine() {
        let p = RestartParams::new(3, 2.0, 2).unwrap();
        let s = ScheduleSpec::cosine_restart(0.4, p.clone()).unwrap();
        let mut global = 0;
        for len in p.stage_lengths() {
            let stage = ScheduleSpec::cosine(0.4, len).unwrap();
            for local in 0..len {
                assert_eq!(s.step_size(global).unwrap(), stage.step_size(local).unwrap());
                global += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn bounded_by_eta0(eta0 in 1e-4f64..10.0, t in 1usize..2000, frac in 0.0f64..=1.0) {
            let idx = (frac * t as f64) as usize;
            let specs = [
                ScheduleSpec::cosine(eta0, t).unwrap(),
                ScheduleSpec::exponential(eta0, 1.0, t.max(1)).unwrap(),
                ScheduleSpec::inverse_sqrt(eta0, 0.3, t).unwrap(),
                ScheduleSpec::inverse_linear(eta0, 0.3, t).unwrap(),
                ScheduleSpec::poly_pl_with_cap(eta0, 0.5, t).unwrap(),
            ];
            for s in &specs {
                let eta = s.step_size(idx).unwrap();
                prop_assert!((0.0..=eta0).contains(&eta));
            }
        }

        #[test]
        fn cosine_non_increasing(t in 1usize..3000) {
            let s = ScheduleSpec::cosine(1.0, t).unwrap();
            let mut prev = s.step_size(0).unwrap();
            for i in 1..=t {
                let cur = s.step_size(i).unwrap();
                prop_assert!(cur <= prev);
                prev = cur;
            }
        }

        #[test]
        fn exponential_strictly_decreasing(beta in 1.0f64..5.0, t in 6usize..3000) {
            let s = ScheduleSpec::exponential(1.0, beta, t).unwrap();
            for i in 1..=t.min(200) {
                prop_assert!(s.step_size(i).unwrap() < s.step_size(i - 1).unwrap());
            }
        }

        #[test]
        fn alpha_monotone_in_beta(b1 in 1.0f64..50.0, db in 0.0f64..50.0, t in 100usize..1000) {
            let lo = exponential_alpha(b1, t).unwrap();
            let hi = exponential_alpha(b1 + db, t).unwrap();
            prop_assert!(lo <= hi && hi <= 1.0);
        }
    }
}

//! Closed-form convergence bounds for the exponential, cosine, polynomial and
//! restarted-cosine schedules, and numeric checks of the supporting lemmas.
//!
//! Every evaluator is a pure function of [`BoundInputs`]. Overflow is not an
//! error: an `exp` that overflows yields `+inf` in the affected term.

mod gamma;
mod lemmas;

pub use gamma::gamma;
pub use lemmas::{
    verify_lemma2, verify_lemma3, verify_lemma4, verify_lemma5, verify_lemma6, Lemma2Check, Lemma4Check, Lemma6Check,
};

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// Parameters shared by all bound evaluators; each theorem reads the subset it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    /// Smoothness constant `L`.
    pub smoothness: f64,
    /// PL constant.
    pub mu: f64,
    /// Relative noise coefficient.
    pub a: f64,
    /// Additive noise floor.
    pub b: f64,
    /// Horizon `T`.
    pub horizon: usize,
    pub beta: f64,
    /// Step-size shrink factor of the non-convex results (`eta0 = 1/(cL(1+a))`).
    pub c: f64,
    /// Initial gap `f(x_1) - f*`.
    pub delta1: f64,
    /// First stage length of the restart scheme.
    pub t0: usize,
    /// Stage growth factor of the restart scheme.
    pub r: f64,
    /// Index of the last restart stage.
    pub l: usize,
}

impl Default for BoundInputs {
    fn default() -> Self {
        Self {
            smoothness: 1.0,
            mu: 1.0,
            a: 0.0,
            b: 0.0,
            horizon: 100,
            beta: 1.0,
            c: 2.0,
            delta1: 1.0,
            t0: 10,
            r: 1.0,
            l: 0,
        }
    }
}

impl BoundInputs {
    fn check_common(&self) -> Result<()> {
        if !(self.smoothness > 0.0) {
            return Err(Error::Precondition(format!("L > 0 (got {})", self.smoothness)));
        }
        if !(self.a >= 0.0) || !(self.b >= 0.0) {
            return Err(Error::Precondition(format!(
                "a, b >= 0 (got a = {}, b = {})",
                self.a, self.b
            )));
        }
        if !(self.delta1 >= 0.0) {
            return Err(Error::Precondition(format!("delta1 >= 0 (got {})", self.delta1)));
        }
        Ok(())
    }

    fn check_mu(&self) -> Result<()> {
        if self.mu > 0.0 {
            Ok(())
        } else {
            Err(Error::Precondition(format!("mu > 0 (got {})", self.mu)))
        }
    }

    fn check_c(&self) -> Result<()> {
        if self.c > 1.0 {
            Ok(())
        } else {
            Err(Error::Precondition(format!("c > 1 (got {})", self.c)))
        }
    }

    fn check_beta(&self) -> Result<()> {
        if self.beta >= 1.0 {
            Ok(())
        } else {
            Err(Error::Precondition(format!("beta >= 1 (got {})", self.beta)))
        }
    }

    /// `L (1 + a)`.
    fn scaled_smoothness(&self) -> f64 {
        self.smoothness * (1.0 + self.a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTerm {
    pub name: &'static str,
    pub value: f64,
}

/// A bound and its additive decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub total: f64,
    pub terms: Vec<BoundTerm>,
}

impl BoundValue {
    fn from_terms(terms: Vec<BoundTerm>) -> Self {
        let total = terms.iter().map(|t| t.value).sum();
        Self { total, terms }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

fn term(name: &'static str, value: f64) -> BoundTerm {
    BoundTerm { name, value }
}

/// `factor * x` with `0 * inf = 0`: a vanishing multiplier kills the term.
fn times(factor: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        factor * x
    }
}

/// Denominator of the transient exponent in the exponential-schedule PL bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpDenominator {
    /// `L (1 + a)`, the scale matching `eta0 = 1/(L(1+a))`.
    #[default]
    Product,
    /// `L + a`.
    Sum,
}

/// `C(beta) = exp(2 mu beta / (L(1+a) ln(T/beta)))`.
pub fn exp_pl_constant(inputs: &BoundInputs) -> f64 {
    let log_ratio = (inputs.horizon as f64 / inputs.beta).ln();
    (2.0 * inputs.mu * inputs.beta / (inputs.scaled_smoothness() * log_ratio)).exp()
}

/// Exponential schedule under PL, with the derived exponent denominator.
pub fn bound_exp_pl(inputs: &BoundInputs) -> Result<BoundValue> {
    bound_exp_pl_with(inputs, ExpDenominator::Product)
}

pub fn bound_exp_pl_with(inputs: &BoundInputs, denominator: ExpDenominator) -> Result<BoundValue> {
    inputs.check_common()?;
    inputs.check_mu()?;
    inputs.check_beta()?;
    let t = inputs.horizon as f64;
    if t < inputs.beta.max(3.0) {
        return Err(Error::Precondition(format!(
            "T >= max(3, beta) (got T = {}, beta = {})",
            inputs.horizon, inputs.beta
        )));
    }
    let (l, mu, beta) = (inputs.smoothness, inputs.mu, inputs.beta);
    let l1a = inputs.scaled_smoothness();
    let log_ratio = (t / beta).ln();
    let c_beta = exp_pl_constant(inputs);

    let noise_factor = if log_ratio == 0.0 {
        f64::INFINITY
    } else {
        5.0 * l * c_beta / (E * E * mu * mu) * log_ratio * log_ratio / t
    };
    let exponent_den = match denominator {
        ExpDenominator::Product => l1a,
        ExpDenominator::Sum => l + inputs.a,
    };
    // C(beta) * exp(-0.69 mu T / (den ln(T/beta))) folded into one exponent,
    // so beta = T gives +inf rather than inf * 0.
    let transient_factor = ((2.0 * mu * beta / l1a - 0.69 * mu * t / exponent_den) / log_ratio).exp();
    Ok(BoundValue::from_terms(vec![
        term("noise", times(noise_factor, inputs.b)),
        term("transient", times(transient_factor, inputs.delta1)),
    ]))
}

/// Cosine schedule under PL.
pub fn bound_cos_pl(inputs: &BoundInputs) -> Result<BoundValue> {
    inputs.check_common()?;
    inputs.check_mu()?;
    if inputs.horizon < 2 {
        return Err(Error::Precondition(format!("T >= 2 (got {})", inputs.horizon)));
    }
    let t = inputs.horizon as f64;
    let mu = inputs.mu;
    let transient = (-mu * (t - 1.0) / (2.0 * inputs.scaled_smoothness())).exp();
    let noise = PI.powi(4) / (32.0 * (1.0 + inputs.a) * t.powi(4))
        * ((8.0 * t * t / mu).powf(4.0 / 3.0) + (6.0 * t * t / mu).powf(5.0 / 3.0));
    Ok(BoundValue::from_terms(vec![
        term("transient", times(transient, inputs.delta1)),
        term("noise", times(noise, inputs.b)),
    ]))
}

/// The cosine noise term before its first constant is rounded up:
/// `pi^4 b / (32 (1+a) T^4) * (2 e^{-4/3} (8T^2/mu)^{4/3} + (6T^2/mu)^{5/3})`.
///
/// Never exceeds the `noise` term of [`bound_cos_pl`], and is at least
/// `2 e^{-4/3}` times it.
pub fn cos_pl_noise_unrounded(inputs: &BoundInputs) -> Result<f64> {
    inputs.check_common()?;
    inputs.check_mu()?;
    if inputs.horizon < 2 {
        return Err(Error::Precondition(format!("T >= 2 (got {})", inputs.horizon)));
    }
    let t = inputs.horizon as f64;
    let mu = inputs.mu;
    let noise = PI.powi(4) / (32.0 * (1.0 + inputs.a) * t.powi(4))
        * (2.0 * (-4.0f64 / 3.0).exp() * (8.0 * t * t / mu).powf(4.0 / 3.0) + (6.0 * t * t / mu).powf(5.0 / 3.0));
    Ok(times(noise, inputs.b))
}

/// Exponential schedule without PL: bound on `E ||grad f(x~)||^2` at the
/// step-size-weighted random iterate.
pub fn bound_exp_noncvx(inputs: &BoundInputs) -> Result<BoundValue> {
    inputs.check_common()?;
    inputs.check_c()?;
    inputs.check_beta()?;
    let t = inputs.horizon as f64;
    if !(t > inputs.beta) {
        return Err(Error::Precondition(format!(
            "T > beta (got T = {}, beta = {})",
            inputs.horizon, inputs.beta
        )));
    }
    Ok(exp_noncvx_terms(inputs))
}

fn exp_noncvx_terms(inputs: &BoundInputs) -> BoundValue {
    let t = inputs.horizon as f64;
    let (l, c, a, beta) = (inputs.smoothness, inputs.c, inputs.a, inputs.beta);
    let transient = 3.0 * l * c * (a + 1.0) * (t / beta).ln() / (t - beta);
    let noise = t / (c * (a + 1.0) * (t - beta));
    BoundValue::from_terms(vec![
        term("transient", times(transient, inputs.delta1)),
        term("noise", times(noise, inputs.b)),
    ])
}

/// Cosine schedule without PL: bound on `E ||grad f(x~)||^2`.
pub fn bound_cos_noncvx(inputs: &BoundInputs) -> Result<BoundValue> {
    inputs.check_common()?;
    inputs.check_c()?;
    if inputs.horizon < 2 {
        return Err(Error::Precondition(format!("T >= 2 (got {})", inputs.horizon)));
    }
    Ok(cos_noncvx_terms(inputs))
}

pub(crate) fn cos_noncvx_terms(inputs: &BoundInputs) -> BoundValue {
    let t = inputs.horizon as f64;
    let (l, c, a) = (inputs.smoothness, inputs.c, inputs.a);
    let transient = 4.0 * l * c * (a + 1.0) / (t - 1.0);
    let noise = 21.0 * t / (4.0 * PI.powi(4) * c * l * (a + 1.0) * (t - 1.0));
    BoundValue::from_terms(vec![
        term("transient", times(transient, inputs.delta1)),
        term("noise", times(noise, inputs.b)),
    ])
}

/// Polynomial schedule `min(1/(L(1+a)), (2t+1)/(mu(t+1)^2))` under PL.
pub fn bound_poly_pl(inputs: &BoundInputs) -> Result<BoundValue> {
    inputs.check_common()?;
    inputs.check_mu()?;
    if inputs.horizon < 1 {
        return Err(Error::Precondition("T >= 1 (got 0)".into()));
    }
    let l1a = inputs.scaled_smoothness();
    if inputs.mu > l1a {
        return Err(Error::Precondition(format!(
            "mu <= L(1+a) (got mu = {}, L(1+a) = {l1a})",
            inputs.mu
        )));
    }
    let t = inputs.horizon as f64;
    let (l, mu, a) = (inputs.smoothness, inputs.mu, inputs.a);
    let noise_fast = l * l * (1.0 + a) / (2.0 * mu.powi(3) * t * t);
    let noise_slow = 2.0 * l / (mu * mu * t);
    let transient = l1a * l1a / (mu * mu * t * t) * (1.0 - mu / l1a).powf(l1a / mu);
    Ok(BoundValue::from_terms(vec![
        term("noise-fast", times(noise_fast, inputs.b)),
        term("noise-slow", times(noise_slow, inputs.b)),
        term("transient", times(transient, inputs.delta1)),
    ]))
}

/// `C_1 = 6^{5/3} pi^4 b / (32 (1 + a))`.
pub fn restart_c1(inputs: &BoundInputs) -> f64 {
    6f64.powf(5.0 / 3.0) * PI.powi(4) * inputs.b / (32.0 * (1.0 + inputs.a))
}

/// `C_2 = 1 / (2 L (1 + a))`.
pub fn restart_c2(inputs: &BoundInputs) -> f64 {
    1.0 / (2.0 * inputs.scaled_smoothness())
}

/// Cosine with warm restarts under PL.
///
/// For `r = 1` the geometric closed form is used; for `r > 1` the per-stage
/// recursion `D_i = C_1 (mu^{-4/3} T_i^{-4/3} + mu^{-5/3} T_i^{-2/3}) + exp(-C_2 mu (T_i - 1)) D_{i-1}`
/// is iterated over `T_i = round(T0 r^i)` from `D_{-1} = delta1`.
pub fn bound_restart_pl(inputs: &BoundInputs) -> Result<BoundValue> {
    inputs.check_common()?;
    inputs.check_mu()?;
    if inputs.t0 < 2 {
        return Err(Error::Precondition(format!("T0 >= 2 (got {})", inputs.t0)));
    }
    if !(inputs.r >= 1.0) {
        return Err(Error::Precondition(format!("r >= 1 (got {})", inputs.r)));
    }
    if inputs.r == 1.0 {
        Ok(restart_closed_form(inputs))
    } else {
        Ok(restart_recursion(inputs))
    }
}

fn stage_noise(inputs: &BoundInputs, stage_len: f64) -> f64 {
    let mu = inputs.mu;
    mu.powf(-4.0 / 3.0) * stage_len.powf(-4.0 / 3.0) + mu.powf(-5.0 / 3.0) * stage_len.powf(-2.0 / 3.0)
}

fn restart_closed_form(inputs: &BoundInputs) -> BoundValue {
    let (c1, c2, mu) = (restart_c1(inputs), restart_c2(inputs), inputs.mu);
    let t0 = inputs.t0 as f64;
    let l = inputs.l as f64;
    let total = (l + 1.0) * t0;
    let ratio = (-(-c2 * mu * (total - l - 1.0)).exp_m1()) / (-(-c2 * mu * (t0 - 1.0)).exp_m1());
    let noise = c1 * stage_noise(inputs, t0) * ratio;
    let transient = (-mu * c2 * (total - l - 1.0)).exp();
    BoundValue::from_terms(vec![
        term("noise", noise),
        term("transient", times(transient, inputs.delta1)),
    ])
}

/// Stage recursion; valid for any `r >= 1`.
pub(crate) fn restart_recursion(inputs: &BoundInputs) -> BoundValue {
    let (c1, c2, mu) = (restart_c1(inputs), restart_c2(inputs), inputs.mu);
    let mut noise = 0.0;
    let mut contraction_total = 0.0;
    for i in 0..=inputs.l {
        let len = (inputs.t0 as f64 * inputs.r.powi(i as i32)).round();
        let contraction = (-c2 * mu * (len - 1.0)).exp();
        noise = c1 * stage_noise(inputs, len) + contraction * noise;
        contraction_total += len - 1.0;
    }
    let transient = (-c2 * mu * contraction_total).exp();
    BoundValue::from_terms(vec![
        term("noise", noise),
        term("transient", times(transient, inputs.delta1)),
    ])
}

/// `sum_{t=1}^T eta_t >= eta0 (0.69 T - 2 beta) / ln(T/beta)` for the
/// exponential schedule.
pub fn exp_sum_lower_bound(eta0: f64, beta: f64, horizon: usize) -> f64 {
    let t = horizon as f64;
    eta0 * (0.69 * t - 2.0 * beta) / (t / beta).ln()
}

/// `sum_{t=1}^T eta_t^2 <= eta0^2 alpha^2 / (1 - alpha^2)` for the exponential schedule.
pub fn exp_sum_sq_upper_bound(eta0: f64, alpha: f64) -> f64 {
    eta0 * eta0 * alpha * alpha / (1.0 - alpha * alpha)
}

/// Exact `sum_{t=1}^T eta_t^2 = eta0^2 (3T - 4) / 8` for the cosine schedule, `T >= 2`.
pub fn cos_sum_sq(eta0: f64, horizon: usize) -> f64 {
    eta0 * eta0 * (3.0 * horizon as f64 - 4.0) / 8.0
}

/// The bound families exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    ExpPl,
    CosPl,
    ExpNonconvex,
    CosNonconvex,
    PolyPl,
    Restart,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::ExpPl,
        Theorem::CosPl,
        Theorem::ExpNonconvex,
        Theorem::CosNonconvex,
        Theorem::PolyPl,
        Theorem::Restart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::ExpPl => "exp-pl",
            Theorem::CosPl => "cos-pl",
            Theorem::ExpNonconvex => "exp-nc",
            Theorem::CosNonconvex => "cos-nc",
            Theorem::PolyPl => "poly-pl",
            Theorem::Restart => "restart",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn evaluate(self, inputs: &BoundInputs) -> Result<BoundValue> {
        match self {
            Theorem::ExpPl => bound_exp_pl(inputs),
            Theorem::CosPl => bound_cos_pl(inputs),
            Theorem::ExpNonconvex => bound_exp_noncvx(inputs),
            Theorem::CosNonconvex => bound_cos_noncvx(inputs),
            Theorem::PolyPl => bound_poly_pl(inputs),
            Theorem::Restart => bound_restart_pl(inputs),
        }
    }
}

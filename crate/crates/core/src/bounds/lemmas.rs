use std::f64::consts::PI;

use super::gamma::gamma;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::schedules::exponential_alpha;

/// `|sum_{t=1}^T cos(t pi / T) + 1|`.
pub fn verify_lemma3(horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::Parameter("T must be at least 1".into()));
    }
    let t = horizon as f64;
    let sum: NeumaierSum = (1..=horizon).map(|k| (k as f64 * PI / t).cos()).collect();
    Ok((sum.value() + 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma4Check {
    pub alpha: f64,
    /// `alpha^{T+1} / (1 - alpha)`.
    pub ratio: f64,
    /// `2 beta / ln(T / beta)`.
    pub ratio_bound: f64,
    pub alpha_ok: bool,
    pub ratio_ok: bool,
}

impl Lemma4Check {
    pub fn holds(&self) -> bool {
        self.alpha_ok && self.ratio_ok
    }
}

/// Checks `alpha >= 0.69` and `alpha^{T+1}/(1-alpha) <= 2 beta / ln(T/beta)`
/// at `alpha = (beta/T)^{1/T}`.
pub fn verify_lemma4(beta: f64, horizon: usize) -> Result<Lemma4Check> {
    if horizon < 3 {
        return Err(Error::Precondition(format!("T >= 3 (got {horizon})")));
    }
    let t = horizon as f64;
    if !(beta >= 1.0 && beta < t) {
        return Err(Error::Precondition(format!(
            "1 <= beta < T (got beta = {beta}, T = {horizon})"
        )));
    }
    let alpha = exponential_alpha(beta, horizon)?;
    // alpha^{T+1} = (beta/T) alpha, and 1 - alpha = -expm1(ln(beta/T)/T).
    let log_ratio = (beta / t).ln();
    let ratio = beta / t * alpha / -(log_ratio / t).exp_m1();
    let ratio_bound = 2.0 * beta / (t / beta).ln();
    Ok(Lemma4Check {
        alpha,
        ratio,
        ratio_bound,
        alpha_ok: alpha >= 0.69,
        ratio_ok: ratio <= ratio_bound,
    })
}

/// `1 - x <= ln(1/x)` up to `1e-12`.
pub fn verify_lemma5(x: f64) -> Result<bool> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    Ok(1.0 - x <= -x.ln() + 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma6Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `sum_{t=0}^T e^{-bt} t^a` with `2 e^{-a} (a/b)^a + Gamma(a+1) / b^{a+1}`.
pub fn verify_lemma6(a: f64, b: f64, horizon: usize) -> Result<Lemma6Check> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("b must be positive, got {b}")));
    }
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("a must be non-negative, got {a}")));
    }
    // powf gives 0^0 = 1, the convention the bound uses.
    let lhs: NeumaierSum = (0..=horizon)
        .map(|t| {
            let t = t as f64;
            (-b * t).exp() * t.powf(a)
        })
        .collect();
    let lhs = lhs.value();
    let rhs = 2.0 * (-a).exp() * (a / b).powf(a) + gamma(a + 1.0)? / b.powf(a + 1.0);
    Ok(Lemma6Check {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Check {
    pub direct: f64,
    pub unrolled: f64,
}

/// Iterates `X_{k+1} = A_k X_k + B_k` and compares with the unrolled sum
/// `prod A_i X_1 + sum_i prod_{j>i} A_j B_i`.
pub fn verify_lemma2(a: &[f64], b: &[f64], x1: f64) -> Result<Lemma2Check> {
    if a.len() != b.len() {
        return Err(Error::Parameter(format!(
            "A and B must have equal length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).chain([&x1]).any(|v| !(*v >= 0.0)) {
        return Err(Error::Domain("entries must be non-negative".into()));
    }
    let direct = a.iter().zip(b).fold(x1, |x, (ai, bi)| ai * x + bi);

    let mut unrolled = NeumaierSum::default();
    unrolled.add(a.iter().product::<f64>() * x1);
    for i in 0..a.len() {
        let tail: f64 = a[i + 1..].iter().product();
        unrolled.add(tail * b[i]);
    }
    Ok(Lemma2Check {
        direct,
        unrolled: unrolled.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lemma3_examples() {
        for t in [1, 3, 4] {
            assert!(verify_lemma3(t).unwrap() < 1e-15);
        }
        assert!(verify_lemma3(0).is_err());
    }

    #[test]
    fn lemma3_log_spaced_grid() {
        for k in 0..200 {
            let t = 10f64.powf(6.0 * k as f64 / 199.0).round() as usize;
            assert!(verify_lemma3(t).unwrap() <= 1e-10, "T = {t}");
        }
    }

    #[test]
    fn lemma4_examples() {
        let c = verify_lemma4(1.0, 3).unwrap();
        assert!((c.alpha - 0.693_361_274_350_634_7).abs() < 1e-12);
        assert!((c.ratio - 0.753_7).abs() < 1e-4, "{}", c.ratio);
        assert!((c.ratio_bound - 2.0 / 3f64.ln()).abs() < 1e-15);
        assert!(c.holds());
        assert!(verify_lemma4(1.0, 1000).unwrap().holds());
        assert!(matches!(verify_lemma4(5.0, 5), Err(Error::Precondition(_))));
        assert!(verify_lemma4(1.0, 2).is_err());
        assert!(verify_lemma4(0.5, 10).is_err());
    }

    #[test]
    fn lemma4_full_grid() {
        for t in 3..=1000usize {
            for beta in 1..t {
                assert!(verify_lemma4(beta as f64, t).unwrap().holds(), "beta = {beta}, T = {t}");
            }
        }
    }

    #[test]
    fn lemma5_examples() {
        assert!(verify_lemma5(1.0).unwrap());
        assert!(verify_lemma5(0.5).unwrap());
        assert!(verify_lemma5(2.0).unwrap());
        assert!(matches!(verify_lemma5(0.0), Err(Error::Domain(_))));
        for k in 0..=1200 {
            let x = 10f64.powf(-6.0 + k as f64 / 100.0);
            assert!(verify_lemma5(x).unwrap());
        }
    }

    #[test]
    fn lemma6_examples() {
        let c = verify_lemma6(2.0, 1.0, 10).unwrap();
        assert!((c.lhs - 1.988_726_176_590_742_6).abs() < 1e-13, "{}", c.lhs);
        assert!((c.rhs - (8.0 * (-2.0f64).exp() + 2.0)).abs() < 1e-12);
        assert!(c.holds);
        let c = verify_lemma6(0.0, 1.0, 1000).unwrap();
        assert!((c.lhs - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((c.rhs - 3.0).abs() < 1e-12);
        assert!(verify_lemma6(1.0, 0.0, 10).is_err());
    }

    #[test]
    fn lemma6_grid() {
        for a in [0.0, 0.5, 1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0, 4.0] {
            for b in [0.01, 0.1, 0.5, 1.0] {
                for t in [10, 100, 10_000] {
                    assert!(verify_lemma6(a, b, t).unwrap().holds, "a={a} b={b} T={t}");
                }
            }
        }
    }

    #[test]
    fn lemma2_examples() {
        let c = verify_lemma2(&[1.0, 1.0], &[0.0, 0.0], 3.0).unwrap();
        assert_eq!((c.direct, c.unrolled), (3.0, 3.0));
        let c = verify_lemma2(&[0.5, 0.5], &[1.0, 1.0], 0.0).unwrap();
        assert_eq!((c.direct, c.unrolled), (1.5, 1.5));
        assert!(matches!(verify_lemma2(&[-1.0], &[0.0], 1.0), Err(Error::Domain(_))));
        assert!(verify_lemma2(&[1.0], &[], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn lemma2_unrolling_is_exact(
            pairs in prop::collection::vec((0.0f64..1.5, 0.0f64..3.0), 50),
            x1 in 0.0f64..10.0,
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let c = verify_lemma2(&a, &b, x1).unwrap();
            prop_assert!((c.direct - c.unrolled).abs() <= 1e-12 * c.direct.abs().max(1e-300));
        }
    }
}

//! Test objectives with known optimum, smoothness and PL constants, plus the
//! stochastic gradient oracles that drive the optimizer.

mod noise;

pub use noise::{NoiseKind, NoiseOracle};

use crate::error::{Error, Result};
use crate::numeric::norm_sq;

/// A differentiable objective with known infimum and smoothness.
pub trait Objective: Send + Sync {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `grad f(x)` into `out` (length `dim`).
    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    fn f_star(&self) -> f64;

    /// Lipschitz constant `L` of the gradient.
    fn smoothness(&self) -> f64;

    /// PL constant `mu`, when the objective satisfies the PL inequality.
    fn pl_constant(&self) -> Option<f64>;

    /// Whether `x` lies where the PL certificate applies.
    fn in_pl_region(&self, _x: &[f64]) -> bool {
        true
    }
}

/// `f(x) = 1/2 sum_i lambda_i x_i^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    lambdas: Vec<f64>,
}

impl Quadratic {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Parameter("quadratic needs at least one lambda".into()));
        }
        if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::Parameter(format!("lambdas must be positive, got {bad}")));
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// The all-ones direction scaled so that `f(x) - f* = gap`.
    pub fn point_with_gap(&self, gap: f64) -> Vec<f64> {
        let scale = (2.0 * gap / self.lambdas.iter().sum::<f64>()).sqrt();
        vec![scale; self.lambdas.len()]
    }
}

/// Builds the canonical quadratic test problem.
pub fn quadratic_objective(lambdas: Vec<f64>) -> Result<Quadratic> {
    Quadratic::new(lambdas)
}

impl Objective for Quadratic {
    fn name(&self) -> &'static str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.lambdas.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.lambdas.iter().zip(x).map(|(l, xi)| l * xi * xi).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, l), xi) in out.iter_mut().zip(&self.lambdas).zip(x) {
            *o = l * xi;
        }
    }

    fn f_star(&self) -> f64 {
        0.0
    }

    fn smoothness(&self) -> f64 {
        self.lambdas.iter().copied().fold(f64::MIN, f64::max)
    }

    fn pl_constant(&self) -> Option<f64> {
        Some(self.lambdas.iter().copied().fold(f64::MAX, f64::min))
    }
}

/// Default smoothness constant of [`PolarPl`]: the supremum of the Hessian
/// spectral norm over `r <= 1`, attained in the limit `r -> 0` (about 30.605).
pub const POLAR_DEFAULT_SMOOTHNESS: f64 = 30.61;

/// PL constant of [`PolarPl`] on the disc `r <= 1`.
pub const POLAR_PL_CONSTANT: f64 = 1.0 / 24.0;

/// Two-dimensional non-convex function written in polar coordinates,
/// `g(r, theta) = (2 + cos(theta)/2 + cos(4 theta)) r^2 (5/3 - r)`.
///
/// PL with `mu = 1/24` on `r <= 1`; unbounded below for `r > 5/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPl {
    smoothness: f64,
}

impl Default for PolarPl {
    fn default() -> Self {
        Self {
            smoothness: POLAR_DEFAULT_SMOOTHNESS,
        }
    }
}

impl PolarPl {
    pub fn new() -> Self {
        Self::default()
    }

    /// Overrides the smoothness constant used to size step sizes.
    pub fn with_smoothness(smoothness: f64) -> Result<Self> {
        if !(smoothness > 0.0 && smoothness.is_finite()) {
            return Err(Error::Parameter(format!("L must be positive, got {smoothness}")));
        }
        Ok(Self { smoothness })
    }

    pub fn from_polar(r: f64, theta: f64) -> [f64; 2] {
        [r * theta.cos(), r * theta.sin()]
    }

    fn angular(theta: f64) -> f64 {
        2.0 + 0.5 * theta.cos() + (4.0 * theta).cos()
    }
}

/// Builds the polar PL test function with the default smoothness estimate.
pub fn polar_pl_objective() -> PolarPl {
    PolarPl::new()
}

impl Objective for PolarPl {
    fn name(&self) -> &'static str {
        "polar_pl"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return 0.0;
        }
        let theta = x[1].atan2(x[0]);
        Self::angular(theta) * r * r * (5.0 / 3.0 - r)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let r = x[0].hypot(x[1]);
        if r < 1e-12 {
            out[0] = 0.0;
            out[1] = 0.0;
            return;
        }
        let theta = x[1].atan2(x[0]);
        let (sin, cos) = theta.sin_cos();
        let d_r = (10.0 * r / 3.0 - 3.0 * r * r) * Self::angular(theta);
        // d_theta / r with the removable 1/r cancelled.
        let d_theta_over_r = (-0.5 * sin - 4.0 * (4.0 * theta).sin()) * r * (5.0 / 3.0 - r);
        out[0] = cos * d_r - sin * d_theta_over_r;
        out[1] = sin * d_r + cos * d_theta_over_r;
    }

    fn f_star(&self) -> f64 {
        0.0
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn pl_constant(&self) -> Option<f64> {
        Some(POLAR_PL_CONSTANT)
    }

    fn in_pl_region(&self, x: &[f64]) -> bool {
        x[0].hypot(x[1]) <= 1.0
    }
}

/// `||grad f(x)||^2 / (2 (f(x) - f*))`.
pub fn pl_ratio(obj: &dyn Objective, x: &[f64]) -> Result<f64> {
    check_dim(obj, x)?;
    let gap = obj.value(x) - obj.f_star();
    if gap < 1e-15 {
        return Err(Error::Degenerate(format!(
            "PL ratio undefined where f(x) - f* = {gap:e} < 1e-15"
        )));
    }
    Ok(norm_sq(&obj.gradient(x)) / (2.0 * gap))
}

pub(crate) fn check_dim(obj: &dyn Objective, x: &[f64]) -> Result<()> {
    if x.len() != obj.dim() {
        return Err(Error::Parameter(format!(
            "point has dimension {}, objective expects {}",
            x.len(),
            obj.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use std::f64::consts::PI;

    fn central_difference(obj: &dyn Objective, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut hi = x.to_vec();
                let mut lo = x.to_vec();
                hi[i] += h;
                lo[i] -= h;
                (obj.value(&hi) - obj.value(&lo)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn quadratic_examples() {
        let q = quadratic_objective(vec![1.0, 4.0]).unwrap();
        assert_eq!(q.value(&[1.0, 1.0]), 2.5);
        assert_eq!(q.gradient(&[1.0, 1.0]), vec![1.0, 4.0]);
        assert_eq!(q.smoothness(), 4.0);
        assert_eq!(q.pl_constant(), Some(1.0));
        let q = quadratic_objective(vec![2.0]).unwrap();
        assert_eq!(pl_ratio(&q, &[3.0]).unwrap(), 2.0);
    }

    #[test]
    fn quadratic_rejects_nonpositive() {
        assert!(quadratic_objective(vec![1.0, 0.0]).is_err());
        assert!(quadratic_objective(vec![-1.0]).is_err());
        assert!(quadratic_objective(vec![]).is_err());
    }

    #[test]
    fn point_with_gap_scales() {
        let q = quadratic_objective(vec![0.5, 1.0, 2.0]).unwrap();
        let x = q.point_with_gap(1.0);
        assert!((q.value(&x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polar_examples() {
        let p = polar_pl_objective();
        assert!((p.value(&[1.0, 0.0]) - 7.0 / 3.0).abs() < 1e-15);
        let g = p.gradient(&[1.0, 0.0]);
        assert!((g[0] - 7.0 / 6.0).abs() < 1e-14);
        assert!(g[1].abs() < 1e-14);
        assert_eq!(p.value(&[0.0, 0.0]), 0.0);
        assert_eq!(p.gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert!((pl_ratio(&p, &[1.0, 0.0]).unwrap() - 3.5 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn pl_ratio_degenerate_and_dimension() {
        let p = polar_pl_objective();
        assert!(matches!(pl_ratio(&p, &[0.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(matches!(pl_ratio(&p, &[0.0]), Err(Error::Parameter(_))));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = Stream::from_seed(5);
        let quad = quadratic_objective(vec![0.3, 1.0, 2.5, 7.0]).unwrap();
        let polar = polar_pl_objective();
        let objectives: [&dyn Objective; 2] = [&quad, &polar];
        for obj in objectives {
            for _ in 0..100 {
                let x: Vec<f64> = if obj.dim() == 2 {
                    let r = 0.05 + 1.45 * rng.next_f64();
                    PolarPl::from_polar(r, 2.0 * PI * rng.next_f64()).to_vec()
                } else {
                    (0..obj.dim()).map(|_| 4.0 * rng.next_f64() - 2.0).collect()
                };
                let g = obj.gradient(&x);
                let fd = central_difference(obj, &x, 1e-5);
                let err = norm_sq(&g.iter().zip(&fd).map(|(a, b)| a - b).collect::<Vec<_>>()).sqrt();
                assert!(err <= 1e-6 * norm_sq(&g).sqrt(), "{} at {x:?}: {err}", obj.name());
            }
        }
    }

    #[test]
    fn polar_pl_certificate_on_grid() {
        let p = polar_pl_objective();
        let mut worst = f64::INFINITY;
        for i in 1..=100 {
            let r = 0.01 + 0.99 * i as f64 / 100.0;
            for j in 0..100 {
                let x = PolarPl::from_polar(r, 2.0 * PI * j as f64 / 100.0);
                worst = worst.min(pl_ratio(&p, &x).unwrap());
            }
        }
        assert!(worst >= 1.0 / 24.0 - 1e-9, "min ratio {worst}");
    }

    // Oracle for the default smoothness: largest spectral norm of the
    // finite-difference Hessian on a polar grid over the unit disc.
    #[test]
    fn polar_smoothness_default_covers_hessian_norm() {
        let p = polar_pl_objective();
        let h = 1e-7;
        let mut max_norm: f64 = 0.0;
        for i in 0..60 {
            let r = 1e-3 * (1000f64).powf(i as f64 / 59.0);
            for j in 0..720 {
                let x = PolarPl::from_polar(r, 2.0 * PI * j as f64 / 720.0);
                let col = |k: usize| {
                    let mut hi = x;
                    let mut lo = x;
                    hi[k] += h;
                    lo[k] -= h;
                    let (gh, gl) = (p.gradient(&hi), p.gradient(&lo));
                    [(gh[0] - gl[0]) / (2.0 * h), (gh[1] - gl[1]) / (2.0 * h)]
                };
                let (c0, c1) = (col(0), col(1));
                let (a, b, d) = (c0[0], 0.5 * (c0[1] + c1[0]), c1[1]);
                let spectral = 0.5 * (a + d).abs() + (0.25 * (a - d) * (a - d) + b * b).sqrt();
                max_norm = max_norm.max(spectral);
            }
        }
        assert!(max_norm <= POLAR_DEFAULT_SMOOTHNESS, "{max_norm}");
        assert!(max_norm >= 0.99 * POLAR_DEFAULT_SMOOTHNESS, "{max_norm}");
    }
}

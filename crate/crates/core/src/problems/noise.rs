use crate::error::{Error, Result};
use crate::numeric::norm_sq;
use crate::problems::{check_dim, Objective};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// Returns the exact gradient.
    Exact,
    /// Adds i.i.d. `N(0, sigma^2)` to every coordinate.
    AdditiveGaussian { sigma: f64 },
    /// Adds isotropic Gaussian noise with total variance `a ||grad f||^2`.
    Relative { a: f64 },
    /// Sum of independent additive and relative terms.
    Mixed { a: f64, sigma: f64 },
}

/// Stochastic gradient generator with
/// `E[g | x] = grad f(x)` and `E[||g - grad f(x)||^2 | x] = a ||grad f(x)||^2 + b`.
///
/// Draw order per call: `d` additive normals, then `d` relative normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseOracle {
    kind: NoiseKind,
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be a finite non-negative number, got {v}"
        )))
    }
}

impl NoiseOracle {
    pub fn exact() -> Self {
        Self { kind: NoiseKind::Exact }
    }

    pub fn additive_gaussian(sigma: f64) -> Result<Self> {
        check_nonneg("sigma", sigma)?;
        Ok(Self {
            kind: NoiseKind::AdditiveGaussian { sigma },
        })
    }

    pub fn relative(a: f64) -> Result<Self> {
        check_nonneg("a", a)?;
        Ok(Self {
            kind: NoiseKind::Relative { a },
        })
    }

    pub fn mixed(a: f64, sigma: f64) -> Result<Self> {
        check_nonneg("a", a)?;
        check_nonneg("sigma", sigma)?;
        Ok(Self {
            kind: NoiseKind::Mixed { a, sigma },
        })
    }

    /// `Exact` for `sigma == 0`, additive Gaussian otherwise.
    pub fn gaussian_or_exact(sigma: f64) -> Result<Self> {
        if sigma == 0.0 {
            Ok(Self::exact())
        } else {
            Self::additive_gaussian(sigma)
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    /// Relative-noise coefficient `a`.
    pub fn a(&self) -> f64 {
        match self.kind {
            NoiseKind::Relative { a } | NoiseKind::Mixed { a, .. } => a,
            _ => 0.0,
        }
    }

    /// Additive floor `b = d sigma^2` for a `dim`-dimensional problem.
    pub fn b(&self, dim: usize) -> f64 {
        match self.kind {
            NoiseKind::AdditiveGaussian { sigma } | NoiseKind::Mixed { sigma, .. } => dim as f64 * sigma * sigma,
            _ => 0.0,
        }
    }

    /// Exact second moment `a ||grad||^2 + b` of the noise at a gradient.
    pub fn second_moment(&self, grad: &[f64]) -> f64 {
        self.a() * norm_sq(grad) + self.b(grad.len())
    }

    /// Draws a stochastic gradient at `x`.
    pub fn sample_gradient(&self, obj: &dyn Objective, x: &[f64], rng: &mut Stream) -> Result<Vec<f64>> {
        check_dim(obj, x)?;
        let mut g = obj.gradient(x);
        self.perturb(&mut g, rng);
        Ok(g)
    }

    /// Adds one noise draw to an exact gradient in place.
    pub fn perturb(&self, grad: &mut [f64], rng: &mut Stream) {
        let (a, sigma) = match self.kind {
            NoiseKind::Exact => return,
            NoiseKind::AdditiveGaussian { sigma } => (0.0, sigma),
            NoiseKind::Relative { a } => (a, 0.0),
            NoiseKind::Mixed { a, sigma } => (a, sigma),
        };
        let relative_std = if a > 0.0 {
            (a * norm_sq(grad) / grad.len() as f64).sqrt()
        } else {
            0.0
        };
        if matches!(self.kind, NoiseKind::AdditiveGaussian { .. } | NoiseKind::Mixed { .. }) {
            for gi in grad.iter_mut() {
                *gi += rng.normal(sigma);
            }
        }
        if matches!(self.kind, NoiseKind::Relative { .. } | NoiseKind::Mixed { .. }) {
            for gi in grad.iter_mut() {
                *gi += rng.normal(relative_std);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{quadratic_objective, Quadratic};

    fn empirical(oracle: &NoiseOracle, obj: &Quadratic, x: &[f64], draws: usize) -> (f64, Vec<f64>) {
        let mut rng = Stream::from_seed(99);
        let exact = obj.gradient(x);
        let mut sq = 0.0;
        let mut mean = vec![0.0; x.len()];
        for _ in 0..draws {
            let g = oracle.sample_gradient(obj, x, &mut rng).unwrap();
            for (i, (gi, ei)) in g.iter().zip(&exact).enumerate() {
                let d = gi - ei;
                sq += d * d;
                mean[i] += d;
            }
        }
        mean.iter_mut().for_each(|m| *m /= draws as f64);
        (sq / draws as f64, mean)
    }

    #[test]
    fn exact_returns_gradient() {
        let q = quadratic_objective(vec![1.0, 3.0]).unwrap();
        let mut rng = Stream::from_seed(0);
        let g = NoiseOracle::exact()
            .sample_gradient(&q, &[2.0, -1.0], &mut rng)
            .unwrap();
        assert_eq!(g, vec![2.0, -3.0]);
    }

    #[test]
    fn parameters_and_errors() {
        assert!(NoiseOracle::additive_gaussian(-0.1).is_err());
        assert!(NoiseOracle::relative(-1.0).is_err());
        assert!(NoiseOracle::mixed(1.0, f64::NAN).is_err());
        let o = NoiseOracle::mixed(0.5, 0.2).unwrap();
        assert_eq!(o.a(), 0.5);
        assert!((o.b(4) - 0.16).abs() < 1e-15);
        assert_eq!(NoiseOracle::gaussian_or_exact(0.0).unwrap(), NoiseOracle::exact());
        let q = quadratic_objective(vec![1.0, 1.0]).unwrap();
        let mut rng = Stream::from_seed(0);
        assert!(o.sample_gradient(&q, &[1.0], &mut rng).is_err());
    }

    #[test]
    fn additive_second_moment() {
        let q = quadratic_objective(vec![1.0; 4]).unwrap();
        let o = NoiseOracle::additive_gaussian(1.0).unwrap();
        let (m, mean) = empirical(&o, &q, &[0.5, -1.0, 2.0, 0.0], 1_000_000);
        assert!((m - 4.0).abs() < 0.04, "{m}");
        // Per-coordinate std error is 1/sqrt(n).
        assert!(mean.iter().all(|v| v.abs() < 4.0 / 1000.0), "{mean:?}");
    }

    #[test]
    fn relative_second_moment() {
        let q = quadratic_objective(vec![1.0, 1.0]).unwrap();
        let o = NoiseOracle::relative(1.0).unwrap();
        // ||grad||^2 = 9 at (3, 0).
        let (m, _) = empirical(&o, &q, &[3.0, 0.0], 1_000_000);
        assert!((m - 9.0).abs() < 0.09, "{m}");
    }

    #[test]
    fn relative_noise_vanishes_at_optimum() {
        let q = quadratic_objective(vec![1.0, 2.0]).unwrap();
        let o = NoiseOracle::relative(3.0).unwrap();
        let mut rng = Stream::from_seed(1);
        assert_eq!(o.sample_gradient(&q, &[0.0, 0.0], &mut rng).unwrap(), vec![0.0, 0.0]);
    }
}

use std::f64::consts::PI;

use crate::error::{Error, Result};

const G: f64 = 7.0;
// Published Lanczos coefficients, kept digit for digit.
#[allow(clippy::excessive_precision)]
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for `x > 0` (Lanczos, `g = 7`, nine terms).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma needs a finite x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reference: shift up by recurrence, then the Stirling series.
    fn stirling(mut x: f64) -> f64 {
        let mut scale = 1.0;
        while x < 20.0 {
            scale /= x;
            x += 1.0;
        }
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0 - inv * inv2.powi(3) / 1680.0
            + inv * inv2.powi(4) / 1188.0;
        let ln = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series;
        scale * ln.exp()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn known_values() {
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-13);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-13);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-13);
        let gamma_third = 2.678_938_534_707_747_6;
        assert!(rel(gamma(7.0 / 3.0).unwrap(), 4.0 / 9.0 * gamma_third) < 1e-12);
        assert!((gamma(7.0 / 3.0).unwrap() - 1.190_639).abs() < 1e-6);
    }

    #[test]
    fn matches_stirling_reference() {
        for k in 1..=400 {
            let x = k as f64 * 0.05;
            assert!(rel(gamma(x).unwrap(), stirling(x)) < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }
}

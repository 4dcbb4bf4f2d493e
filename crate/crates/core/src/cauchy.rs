//! Cauchy distribution primitives.
//!
//! `C(x; nu, gamma) = gamma / (pi ((x - nu)^2 + gamma^2))` with location `nu`
//! and scale `gamma > 0`. Tail probabilities are evaluated through `atan(1/z)`
//! so that masses far out in the tails keep their relative precision.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Location/scale pair of a Cauchy law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyParams {
    nu: f64,
    gamma: f64,
}

impl CauchyParams {
    pub fn new(nu: f64, gamma: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                reason: "location must be finite",
            });
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "scale must be finite and positive",
            });
        }
        Ok(Self { nu, gamma })
    }

    /// The standard Cauchy law `C(0, 1)`.
    pub fn standard() -> Self {
        Self { nu: 0.0, gamma: 1.0 }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let d = x - self.nu;
        self.gamma / (PI * (d * d + self.gamma * self.gamma))
    }

    /// `1/2 + atan((x - nu)/gamma)/pi`.
    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.nu) / self.gamma;
        if z < -1.0 {
            (-1.0 / z).atan() / PI
        } else {
            0.5 + z.atan() / PI
        }
    }

    /// Upper tail `1 - cdf(x)`, accurate for large `x`.
    pub fn sf(&self, x: f64) -> f64 {
        let z = (x - self.nu) / self.gamma;
        if z > 1.0 {
            (1.0 / z).atan() / PI
        } else {
            0.5 - z.atan() / PI
        }
    }

    /// Inverse CDF, `nu + gamma tan(pi (u - 1/2))`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidParameter {
                name: "u",
                value: u,
                reason: "probability level must lie in (0, 1)",
            });
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        self.nu + self.gamma * (PI * (u - 0.5)).tan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(nu: f64, gamma: f64) -> CauchyParams {
        CauchyParams::new(nu, gamma).unwrap()
    }

    #[test]
    fn pdf_values() {
        assert!((c(0.0, 1.0).pdf(0.0) - 1.0 / PI).abs() < 1e-16);
        assert!((c(0.0, 1.0).pdf(1.0) - 0.5 / PI).abs() < 1e-16);
        assert!((c(3.0, 2.0).pdf(3.0) - 0.5 / PI).abs() < 1e-16);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(c(0.0, 1.0).cdf(0.0), 0.5);
        assert!((c(0.0, 1.0).cdf(1.0) - 0.75).abs() < 1e-15);
        assert!((c(2.0, 3.0).cdf(-1.0) - 0.25).abs() < 1e-15);
        let p = c(1.5, 0.7);
        assert!((p.cdf(1.5 + 0.7) - 0.75).abs() < 1e-15);
        assert!((p.cdf(1.5 - 0.7) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tails_keep_relative_precision() {
        let p = CauchyParams::standard();
        // cdf(-z) ~ 1/(pi z) for large z
        let z = 1e12;
        let expected = 1.0 / (PI * z);
        assert!(((p.cdf(-z) - expected) / expected).abs() < 1e-12);
        assert!(((p.sf(z) - expected) / expected).abs() < 1e-12);
        for x in [-3.0, -1.0, -0.2, 0.0, 0.4, 1.0, 7.0] {
            assert!((p.cdf(x) + p.sf(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quantile_values() {
        assert_eq!(c(0.0, 1.0).quantile(0.5).unwrap(), 0.0);
        assert!((c(0.0, 1.0).quantile(0.75).unwrap() - 1.0).abs() < 1e-15);
        assert!((c(5.0, 2.0).quantile(0.25).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn quantile_rejects_out_of_range_levels() {
        for u in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(c(0.0, 1.0).quantile(u).is_err());
        }
    }

    #[test]
    fn cdf_inverts_quantile() {
        let p = c(-1.25, 0.3);
        for k in 1..100 {
            let u = k as f64 / 100.0;
            let x = p.quantile(u).unwrap();
            assert!((p.cdf(x) - u).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(CauchyParams::new(0.0, 0.0).is_err());
        assert!(CauchyParams::new(0.0, -1.0).is_err());
        assert!(CauchyParams::new(f64::INFINITY, 1.0).is_err());
    }
}

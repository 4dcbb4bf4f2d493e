use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyParams;
use crate::error::{Error, Result};

use super::sample::SAMPLE_CHUNK;

pub const MIN_FIT_POINTS: usize = 1000;

const MLE_MAX_ITERATIONS: usize = 100;
const MLE_GRADIENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Sample median and half the interquartile range.
    #[default]
    MedianIqr,
    /// Maximum likelihood, Newton iterations from the quartile estimate.
    Mle,
}

impl FitMethod {
    pub fn name(self) -> &'static str {
        match self {
            FitMethod::MedianIqr => "median_iqr",
            FitMethod::Mle => "mle",
        }
    }
}

pub fn fit_cauchy(points: &[f64], method: FitMethod) -> Result<CauchyParams> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            required: MIN_FIT_POINTS,
            actual: points.len(),
        });
    }
    if let Some(&bad) = points.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "points",
            value: bad,
            reason: "sample contains a non-finite value",
        });
    }
    let start = median_iqr(points)?;
    match method {
        FitMethod::MedianIqr => Ok(start),
        FitMethod::Mle => mle(points, start),
    }
}

/// Asymptotic standard errors `(se_nu, se_gamma)` of a fit from `n` points.
///
/// Sample quartiles of a Cauchy law have variance `pi^2 gamma^2 / (4n)` for the
/// median and the same for the half-IQR; the likelihood estimator reaches the
/// Cramér–Rao bound `2 gamma^2 / n` for both.
pub fn fit_standard_errors(fit: CauchyParams, n: usize, method: FitMethod) -> (f64, f64) {
    let n = n as f64;
    let se = match method {
        FitMethod::MedianIqr => PI * fit.gamma() / (2.0 * n.sqrt()),
        FitMethod::Mle => fit.gamma() * (2.0 / n).sqrt(),
    };
    (se, se)
}

fn median_iqr(points: &[f64]) -> Result<CauchyParams> {
    let mut sorted = points.to_vec();
    sorted.par_sort_unstable_by(f64::total_cmp);
    let nu = quantile_sorted(&sorted, 0.5);
    let gamma = 0.5 * (quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25));
    if !(gamma > 0.0) {
        return Err(Error::Degenerate { nu, gamma });
    }
    CauchyParams::new(nu, gamma)
}

/// Weibull plotting-position quantile: position `(n + 1) p`, linear between
/// order statistics.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 + 1.0) * p;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= n as f64 {
        return sorted[n - 1];
    }
    let lo = h.floor();
    let i = lo as usize - 1;
    let frac = h - lo;
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

/// Mean log-likelihood (without the `-ln pi`), gradient and Hessian.
struct Likelihood {
    value: f64,
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
}

fn likelihood(points: &[f64], nu: f64, gamma: f64) -> Likelihood {
    let g2 = gamma * gamma;
    // fixed-size chunks, summed in order: the result does not depend on threads
    let partials: Vec<[f64; 5]> = points
        .par_chunks(SAMPLE_CHUNK)
        .map(|chunk| {
            let mut s = [0.0; 5];
            for &x in chunk {
                let d = x - nu;
                let denom = d * d + g2;
                let d2 = denom * denom;
                s[0] += denom.ln();
                s[1] += 2.0 * d / denom;
                s[2] += 2.0 * gamma / denom;
                s[3] += (2.0 * d * d - 2.0 * g2) / d2;
                s[4] += 4.0 * d * gamma / d2;
            }
            s
        })
        .collect();
    let mut s = [0.0; 5];
    for p in &partials {
        for k in 0..5 {
            s[k] += p[k];
        }
    }
    let n = points.len() as f64;
    let m: Vec<f64> = s.iter().map(|v| v / n).collect();
    Likelihood {
        value: gamma.ln() - m[0],
        grad: [m[1], 1.0 / gamma - m[2]],
        hess: [[m[3], -m[4]], [-m[4], -1.0 / g2 - m[3]]],
    }
}

fn mle(points: &[f64], start: CauchyParams) -> Result<CauchyParams> {
    let (mut nu, mut gamma) = (start.nu(), start.gamma());
    let mut cur = likelihood(points, nu, gamma);
    for _ in 0..MLE_MAX_ITERATIONS {
        let norm = cur.grad[0].hypot(cur.grad[1]);
        if norm < MLE_GRADIENT_TOL {
            return CauchyParams::new(nu, gamma);
        }
        let h = cur.hess;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        // Newton direction when the Hessian is negative definite, scaled ascent otherwise
        let dir = if h[0][0] < 0.0 && det > 0.0 {
            [
                -(h[1][1] * cur.grad[0] - h[0][1] * cur.grad[1]) / det,
                -(h[0][0] * cur.grad[1] - h[1][0] * cur.grad[0]) / det,
            ]
        } else {
            [gamma * gamma * cur.grad[0], gamma * gamma * cur.grad[1]]
        };
        let mut step = 1.0;
        loop {
            let (n2, g2) = (nu + step * dir[0], gamma + step * dir[1]);
            if g2 > 0.0 {
                let next = likelihood(points, n2, g2);
                if next.value >= cur.value - 1e-15 * cur.value.abs().max(1.0) {
                    nu = n2;
                    gamma = g2;
                    cur = next;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-12 {
                return Err(Error::NonConvergence {
                    method: "mle",
                    iterations: MLE_MAX_ITERATIONS,
                    residual: norm,
                });
            }
        }
    }
    let residual = cur.grad[0].hypot(cur.grad[1]);
    if residual < MLE_GRADIENT_TOL {
        return CauchyParams::new(nu, gamma);
    }
    Err(Error::NonConvergence {
        method: "mle",
        iterations: MLE_MAX_ITERATIONS,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pf::sample_cauchy;

    #[test]
    fn quartile_points_fit_exactly() {
        // levels i/1004 put the Weibull quartiles exactly on u = 1/4, 1/2, 3/4
        let p = CauchyParams::standard();
        let pts: Vec<f64> = (1..=1003).map(|i| p.quantile(i as f64 / 1004.0).unwrap()).collect();
        let f = fit_cauchy(&pts, FitMethod::MedianIqr).unwrap();
        assert_eq!(f.nu(), 0.0);
        assert!((f.gamma() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weibull_positions() {
        let s: Vec<f64> = (1..=9).map(f64::from).collect();
        assert_eq!(quantile_sorted(&s, 0.5), 5.0);
        assert_eq!(quantile_sorted(&s, 0.25), 2.5);
        assert_eq!(quantile_sorted(&s, 0.75), 7.5);
        assert_eq!(quantile_sorted(&s, 0.01), 1.0);
    }

    #[test]
    fn too_few_points() {
        let r = fit_cauchy(&[0.0; 999], FitMethod::MedianIqr);
        assert!(matches!(r, Err(Error::TooFewPoints { required: 1000, actual: 999 })));
    }

    #[test]
    fn constant_sample_is_degenerate() {
        assert!(matches!(fit_cauchy(&[2.0; 1000], FitMethod::Mle), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn mle_gradient_matches_finite_differences() {
        let s = sample_cauchy(CauchyParams::new(1.0, 2.0).unwrap(), 5000, 3).unwrap();
        let (nu, gamma, h) = (0.8, 2.3, 1e-6);
        let l = likelihood(&s.points, nu, gamma);
        let fd_nu = (likelihood(&s.points, nu + h, gamma).value - likelihood(&s.points, nu - h, gamma).value) / (2.0 * h);
        let fd_g = (likelihood(&s.points, nu, gamma + h).value - likelihood(&s.points, nu, gamma - h).value) / (2.0 * h);
        assert!((fd_nu - l.grad[0]).abs() < 1e-8 && (fd_g - l.grad[1]).abs() < 1e-8);
        let fd_hnn = (likelihood(&s.points, nu + h, gamma).grad[0] - likelihood(&s.points, nu - h, gamma).grad[0]) / (2.0 * h);
        let fd_hng = (likelihood(&s.points, nu, gamma + h).grad[0] - likelihood(&s.points, nu, gamma - h).grad[0]) / (2.0 * h);
        let fd_hgg = (likelihood(&s.points, nu, gamma + h).grad[1] - likelihood(&s.points, nu, gamma - h).grad[1]) / (2.0 * h);
        assert!((fd_hnn - l.hess[0][0]).abs() < 1e-7);
        assert!((fd_hng - l.hess[0][1]).abs() < 1e-7);
        assert!((fd_hgg - l.hess[1][1]).abs() < 1e-7);
    }

    #[test]
    fn large_sample_fits() {
        let s = sample_cauchy(CauchyParams::new(3.0, 2.0).unwrap(), 1_000_000, 1).unwrap();
        for m in [FitMethod::MedianIqr, FitMethod::Mle] {
            let f = s.fit(m).unwrap();
            assert!((f.nu() - 3.0).abs() < 0.03 && (f.gamma() - 2.0).abs() < 0.02, "{m:?} {f:?}");
        }
    }
}

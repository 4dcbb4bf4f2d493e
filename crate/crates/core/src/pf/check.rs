use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyParams;
use crate::error::{Error, Result};
use crate::orbit::{iterate_orbit, Alpha, OrbitState};
use crate::params::{parameter_step, HPoint};

use super::fit::{fit_cauchy, fit_standard_errors, FitMethod};
use super::sample::{push_forward, sample_cauchy};

/// Allowed fit discrepancy, in standard errors.
pub const MC_TOLERANCE_SE: f64 = 5.0;
const MC_MIN_SAMPLES: usize = 10_000;
const MAX_DROP_FRACTION: f64 = 1e-4;
const ERGODIC_MIN_STEPS: usize = 100_000;

/// Fitted Monte Carlo push-forward against the iterated parameter map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PfReport {
    pub alpha: Alpha,
    pub input: CauchyParams,
    pub predicted: CauchyParams,
    pub measured: CauchyParams,
    /// `max(|nu_hat - nu'|, |gamma_hat - gamma'|)`.
    pub sup_error: f64,
    pub n_steps: usize,
    pub method: FitMethod,
    /// Points left after pole hits were dropped.
    pub sample_size: usize,
    pub dropped: usize,
    pub standard_error: [f64; 2],
    pub within_tolerance: bool,
}

fn cauchy_of(x: HPoint) -> Result<CauchyParams> {
    CauchyParams::new(x.nu(), x.gamma())
}

/// Samples `C(p)`, pushes the sample through the Boole transform one step at a
/// time and fits it after every step. Entry `k` compares the fit after `k`
/// steps with `k` parameter steps.
pub fn pf_monte_carlo_trace(
    alpha: Alpha,
    p: CauchyParams,
    n: usize,
    steps: usize,
    seed: u64,
    method: FitMethod,
) -> Result<Vec<PfReport>> {
    if n < MC_MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "Monte Carlo check needs at least 10^4 samples",
        });
    }
    let limit = (n as f64 * MAX_DROP_FRACTION).floor() as usize;
    let mut points = sample_cauchy(p, n, seed)?.points;
    let mut predicted = HPoint::new(p.nu(), p.gamma())?;
    let mut dropped = 0;
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            dropped += push_forward(alpha, &mut points, 1);
            if dropped > limit {
                return Err(Error::TooManyDropped {
                    dropped,
                    total: n,
                    limit,
                });
            }
            predicted = parameter_step(alpha, predicted)?;
        }
        let measured = fit_cauchy(&points, method)?;
        let pred = cauchy_of(predicted)?;
        let (se_nu, se_gamma) = fit_standard_errors(measured, points.len(), method);
        let (dnu, dgamma) = ((measured.nu() - pred.nu()).abs(), (measured.gamma() - pred.gamma()).abs());
        out.push(PfReport {
            alpha,
            input: p,
            predicted: pred,
            measured,
            sup_error: dnu.max(dgamma),
            n_steps: k,
            method,
            sample_size: points.len(),
            dropped,
            standard_error: [se_nu, se_gamma],
            within_tolerance: dnu <= MC_TOLERANCE_SE * se_nu && dgamma <= MC_TOLERANCE_SE * se_gamma,
        });
    }
    Ok(out)
}

/// End-to-end check after `steps` steps with the default quartile fit.
pub fn pf_monte_carlo_check(alpha: Alpha, p: CauchyParams, n: usize, steps: usize, seed: u64) -> Result<PfReport> {
    let trace = pf_monte_carlo_trace(alpha, p, n, steps, seed, FitMethod::default())?;
    Ok(*trace.last().expect("trace holds steps + 1 entries"))
}

/// Error-scaling test for the Monte Carlo fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub block_small: usize,
    pub block_large: usize,
    /// Root mean squared parameter error over all blocks of each size.
    pub rms_small: f64,
    pub rms_large: f64,
    /// `rms_small / rms_large`; `sqrt(2)` for an `n^{-1/2}` rate.
    pub ratio: f64,
    pub per_seed: Vec<f64>,
}

impl RateReport {
    pub const BAND: (f64, f64) = (1.2, 1.7);

    pub fn in_band(&self) -> bool {
        self.ratio >= Self::BAND.0 && self.ratio <= Self::BAND.1
    }
}

/// For each seed, pushes `total` samples one step, splits them into disjoint
/// blocks of `block` and `2 block` points, fits every block and compares with
/// the parameter step. The ratio of pooled RMS errors should be `sqrt(2)`.
pub fn sampling_rate_check(
    alpha: Alpha,
    p: CauchyParams,
    total: usize,
    block: usize,
    seeds: &[u64],
) -> Result<RateReport> {
    if block < super::fit::MIN_FIT_POINTS || total < 4 * block {
        return Err(Error::InvalidParameter {
            name: "block",
            value: block as f64,
            reason: "need blocks of at least 1000 points and at least two large blocks",
        });
    }
    let target = cauchy_of(parameter_step(alpha, HPoint::new(p.nu(), p.gamma())?)?)?;
    let block_mse = |points: &[f64], size: usize| -> Result<(f64, usize)> {
        let errs: Vec<f64> = points
            .par_chunks_exact(size)
            .map(|b| {
                fit_cauchy(b, FitMethod::MedianIqr)
                    .map(|f| (f.nu() - target.nu()).powi(2) + (f.gamma() - target.gamma()).powi(2))
            })
            .collect::<Result<_>>()?;
        Ok((errs.iter().sum(), errs.len()))
    };
    let (mut sum_small, mut count_small, mut sum_large, mut count_large) = (0.0, 0, 0.0, 0);
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut points = sample_cauchy(p, total, seed)?.points;
        push_forward(alpha, &mut points, 1);
        let (s1, c1) = block_mse(&points, block)?;
        let (s2, c2) = block_mse(&points, 2 * block)?;
        per_seed.push(((s1 / c1 as f64) / (s2 / c2 as f64)).sqrt());
        sum_small += s1;
        count_small += c1;
        sum_large += s2;
        count_large += c2;
    }
    let rms_small = (sum_small / count_small as f64).sqrt();
    let rms_large = (sum_large / count_large as f64).sqrt();
    Ok(RateReport {
        block_small: block,
        block_large: 2 * block,
        rms_small,
        rms_large,
        ratio: rms_small / rms_large,
        per_seed,
    })
}

/// Orbit statistics against the invariant law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicReport {
    pub ks: f64,
    pub n: usize,
    pub distinct: usize,
    /// Set when the orbit revisits so few values that it cannot represent a
    /// continuous law (an eventually periodic seed).
    pub degenerate: bool,
}

/// Kolmogorov–Smirnov distance between the empirical law of `xi_1..xi_n` and
/// `C(0, sqrt(alpha / (1 - alpha)))`.
pub fn ergodic_orbit_check(alpha: Alpha, xi0: OrbitState, n: usize) -> Result<ErgodicReport> {
    if n < ERGODIC_MIN_STEPS {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "ergodic check needs at least 10^5 orbit steps",
        });
    }
    let orbit = iterate_orbit(alpha, xi0, n);
    if let Some(last_valid) = orbit.truncated_at {
        return Err(Error::Truncated { last_valid });
    }
    let mut xs = orbit.states[1..].to_vec();
    xs.par_sort_unstable_by(f64::total_cmp);
    let law = CauchyParams::new(0.0, alpha.invariant_scale())?;
    Ok(ks_sorted(&xs, &law))
}

fn ks_sorted(xs: &[f64], law: &CauchyParams) -> ErgodicReport {
    let m = xs.len() as f64;
    let mut ks = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = law.cdf(x);
        ks = ks.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    let mut distinct = 0;
    for (i, x) in xs.iter().enumerate() {
        if i == 0 || xs[i - 1] != *x {
            distinct += 1;
        }
    }
    ErgodicReport {
        ks,
        n: xs.len(),
        distinct,
        degenerate: 2 * distinct < xs.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn ks_of_exact_quantiles_is_half_a_step() {
        let law = CauchyParams::standard();
        let m = 1000;
        let xs: Vec<f64> = (0..m).map(|i| law.quantile((i as f64 + 0.5) / m as f64).unwrap()).collect();
        let r = ks_sorted(&xs, &law);
        assert!((r.ks - 0.5 / m as f64).abs() < 1e-12);
        assert!(!r.degenerate);
    }

    #[test]
    fn repeated_values_are_flagged() {
        let xs = vec![1.0; 10];
        let r = ks_sorted(&xs, &CauchyParams::standard());
        assert_eq!(r.distinct, 1);
        assert!(r.degenerate);
    }

    #[test]
    fn pole_seed_is_truncated() {
        let r = ergodic_orbit_check(a(0.5), OrbitState::new(1.0).unwrap(), 100_000);
        assert!(matches!(r, Err(Error::Truncated { last_valid: 1 })));
    }

    #[test]
    fn short_orbits_are_refused() {
        assert!(ergodic_orbit_check(a(0.5), OrbitState::new(0.7).unwrap(), 10).is_err());
    }

    #[test]
    fn monte_carlo_needs_enough_samples() {
        assert!(pf_monte_carlo_check(a(0.5), CauchyParams::standard(), 9_999, 1, 0).is_err());
    }

    #[test]
    fn stationary_monte_carlo() {
        let r = pf_monte_carlo_check(a(0.5), CauchyParams::standard(), 200_000, 10, 5).unwrap();
        assert!(r.within_tolerance, "{r:?}");
        assert_eq!(r.predicted, CauchyParams::standard());
    }
}

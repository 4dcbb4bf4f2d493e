//! Brute-force oracles for the density picture: the two-branch
//! Perron–Frobenius sum on a grid, and Monte Carlo push-forward with Cauchy
//! fitting.

mod check;
mod fit;
mod grid;
mod sample;

use rayon::prelude::*;
use std::sync::Arc;

use crate::cauchy::CauchyParams;
use crate::error::Result;
use crate::orbit::{preimages, Alpha};

pub use check::{
    ergodic_orbit_check, pf_monte_carlo_check, pf_monte_carlo_trace, sampling_rate_check, ErgodicReport, PfReport,
    RateReport, MC_TOLERANCE_SE,
};
pub use fit::{fit_cauchy, fit_standard_errors, FitMethod, MIN_FIT_POINTS};
pub use grid::{DensityGrid, GridLayout, DEFAULT_GRID_SIZE, GRID_QUANTILE_FLOOR, UNDERRESOLUTION_DRIFT};
pub use sample::{push_forward, sample_cauchy, SampleBatch, SAMPLE_CHUNK};

/// A probability law on the real line that the PF sum can read from.
pub trait Density: Sync {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64;
}

impl Density for CauchyParams {
    fn pdf(&self, x: f64) -> f64 {
        CauchyParams::pdf(self, x)
    }

    fn cdf(&self, x: f64) -> f64 {
        CauchyParams::cdf(self, x)
    }

    fn sf(&self, x: f64) -> f64 {
        CauchyParams::sf(self, x)
    }
}

/// Image density at one point: `sum rho(xi) / |F'(xi)|` over the two preimages,
/// with `|F'(xi)| = alpha (1 + xi^2) / xi^2`.
pub fn pf_value<D: Density + ?Sized>(alpha: Alpha, rho: &D, x: f64) -> f64 {
    let a = alpha.value();
    let (minus, plus) = preimages(alpha, x);
    let branch = |xi: f64| rho.pdf(xi) * xi * xi / (a * (1.0 + xi * xi));
    branch(minus) + branch(plus)
}

/// Mass the image law puts below `x` and above `y`.
fn image_tails<D: Density + ?Sized>(alpha: Alpha, rho: &D, x: f64, y: f64) -> (f64, f64) {
    let (lo_minus, lo_plus) = preimages(alpha, x);
    let (hi_minus, hi_plus) = preimages(alpha, y);
    // F is increasing on each half-line, so {F < x} = (-inf, lo_minus) u (0, lo_plus)
    let below = rho.cdf(lo_minus) + (rho.cdf(lo_plus) - rho.cdf(0.0));
    let above = (rho.cdf(0.0) - rho.cdf(hi_minus)) + rho.sf(hi_plus);
    (below, above)
}

/// Pushes any density forward one step onto `layout`.
pub fn pf_push_forward<D: Density + ?Sized>(alpha: Alpha, rho: &D, layout: Arc<GridLayout>) -> DensityGrid {
    let values: Vec<f64> = layout.nodes().par_iter().map(|&x| pf_value(alpha, rho, x)).collect();
    let nodes = layout.nodes();
    let (below, above) = image_tails(alpha, rho, nodes[0], nodes[nodes.len() - 1]);
    DensityGrid::from_parts(layout, values, below, above)
}

/// One PF step of a grid density, evaluated on the same nodes. The integral of
/// the result is not renormalized; see [`DensityGrid::drift`].
pub fn pf_density_step(alpha: Alpha, rho: &DensityGrid) -> DensityGrid {
    pf_push_forward(alpha, rho, rho.layout().clone())
}

/// Largest `|PF[C(nu, gamma)](x) - C(x; nu', gamma')|` over the nodes with
/// `|x| < 1e3`, where `(nu', gamma')` is one parameter step.
pub fn pf_closed_form_check(alpha: Alpha, p: CauchyParams, nodes: &[f64]) -> Result<f64> {
    let x = crate::params::HPoint::new(p.nu(), p.gamma())?;
    let next = crate::params::parameter_step(alpha, x)?;
    let target = CauchyParams::new(next.nu(), next.gamma())?;
    Ok(nodes
        .par_iter()
        .filter(|x| x.abs() < 1e3)
        .map(|&x| (pf_value(alpha, &p, x) - target.pdf(x)).abs())
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn standard_cauchy_is_fixed_at_half() {
        let v = pf_value(a(0.5), &CauchyParams::standard(), 0.0);
        assert!((v - 1.0 / PI).abs() < 1e-16);
    }

    #[test]
    fn one_step_from_one_one() {
        let layout = Arc::new(GridLayout::arctan(CauchyParams::standard(), 513).unwrap());
        let e = pf_closed_form_check(a(0.5), CauchyParams::new(1.0, 1.0).unwrap(), layout.nodes()).unwrap();
        assert!(e < 1e-10, "{e}");
        let e = pf_closed_form_check(a(0.5), CauchyParams::standard(), layout.nodes()).unwrap();
        assert!(e < 1e-12, "{e}");
        let e = pf_closed_form_check(a(0.9), CauchyParams::new(-3.0, 0.5).unwrap(), layout.nodes()).unwrap();
        assert!(e < 1e-10, "{e}");
    }

    #[test]
    fn image_tails_match_the_image_law() {
        let alpha = a(0.5);
        let p = CauchyParams::new(1.0, 1.0).unwrap();
        let q = CauchyParams::new(0.25, 0.75).unwrap();
        let (below, above) = image_tails(alpha, &p, -40.0, 25.0);
        assert!((below - q.cdf(-40.0)).abs() < 1e-15);
        assert!((above - q.sf(25.0)).abs() < 1e-15);
    }

    #[test]
    fn grid_step_of_cauchy_input() {
        let alpha = a(0.5);
        let rho = DensityGrid::cauchy(CauchyParams::new(1.0, 1.0).unwrap(), DEFAULT_GRID_SIZE).unwrap();
        let out = pf_density_step(alpha, &rho);
        let target = CauchyParams::new(0.25, 0.75).unwrap();
        for (&x, &v) in out.nodes().iter().zip(out.values()) {
            assert!((v - target.pdf(x)).abs() <= 1e-10 * target.pdf(x).max(1e-300), "{x} {v}");
        }
        assert!(out.drift() < 1e-6, "{}", out.drift());
        assert!(!out.is_underresolved());
    }
}

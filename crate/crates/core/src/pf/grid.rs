use std::f64::consts::PI;
use std::sync::Arc;

use crate::cauchy::CauchyParams;
use crate::error::{Error, Result};

use super::Density;

pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Probability level of the first node; the last sits at `1 - GRID_QUANTILE_FLOOR`.
pub const GRID_QUANTILE_FLOOR: f64 = 1e-6;

/// Mass drift above which a grid is reported as under-resolved.
pub const UNDERRESOLUTION_DRIFT: f64 = 1e-3;

/// Nodes placed at equally spaced quantiles of a reference Cauchy law.
///
/// Integrals over the grid are taken in the level variable `u = F_ref(x)`,
/// where the integrand `rho(x) dx/du` is smooth and bounded for Cauchy-like
/// densities even though `rho` itself spans many decades.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLayout {
    reference: CauchyParams,
    levels: Vec<f64>,
    nodes: Vec<f64>,
}

impl GridLayout {
    pub fn arctan(reference: CauchyParams, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_size",
                value: size as f64,
                reason: "a grid needs at least two nodes",
            });
        }
        let lo = GRID_QUANTILE_FLOOR;
        let span = 1.0 - 2.0 * lo;
        let levels: Vec<f64> = (0..size).map(|i| lo + span * i as f64 / (size - 1) as f64).collect();
        let nodes: Vec<f64> = levels.iter().map(|&u| reference.quantile_unchecked(u)).collect();
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter {
                name: "grid_size",
                value: size as f64,
                reason: "nodes are not strictly increasing at this resolution",
            });
        }
        Ok(Self {
            reference,
            levels,
            nodes,
        })
    }

    pub fn reference(&self) -> CauchyParams {
        self.reference
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `dx/du = pi gamma_ref (1 + z^2)`.
    fn jacobian(&self, x: f64) -> f64 {
        let z = (x - self.reference.nu()) / self.reference.gamma();
        PI * self.reference.gamma() * (1.0 + z * z)
    }
}

/// A density sampled on a [`GridLayout`], plus the mass left of the first node
/// and right of the last.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    layout: Arc<GridLayout>,
    values: Vec<f64>,
    tail_lower: f64,
    tail_upper: f64,
    // rho dx/du at each node and its running trapezoid integral in u
    q: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DensityGrid {
    pub(crate) fn from_parts(layout: Arc<GridLayout>, values: Vec<f64>, tail_lower: f64, tail_upper: f64) -> Self {
        let q: Vec<f64> = layout
            .nodes()
            .iter()
            .zip(&values)
            .map(|(&x, &v)| v * layout.jacobian(x))
            .collect();
        let mut cumulative = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 1..q.len() {
            acc += 0.5 * (q[i - 1] + q[i]) * (layout.levels[i] - layout.levels[i - 1]);
            cumulative.push(acc);
        }
        Self {
            layout,
            values,
            tail_lower,
            tail_upper,
            q,
            cumulative,
        }
    }

    /// Samples `rho` on the nodes and takes the tail masses from its CDF.
    pub fn from_density<D: Density + ?Sized>(layout: Arc<GridLayout>, rho: &D) -> Self {
        let values = layout.nodes().iter().map(|&x| rho.pdf(x)).collect();
        let first = layout.nodes()[0];
        let last = layout.nodes()[layout.len() - 1];
        let (lo, hi) = (rho.cdf(first), rho.sf(last));
        Self::from_parts(layout, values, lo, hi)
    }

    /// `C(nu, gamma)` on a grid whose reference law is itself.
    pub fn cauchy(p: CauchyParams, size: usize) -> Result<Self> {
        Ok(Self::from_density(Arc::new(GridLayout::arctan(p, size)?), &p))
    }

    pub fn layout(&self) -> &Arc<GridLayout> {
        &self.layout
    }

    pub fn nodes(&self) -> &[f64] {
        self.layout.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_lower(&self) -> f64 {
        self.tail_lower
    }

    pub fn tail_upper(&self) -> f64 {
        self.tail_upper
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_lower + self.tail_upper
    }

    /// Trapezoid integral over the nodes plus the tail masses.
    pub fn integral(&self) -> f64 {
        self.tail_lower + self.interior_mass() + self.tail_upper
    }

    /// `|1 - integral|`.
    pub fn drift(&self) -> f64 {
        (1.0 - self.integral()).abs()
    }

    pub fn is_underresolved(&self) -> bool {
        self.drift() > UNDERRESOLUTION_DRIFT
    }

    /// Human-readable warning when the grid is under-resolved.
    pub fn warning(&self) -> Option<String> {
        self.is_underresolved().then(|| {
            format!(
                "grid under-resolved: integral deviates from 1 by {:.3e} with {} nodes; increase --grid-size",
                self.drift(),
                self.layout.len()
            )
        })
    }

    fn interior_mass(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Index `i` of the segment `[x_i, x_{i+1}]` containing `x`, and the
    /// fraction `t` of the way through it in `u`.
    fn locate(&self, x: f64) -> (usize, f64) {
        let nodes = self.layout.nodes();
        let j = nodes.partition_point(|&n| n <= x);
        let i = j.saturating_sub(1).min(nodes.len() - 2);
        let levels = &self.layout.levels;
        let u = self.layout.reference.cdf(x);
        let t = ((u - levels[i]) / (levels[i + 1] - levels[i])).clamp(0.0, 1.0);
        (i, t)
    }

    /// Mass between the first node and `x` (inside the grid).
    fn mass_to(&self, i: usize, t: f64) -> f64 {
        let du = self.layout.levels[i + 1] - self.layout.levels[i];
        self.cumulative[i] + du * (t * self.q[i] + 0.5 * t * t * (self.q[i + 1] - self.q[i]))
    }

    fn first(&self) -> f64 {
        self.layout.nodes[0]
    }

    fn last(&self) -> f64 {
        self.layout.nodes[self.layout.len() - 1]
    }
}

/// Inside the grid, `rho dx/du` is interpolated linearly in `u`; beyond it the
/// tail mass is spread like the reference law.
impl Density for DensityGrid {
    fn pdf(&self, x: f64) -> f64 {
        let r = self.layout.reference;
        if x < self.first() {
            return self.tail_lower * r.pdf(x) / r.cdf(self.first());
        }
        if x > self.last() {
            return self.tail_upper * r.pdf(x) / r.sf(self.last());
        }
        let (i, t) = self.locate(x);
        let q = self.q[i] + t * (self.q[i + 1] - self.q[i]);
        q / self.layout.jacobian(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        let r = self.layout.reference;
        if x < self.first() {
            return self.tail_lower * r.cdf(x) / r.cdf(self.first());
        }
        if x > self.last() {
            return self.tail_lower + self.interior_mass() + self.tail_upper * (1.0 - r.sf(x) / r.sf(self.last()));
        }
        let (i, t) = self.locate(x);
        self.tail_lower + self.mass_to(i, t)
    }

    fn sf(&self, x: f64) -> f64 {
        let r = self.layout.reference;
        if x > self.last() {
            return self.tail_upper * r.sf(x) / r.sf(self.last());
        }
        if x < self.first() {
            return self.tail_upper + self.interior_mass() + self.tail_lower * (1.0 - r.cdf(x) / r.cdf(self.first()));
        }
        let (i, t) = self.locate(x);
        self.tail_upper + (self.interior_mass() - self.mass_to(i, t))
    }
}

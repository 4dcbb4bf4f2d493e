//! The statistical picture: the exact map on Cauchy parameters `(nu, gamma)`.
//!
//! Pushing `C(nu, gamma)` forward under the Boole transform gives another
//! Cauchy law with
//!
//! ```text
//! nu'    = alpha nu    (A - 1) / A
//! gamma' = alpha gamma (A + 1) / A,      A = nu^2 + gamma^2.
//! ```
//!
//! In complex form, `nu' - i gamma' = F(nu - i gamma)` and
//! `gamma' + i nu' = G(gamma + i nu)`.

use num_complex::{Complex64, ComplexFloat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{boole_transform, boole_transform_complex, g_transform, g_transform_complex, Alpha};

/// A point of the closed upper half-plane.
///
/// Interior points have `gamma > 0`. Boundary points (`gamma = 0`) stand for
/// Dirac masses and only come from [`HPoint::boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    nu: f64,
    gamma: f64,
    boundary: bool,
}

impl HPoint {
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
                reason: "interior points need a finite positive scale",
            });
        }
        Ok(Self {
            nu,
            gamma,
            boundary: false,
        })
    }

    /// The Dirac mass at `nu`, a point of the boundary `gamma = 0`.
    pub fn boundary(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                reason: "location must be finite",
            });
        }
        Ok(Self {
            nu,
            gamma: 0.0,
            boundary: true,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary
    }

    pub(crate) fn require_interior(&self) -> Result<()> {
        if self.boundary {
            Err(Error::Boundary {
                nu: self.nu,
                gamma: self.gamma,
            })
        } else {
            Ok(())
        }
    }

    pub fn distance(&self, other: &HPoint) -> f64 {
        (self.nu - other.nu).hypot(self.gamma - other.gamma)
    }
}

/// Tangent vector `d_nu d/dnu + d_gamma d/dgamma` at an interior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: HPoint,
    pub d_nu: f64,
    pub d_gamma: f64,
}

impl TangentVector {
    pub fn new(base: HPoint, d_nu: f64, d_gamma: f64) -> Result<Self> {
        base.require_interior()?;
        Ok(Self {
            base,
            d_nu,
            d_gamma,
        })
    }

    pub fn components(&self) -> [f64; 2] {
        [self.d_nu, self.d_gamma]
    }
}

/// 2x2 derivative matrix. Rows are outputs `(nu', gamma')`, columns inputs `(nu, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub m: [[f64; 2]; 2],
}

impl Jacobian2 {
    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Roots of `l^2 - tr l + det`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half_tr = 0.5 * self.trace();
        let disc = Complex64::new(half_tr * half_tr - self.det(), 0.0).sqrt();
        [half_tr + disc, half_tr - disc]
    }

    pub fn max_abs_diff(&self, other: &Jacobian2) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        worst
    }
}

/// The component functions `(F_-(a, b), F_+(a, b))` of the parameter map.
///
/// Also the real and imaginary parts of `F(a + i b)`, so `b` may take any sign.
pub fn parameter_components(alpha: Alpha, a: f64, b: f64) -> Result<(f64, f64)> {
    let big_a = a * a + b * b;
    if big_a == 0.0 {
        return Err(Error::Degenerate { nu: a, gamma: b });
    }
    let inv = 1.0 / big_a;
    let al = alpha.value();
    Ok((al * a * (1.0 - inv), al * b * (1.0 + inv)))
}

/// One step of the parameter map. Boundary points follow the Boole transform.
pub fn parameter_step(alpha: Alpha, x: HPoint) -> Result<HPoint> {
    if x.boundary {
        return HPoint::boundary(boole_transform(alpha, x.nu)?);
    }
    let (nu, gamma) = parameter_components(alpha, x.nu, x.gamma)?;
    HPoint::new(nu, gamma)
}

/// The real form of the Boole transform on `xi1 + i xi2`.
pub fn orbital_from_parameter(alpha: Alpha, xi1: f64, xi2: f64) -> Result<(f64, f64)> {
    parameter_components(alpha, xi1, xi2)
}

/// The unique fixed point `(0, sqrt(alpha / (1 - alpha)))`.
pub fn fixed_point(alpha: Alpha) -> HPoint {
    HPoint {
        nu: 0.0,
        gamma: alpha.invariant_scale(),
        boundary: false,
    }
}

/// Hand-differentiated Jacobian of [`parameter_step`] at an interior point.
pub fn jacobian_analytic(alpha: Alpha, x: HPoint) -> Result<Jacobian2> {
    x.require_interior()?;
    let (nu, gamma) = (x.nu, x.gamma);
    let big_a = nu * nu + gamma * gamma;
    if big_a == 0.0 {
        return Err(Error::Degenerate { nu, gamma });
    }
    let al = alpha.value();
    let a2 = big_a * big_a;
    let diag_shift = (nu * nu - gamma * gamma) / a2;
    let cross = 2.0 * al * nu * gamma / a2;
    Ok(Jacobian2 {
        m: [
            [al * (1.0 + diag_shift), cross],
            [-cross, al * (1.0 + diag_shift)],
        ],
    })
}

/// Pushes a tangent vector through the linearized map.
pub fn linearize(alpha: Alpha, v: TangentVector) -> Result<TangentVector> {
    let jac = jacobian_analytic(alpha, v.base)?;
    let [d_nu, d_gamma] = jac.apply(v.components());
    TangentVector::new(parameter_step(alpha, v.base)?, d_nu, d_gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub eigenvalues: (f64, f64),
    /// Both eigenvalues vanish: the linearization is degenerate and iterates
    /// converge quadratically.
    pub quadratic_convergence: bool,
    pub linearly_stable: bool,
}

/// Eigenvalues of the linearization at the fixed point (both `2 alpha - 1`).
pub fn stability_eigenvalues(alpha: Alpha) -> StabilityReport {
    let jac = jacobian_analytic(alpha, fixed_point(alpha)).expect("fixed point is interior");
    let [l1, l2] = jac.eigenvalues();
    let quadratic = l1.abs() <= f64::EPSILON && l2.abs() <= f64::EPSILON;
    StabilityReport {
        eigenvalues: (l1.re, l2.re),
        quadratic_convergence: quadratic,
        linearly_stable: l1.abs() < 1.0 && l2.abs() < 1.0,
    }
}

/// `(nu, gamma) -> (-nu, gamma)`.
pub fn reflect(x: HPoint) -> HPoint {
    HPoint { nu: -x.nu, ..x }
}

/// `(F(s), F(w))` for `s = nu - i gamma`, `w = nu + i gamma`.
pub fn complex_s_step(alpha: Alpha, x: HPoint) -> Result<(Complex64, Complex64)> {
    x.require_interior()?;
    let s = Complex64::new(x.nu, -x.gamma);
    let w = Complex64::new(x.nu, x.gamma);
    Ok((boole_transform_complex(alpha, s), boole_transform_complex(alpha, w)))
}

/// `(G(i s), G(i w))`, i.e. `G` applied to `gamma + i nu` and `-gamma + i nu`.
pub fn complex_check_step(alpha: Alpha, x: HPoint) -> Result<(Complex64, Complex64)> {
    x.require_interior()?;
    let s_check = Complex64::new(x.gamma, x.nu);
    let w_check = Complex64::new(-x.gamma, x.nu);
    Ok((
        g_transform_complex(alpha, s_check),
        g_transform_complex(alpha, w_check),
    ))
}

/// Coordinates `(q, p) = (nu, 1 / (2 gamma))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPoint {
    q: f64,
    p: f64,
}

impl CanonicalPoint {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "must be finite",
            });
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "momentum must be finite and positive",
            });
        }
        Ok(Self { q, p })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

pub fn to_canonical(x: HPoint) -> Result<CanonicalPoint> {
    x.require_interior()?;
    CanonicalPoint::new(x.nu, 1.0 / (2.0 * x.gamma))
}

pub fn from_canonical(c: CanonicalPoint) -> Result<HPoint> {
    HPoint::new(c.q, 1.0 / (2.0 * c.p))
}

/// The parameter map written directly in `(q, p)`.
pub fn canonical_step(alpha: Alpha, c: CanonicalPoint) -> Result<CanonicalPoint> {
    let half_inv_p = 1.0 / (2.0 * c.p);
    let b = half_inv_p * half_inv_p + c.q * c.q;
    if b == 0.0 {
        return Err(Error::Degenerate {
            nu: c.q,
            gamma: half_inv_p,
        });
    }
    let al = alpha.value();
    let q = al * c.q * (b - 1.0) / b;
    let p = c.p / al * b / (b + 1.0);
    CanonicalPoint::new(q, p)
}

/// Per-step contraction of the scale dynamics `gamma -> G(gamma)` on the
/// invariant line `nu = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub fixed_scale: f64,
    pub gammas: Vec<f64>,
    pub deviations: Vec<f64>,
    /// `ratios[n] = |gamma_{n+1} - g| / |gamma_n - g|`; `None` once the
    /// deviation sits at rounding level.
    pub ratios: Vec<Option<f64>>,
    /// `alpha` for `alpha >= 1/2`, `1 - alpha` otherwise.
    pub bound: f64,
    /// Steps `n >= 2` where `|gamma_{n+1} - g| > bound |gamma_n - g|`.
    pub violations: Vec<usize>,
    pub bound_holds: bool,
}

pub fn convergence_bound_check(alpha: Alpha, gamma0: f64, n_max: usize) -> Result<ConvergenceReport> {
    if !(gamma0.is_finite() && gamma0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma0",
            value: gamma0,
            reason: "initial scale must be finite and positive",
        });
    }
    if n_max < 3 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: n_max as f64,
            reason: "need at least 3 steps",
        });
    }
    let g_bar = alpha.invariant_scale();
    let mut gammas = Vec::with_capacity(n_max + 1);
    gammas.push(gamma0);
    for n in 0..n_max {
        gammas.push(g_transform(alpha, gammas[n])?);
    }
    let deviations: Vec<f64> = gammas.iter().map(|g| (g - g_bar).abs()).collect();

    // Deviations this small are rounding noise in G, not contraction.
    let floor = 8.0 * f64::EPSILON * g_bar.max(1.0);
    let ratios: Vec<Option<f64>> = (0..n_max)
        .map(|n| (deviations[n] > floor).then(|| deviations[n + 1] / deviations[n]))
        .collect();

    let bound = if alpha.value() >= 0.5 {
        alpha.value()
    } else {
        1.0 - alpha.value()
    };
    let violations: Vec<usize> = (2..n_max)
        .filter(|&n| deviations[n] > floor && deviations[n + 1] > bound * deviations[n] + floor)
        .collect();

    Ok(ConvergenceReport {
        fixed_scale: g_bar,
        gammas,
        deviations,
        ratios,
        bound,
        bound_holds: violations.is_empty(),
        violations,
    })
}

/// Relative distance of one exact step from the linear approximation `x -> alpha x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub nu_error: f64,
    pub gamma_error: f64,
    /// `1 / (nu^2 + gamma^2)`, which both errors equal in exact arithmetic.
    pub bound: f64,
}

pub fn asymptotic_check(alpha: Alpha, x: HPoint) -> Result<AsymptoticReport> {
    x.require_interior()?;
    let next = parameter_step(alpha, x)?;
    let al = alpha.value();
    let nu_error = if x.nu == 0.0 {
        0.0
    } else {
        ((next.nu - al * x.nu) / (al * x.nu)).abs()
    };
    let gamma_error = ((next.gamma - al * x.gamma) / (al * x.gamma)).abs();
    Ok(AsymptoticReport {
        nu_error,
        gamma_error,
        bound: 1.0 / (x.nu * x.nu + x.gamma * x.gamma),
    })
}

/// Iteration budget for reaching the fixed point from a generic start.
pub fn default_iteration_cap(alpha: Alpha) -> usize {
    let a = alpha.value();
    if a == 0.5 {
        60
    } else if (0.2..=0.8).contains(&a) {
        500
    } else {
        5000
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointApproach {
    pub steps: usize,
    pub distance: f64,
    pub converged: bool,
}

/// Iterates until the Euclidean distance to the fixed point drops below `tol`.
pub fn approach_fixed_point(alpha: Alpha, x0: HPoint, tol: f64, max_steps: usize) -> Result<FixedPointApproach> {
    let target = fixed_point(alpha);
    let mut x = x0;
    let mut distance = x.distance(&target);
    for steps in 0..=max_steps {
        if distance < tol {
            return Ok(FixedPointApproach {
                steps,
                distance,
                converged: true,
            });
        }
        if steps == max_steps {
            break;
        }
        x = parameter_step(alpha, x)?;
        distance = x.distance(&target);
    }
    Ok(FixedPointApproach {
        steps: max_steps,
        distance,
        converged: false,
    })
}

//! Geometry of the Cauchy parameter half-plane.
//!
//! The Fisher metric of the Cauchy family is `(dnu^2 + dgamma^2) / (2 gamma^2)`,
//! a scaled Poincaré metric. With `J = dgamma (x) d/dnu - dnu (x) d/dgamma` it
//! carries the two-form `omega(X, Y) = g(JX, Y) = -dnu ^ dgamma / (2 gamma^2)`.
//! The parameter map pulls the metric back to a multiple of itself, with a
//! factor `1 - 4 gamma^2 / (1 + A)^2` that does not depend on `alpha`.
//!
//! Most checks here come in pairs: a closed form and a numerical route
//! (quadrature or central differences) computed without it.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::cauchy::CauchyParams;
use crate::diff::{central_gradient, central_jacobian};
use crate::error::{Error, Result};
use crate::orbit::Alpha;
use crate::params::{
    canonical_step, jacobian_analytic, parameter_components, parameter_step, CanonicalPoint, HPoint, Jacobian2,
    TangentVector,
};
use crate::quadrature::{integrate_many, QuadOptions};

/// Symmetric 2x2 tensor in `(nu, gamma)` components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric2 {
    pub g_nn: f64,
    pub g_ng: f64,
    pub g_gg: f64,
}

impl Metric2 {
    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.g_nn, self.g_ng], [self.g_ng, self.g_gg]]
    }

    fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        Self {
            g_nn: m[0][0],
            g_ng: 0.5 * (m[0][1] + m[1][0]),
            g_gg: m[1][1],
        }
    }

    pub fn det(&self) -> f64 {
        self.g_nn * self.g_gg - self.g_ng * self.g_ng
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g_nn > 0.0 && self.det() > 0.0
    }

    pub fn inner(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        self.g_nn * x[0] * y[0] + self.g_ng * (x[0] * y[1] + x[1] * y[0]) + self.g_gg * x[1] * y[1]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            g_nn: c * self.g_nn,
            g_ng: c * self.g_ng,
            g_gg: c * self.g_gg,
        }
    }

    /// `J^T g J`: the tensor pulled back through a map with Jacobian `J`.
    pub fn pullback(&self, jac: &Jacobian2) -> Self {
        let g = self.as_matrix();
        let j = jac.m;
        let mut out = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        out[a][b] += j[c][a] * g[c][d] * j[d][b];
                    }
                }
            }
        }
        Self::from_matrix(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.g_nn.abs().max(self.g_ng.abs()).max(self.g_gg.abs())
    }

    pub fn max_abs_diff(&self, other: &Metric2) -> f64 {
        (self.g_nn - other.g_nn)
            .abs()
            .max((self.g_ng - other.g_ng).abs())
            .max((self.g_gg - other.g_gg).abs())
    }
}

fn fisher_scale(nu: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Boundary { nu, gamma });
    }
    Ok(0.5 / (gamma * gamma))
}

/// Closed-form Fisher metric, `diag(1, 1) / (2 gamma^2)`.
pub fn fisher_metric(x: HPoint) -> Result<Metric2> {
    let s = fisher_scale(x.nu(), x.gamma())?;
    Ok(Metric2 {
        g_nn: s,
        g_ng: 0.0,
        g_gg: s,
    })
}

/// The Fisher information integral `E[d_a ln p  d_b ln p]` evaluated by
/// adaptive quadrature after substituting `xi = nu + gamma tan(theta)`.
pub fn fisher_metric_quadrature(x: HPoint) -> Result<Metric2> {
    fisher_metric_quadrature_with(x, QuadOptions::default())
}

pub fn fisher_metric_quadrature_with(x: HPoint, opts: QuadOptions) -> Result<Metric2> {
    if x.is_boundary() {
        return Err(Error::Boundary {
            nu: x.nu(),
            gamma: x.gamma(),
        });
    }
    let (nu, gamma) = (x.nu(), x.gamma());
    let law = CauchyParams::new(nu, gamma)?;
    let integrand = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let xi = nu + gamma * sin / cos;
        let jacobian = gamma / (cos * cos);
        let weight = law.pdf(xi) * jacobian;
        let d = xi - nu;
        let denom = d * d + gamma * gamma;
        let score_nu = 2.0 * d / denom;
        let score_gamma = 1.0 / gamma - 2.0 * gamma / denom;
        [
            score_nu * score_nu * weight,
            score_nu * score_gamma * weight,
            score_gamma * score_gamma * weight,
        ]
    };
    let [nn, ng, gg] = integrate_many(integrand, -0.5 * PI, 0.5 * PI, opts)?;
    Ok(Metric2 {
        g_nn: nn.value,
        g_ng: ng.value,
        g_gg: gg.value,
    })
}

/// `1 - 4 gamma^2 / (1 + nu^2 + gamma^2)^2`.
pub fn conformal_factor(x: HPoint) -> Result<f64> {
    if x.is_boundary() {
        return Err(Error::Boundary {
            nu: x.nu(),
            gamma: x.gamma(),
        });
    }
    let s = 1.0 + x.nu() * x.nu() + x.gamma() * x.gamma();
    let r = 2.0 * x.gamma() / s;
    Ok(1.0 - r * r)
}

/// Fisher metric at the image point pulled back through the analytic Jacobian,
/// divided by the metric at `x`. Returns the `nn` and `gg` ratios.
pub fn pullback_ratio(alpha: Alpha, x: HPoint) -> Result<(f64, f64)> {
    let image = parameter_step(alpha, x)?;
    let pulled = fisher_metric(image)?.pullback(&jacobian_analytic(alpha, x)?);
    let g = fisher_metric(x)?;
    Ok((pulled.g_nn / g.g_nn, pulled.g_gg / g.g_gg))
}

/// Largest entrywise gap between the finite-difference pullback of the Fisher
/// metric under one parameter step and `conformal_factor(x) g(x)`.
pub fn verify_conformal_pullback(alpha: Alpha, x: HPoint, h: f64) -> Result<f64> {
    let origin = HPoint::new(0.0, 1.0)?;
    if x.is_boundary() || x.distance(&origin) <= 10.0 * h || x.gamma() <= h {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x.distance(&origin),
            reason: "pullback check needs an interior point away from (0, 1)",
        });
    }
    let jac = central_jacobian(|nu, gamma| parameter_components(alpha, nu, gamma), x.nu(), x.gamma(), h)?;
    let pulled = fisher_metric(parameter_step(alpha, x)?)?.pullback(&jac);
    let target = fisher_metric(x)?.scaled(conformal_factor(x)?);
    Ok(pulled.max_abs_diff(&target))
}

/// The three Killing fields of the Poincaré half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KillingField {
    /// `(nu^2 - gamma^2) d/dnu + 2 nu gamma d/dgamma`
    K1,
    /// `nu d/dnu + gamma d/dgamma`
    K2,
    /// `d/dnu`
    K3,
}

impl KillingField {
    pub const ALL: [KillingField; 3] = [KillingField::K1, KillingField::K2, KillingField::K3];

    pub fn components(self, nu: f64, gamma: f64) -> [f64; 2] {
        match self {
            KillingField::K1 => [nu * nu - gamma * gamma, 2.0 * nu * gamma],
            KillingField::K2 => [nu, gamma],
            KillingField::K3 => [1.0, 0.0],
        }
    }

    /// `d[a][c] = d_a K^c`.
    pub fn derivative(self, nu: f64, gamma: f64) -> [[f64; 2]; 2] {
        match self {
            KillingField::K1 => [[2.0 * nu, 2.0 * gamma], [-2.0 * gamma, 2.0 * nu]],
            KillingField::K2 => [[1.0, 0.0], [0.0, 1.0]],
            KillingField::K3 => [[0.0; 2]; 2],
        }
    }
}

pub fn killing_fields(x: HPoint) -> Result<[TangentVector; 3]> {
    let mut out = Vec::with_capacity(3);
    for k in KillingField::ALL {
        let [a, b] = k.components(x.nu(), x.gamma());
        out.push(TangentVector::new(x, a, b)?);
    }
    Ok([out[0], out[1], out[2]])
}

fn require_fd_room(x: HPoint, h: f64) -> Result<()> {
    if x.is_boundary() || x.gamma() <= h {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: x.gamma(),
            reason: "finite differences need gamma > h",
        });
    }
    Ok(())
}

/// `(L_K g)_ab = K^c d_c g_ab + g_cb d_a K^c + g_ac d_b K^c`, with `d_c g_ab`
/// from central differences of the Fisher metric.
pub fn lie_derivative_metric(field: KillingField, x: HPoint, h: f64) -> Result<Metric2> {
    require_fd_room(x, h)?;
    let (nu, gamma) = (x.nu(), x.gamma());
    let at = |n: f64, g: f64| fisher_metric(HPoint::new(n, g).expect("interior")).expect("interior").as_matrix();
    let (plus_n, minus_n) = (at(nu + h, gamma), at(nu - h, gamma));
    let (plus_g, minus_g) = (at(nu, gamma + h), at(nu, gamma - h));
    let mut dg = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            dg[0][a][b] = (plus_n[a][b] - minus_n[a][b]) / (2.0 * h);
            dg[1][a][b] = (plus_g[a][b] - minus_g[a][b]) / (2.0 * h);
        }
    }
    let g = fisher_metric(x)?.as_matrix();
    let k = field.components(nu, gamma);
    let dk = field.derivative(nu, gamma);
    let mut lie = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = 0.0;
            for c in 0..2 {
                v += k[c] * dg[c][a][b] + g[c][b] * dk[a][c] + g[a][c] * dk[b][c];
            }
            lie[a][b] = v;
        }
    }
    Ok(Metric2::from_matrix(lie))
}

/// Coefficient of `dnu ^ dgamma` in `L_K omega`.
pub fn lie_derivative_symplectic(field: KillingField, x: HPoint, h: f64) -> Result<f64> {
    require_fd_room(x, h)?;
    let (nu, gamma) = (x.nu(), x.gamma());
    let w = |n: f64, g: f64| symplectic_form(HPoint::new(n, g).expect("interior")).expect("interior").omega_ng;
    let grad = central_gradient(w, nu, gamma, h);
    let k = field.components(nu, gamma);
    let dk = field.derivative(nu, gamma);
    let divergence = dk[0][0] + dk[1][1];
    Ok(k[0] * grad[0] + k[1] * grad[1] + w(nu, gamma) * divergence)
}

/// The almost complex structure `J = dgamma (x) d/dnu - dnu (x) d/dgamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlmostComplexJ {
    pub base: HPoint,
}

impl AlmostComplexJ {
    pub fn at(base: HPoint) -> Self {
        Self { base }
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [v[1], -v[0]]
    }
}

/// Largest deviation of `J J` from `-Id` on the coordinate basis.
pub fn j_squared_check(x: HPoint) -> f64 {
    let j = AlmostComplexJ::at(x);
    let mut worst = 0.0_f64;
    for e in [[1.0, 0.0], [0.0, 1.0]] {
        let jj = j.apply(j.apply(e));
        worst = worst.max((jj[0] + e[0]).abs()).max((jj[1] + e[1]).abs());
    }
    worst
}

/// `|g(JX, JY) - g(X, Y)|`.
pub fn hermitian_defect(x: HPoint, v: [f64; 2], w: [f64; 2]) -> Result<f64> {
    let g = fisher_metric(x)?;
    let j = AlmostComplexJ::at(x);
    Ok((g.inner(j.apply(v), j.apply(w)) - g.inner(v, w)).abs())
}

/// A two-form on the plane, `omega_ng dnu ^ dgamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoForm {
    pub omega_ng: f64,
}

impl TwoForm {
    pub fn evaluate(&self, v: [f64; 2], w: [f64; 2]) -> f64 {
        self.omega_ng * (v[0] * w[1] - v[1] * w[0])
    }
}

/// `omega = -dnu ^ dgamma / (2 gamma^2)`.
pub fn symplectic_form(x: HPoint) -> Result<TwoForm> {
    Ok(TwoForm {
        omega_ng: -fisher_scale(x.nu(), x.gamma())?,
    })
}

/// `g(JX, Y)`, the other route to `omega(X, Y)`.
pub fn kahler_pairing(x: HPoint, v: [f64; 2], w: [f64; 2]) -> Result<f64> {
    let g = fisher_metric(x)?;
    Ok(g.inner(AlmostComplexJ::at(x).apply(v), w))
}

/// `omega` rewritten in the coordinates `(q, p) = (nu, 1/(2 gamma))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Coefficient of `dq ^ dp`.
    pub dq_dp: f64,
}

impl CanonicalForm {
    /// Coefficient of `dp ^ dq`.
    pub fn dp_dq(&self) -> f64 {
        -self.dq_dp
    }
}

/// Pulls `omega` back through `(q, p) -> (q, 1/(2p))`: the coefficient picks up
/// the Jacobian determinant `d(nu, gamma)/d(q, p) = -1/(2 p^2)`.
pub fn canonical_form(c: CanonicalPoint) -> Result<CanonicalForm> {
    let gamma = 1.0 / (2.0 * c.p());
    let omega = symplectic_form(HPoint::new(c.q(), gamma)?)?;
    let det = -1.0 / (2.0 * c.p() * c.p());
    Ok(CanonicalForm {
        dq_dp: omega.omega_ng * det,
    })
}

/// `|det D(canonical_step) - 1|` from a central-difference Jacobian.
pub fn symplectic_defect(alpha: Alpha, c: CanonicalPoint, h: f64) -> Result<f64> {
    if c.p() <= h {
        return Err(Error::InvalidParameter {
            name: "p",
            value: c.p(),
            reason: "finite differences need p > h",
        });
    }
    let jac = central_jacobian(
        |q, p| {
            let next = canonical_step(alpha, CanonicalPoint::new(q, p)?)?;
            Ok((next.q(), next.p()))
        },
        c.q(),
        c.p(),
        h,
    )?;
    Ok((jac.det() - 1.0).abs())
}

/// Levi-Civita symbols `Gamma[a][b][c] = Gamma_ab^c` of the Fisher metric.
///
/// For `g = g0 (dx^2 + dy^2)` with `g0 = 1/(2 y^2)`, `Gamma_x = d_x g0 / (2 g0) = 0`
/// and `Gamma_y = -d_y g0 / (2 g0) = 1/y`.
pub fn christoffel(x: HPoint) -> Result<[[[f64; 2]; 2]; 2]> {
    if !(x.gamma() > 0.0) {
        return Err(Error::Boundary {
            nu: x.nu(),
            gamma: x.gamma(),
        });
    }
    let gx = 0.0;
    let gy = 1.0 / x.gamma();
    let mut s = [[[0.0; 2]; 2]; 2];
    s[0][0] = [gx, gy];
    s[0][1] = [-gy, gx];
    s[1][0] = [-gy, gx];
    s[1][1] = [-gx, -gy];
    Ok(s)
}

/// Largest violation of `d_c g_ab = Gamma_ca^d g_db + Gamma_cb^d g_ad`, with the
/// metric derivatives from central differences.
pub fn metric_compatibility_defect(x: HPoint, h: f64) -> Result<f64> {
    require_fd_room(x, h)?;
    let (nu, gamma) = (x.nu(), x.gamma());
    let at = |n: f64, g: f64| fisher_metric(HPoint::new(n, g).expect("interior")).expect("interior").as_matrix();
    let (pn, mn, pg, mg) = (at(nu + h, gamma), at(nu - h, gamma), at(nu, gamma + h), at(nu, gamma - h));
    let g = at(nu, gamma);
    let s = christoffel(x)?;
    let mut worst = 0.0_f64;
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let dg = if c == 0 {
                    (pn[a][b] - mn[a][b]) / (2.0 * h)
                } else {
                    (pg[a][b] - mg[a][b]) / (2.0 * h)
                };
                let mut rhs = 0.0;
                for d in 0..2 {
                    rhs += s[c][a][d] * g[d][b] + s[c][b][d] * g[a][d];
                }
                worst = worst.max((dg - rhs).abs());
            }
        }
    }
    Ok(worst)
}

/// Geodesic distance of the Fisher metric, `acosh(1 + |dx|^2 / (2 g1 g2)) / sqrt(2)`.
pub fn fisher_distance(a: HPoint, b: HPoint) -> Result<f64> {
    if a.is_boundary() || b.is_boundary() {
        return Err(Error::Boundary {
            nu: a.nu(),
            gamma: a.gamma().min(b.gamma()),
        });
    }
    let d2 = (a.nu() - b.nu()).powi(2) + (a.gamma() - b.gamma()).powi(2);
    Ok((1.0 + d2 / (2.0 * a.gamma() * b.gamma())).acosh() / SQRT_2)
}

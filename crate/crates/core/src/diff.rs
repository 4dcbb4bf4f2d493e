//! Central finite differences on the plane.

use crate::error::Result;
use crate::params::Jacobian2;

/// Central-difference Jacobian of `f` at `(x, y)` with step `h`.
pub fn central_jacobian<F>(f: F, x: f64, y: f64, h: f64) -> Result<Jacobian2>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    let (a_px, b_px) = f(x + h, y)?;
    let (a_mx, b_mx) = f(x - h, y)?;
    let (a_py, b_py) = f(x, y + h)?;
    let (a_my, b_my) = f(x, y - h)?;
    let s = 2.0 * h;
    Ok(Jacobian2 {
        m: [
            [(a_px - a_mx) / s, (a_py - a_my) / s],
            [(b_px - b_mx) / s, (b_py - b_my) / s],
        ],
    })
}

/// Central-difference gradient of a scalar field.
pub fn central_gradient<F>(f: F, x: f64, y: f64, h: f64) -> [f64; 2]
where
    F: Fn(f64, f64) -> f64,
{
    let s = 2.0 * h;
    [(f(x + h, y) - f(x - h, y)) / s, (f(x, y + h) - f(x, y - h)) / s]
}

//! The orbital picture: the generalized Boole transform `F(x) = alpha (x - 1/x)`,
//! its companion `G(g) = alpha (g + 1/g)`, preimages, and orbits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the guard ball around the pole at 0.
pub const DEFAULT_POLE_EPSILON: f64 = 1e-300;

/// Map parameter, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Scale of the invariant Cauchy density, `sqrt(alpha / (1 - alpha))`.
    pub fn invariant_scale(self) -> f64 {
        (self.0 / (1.0 - self.0)).sqrt()
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(alpha: Alpha) -> f64 {
        alpha.0
    }
}

/// A finite, nonzero point of the punctured real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitState(f64);

impl OrbitState {
    pub fn new(xi: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "xi",
                value: xi,
                reason: "orbit state must be finite",
            });
        }
        if xi.abs() < DEFAULT_POLE_EPSILON {
            return Err(Error::Singular {
                value: xi,
                epsilon: DEFAULT_POLE_EPSILON,
            });
        }
        Ok(Self(xi))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn boole_transform(alpha: Alpha, xi: f64) -> Result<f64> {
    boole_transform_guarded(alpha, xi, DEFAULT_POLE_EPSILON)
}

/// `alpha (xi - 1/xi)`, refusing inputs within `epsilon` of the pole.
pub fn boole_transform_guarded(alpha: Alpha, xi: f64, epsilon: f64) -> Result<f64> {
    if !(xi.abs() >= epsilon) {
        return Err(Error::Singular { value: xi, epsilon });
    }
    Ok(alpha.0 * (xi - 1.0 / xi))
}

/// `alpha (gamma + 1/gamma)` on the positive half-line.
pub fn g_transform(alpha: Alpha, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Singular {
            value: gamma,
            epsilon: 0.0,
        });
    }
    Ok(alpha.0 * (gamma + 1.0 / gamma))
}

/// The Boole transform continued to the complex plane.
pub fn boole_transform_complex(alpha: Alpha, z: Complex64) -> Complex64 {
    (z - z.inv()) * alpha.0
}

/// `G` continued to the complex plane.
pub fn g_transform_complex(alpha: Alpha, z: Complex64) -> Complex64 {
    (z + z.inv()) * alpha.0
}

/// The two preimages `(xi_minus, xi_plus)` of `xi_prime`, with `xi_minus < 0 < xi_plus`.
///
/// The larger-magnitude root comes from the quadratic formula with the sign of
/// `xi_prime`; the other follows from the product `xi_minus * xi_plus = -1`.
pub fn preimages(alpha: Alpha, xi_prime: f64) -> (f64, f64) {
    let a2 = 2.0 * alpha.0;
    let disc = xi_prime.hypot(a2);
    if xi_prime >= 0.0 {
        let plus = (xi_prime + disc) / a2;
        (-1.0 / plus, plus)
    } else {
        let minus = (xi_prime - disc) / a2;
        (minus, -1.0 / minus)
    }
}

/// Orbit of the Boole transform, possibly cut short at the pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub states: Vec<f64>,
    /// Index of the last state that was computed before an iterate fell into
    /// the pole guard.
    pub truncated_at: Option<usize>,
}

impl Orbit {
    pub fn is_truncated(&self) -> bool {
        self.truncated_at.is_some()
    }
}

pub fn iterate_orbit(alpha: Alpha, xi0: OrbitState, n: usize) -> Orbit {
    iterate_orbit_guarded(alpha, xi0, n, DEFAULT_POLE_EPSILON)
}

/// Iterates `n` times from `xi0`. If an iterate lands inside the guard ball the
/// orbit stops there: that iterate is kept and `truncated_at` records its index.
pub fn iterate_orbit_guarded(alpha: Alpha, xi0: OrbitState, n: usize, epsilon: f64) -> Orbit {
    let mut states = Vec::with_capacity(n + 1);
    let mut xi = xi0.value();
    states.push(xi);
    for _ in 0..n {
        match boole_transform_guarded(alpha, xi, epsilon) {
            Ok(next) => {
                xi = next;
                states.push(xi);
            }
            Err(_) => {
                let last = states.len() - 1;
                return Orbit {
                    states,
                    truncated_at: Some(last),
                };
            }
        }
    }
    Orbit {
        states,
        truncated_at: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn alpha_range() {
        for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(Alpha::new(bad).is_err());
        }
        assert!(Alpha::new(0.5).is_ok());
        assert_eq!(a(0.8).invariant_scale(), 2.0);
    }

    #[test]
    fn boole_values() {
        assert_eq!(boole_transform(a(0.5), 1.0).unwrap(), 0.0);
        assert_eq!(boole_transform(a(0.5), 2.0).unwrap(), 0.75);
        assert_eq!(boole_transform(a(0.5), -1.0).unwrap(), 0.0);
    }

    #[test]
    fn boole_rejects_pole() {
        assert!(matches!(
            boole_transform(a(0.5), 0.0),
            Err(Error::Singular { .. })
        ));
        assert!(boole_transform(a(0.5), 1e-301).is_err());
        assert!(boole_transform_guarded(a(0.5), 1e-3, 1e-2).is_err());
        assert!(boole_transform_guarded(a(0.5), f64::NAN, 1e-2).is_err());
    }

    #[test]
    fn g_values() {
        assert_eq!(g_transform(a(0.5), 1.0).unwrap(), 1.0);
        assert_eq!(g_transform(a(0.5), 2.0).unwrap(), 1.25);
        assert!((g_transform(a(0.8), 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(g_transform(a(0.5), 0.0).is_err());
        assert!(g_transform(a(0.5), -1.0).is_err());
    }

    #[test]
    fn preimage_values() {
        let (m, p) = preimages(a(0.5), 0.0);
        assert_eq!((m, p), (-1.0, 1.0));
        let (m, p) = preimages(a(0.5), 0.75);
        assert!((m + 0.5).abs() < 1e-15 && (p - 2.0).abs() < 1e-15);
        let (m, p) = preimages(a(0.5), -0.75);
        assert!((m + 2.0).abs() < 1e-15 && (p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn preimages_survive_huge_arguments() {
        let alpha = a(0.3);
        let (m, p) = preimages(alpha, 1e200);
        assert!((p * alpha.value() / 1e200 - 1.0).abs() < 1e-15);
        assert!((m * p + 1.0).abs() < 1e-15);
        let (m, p) = preimages(alpha, -1e200);
        assert!((m * alpha.value() / -1e200 - 1.0).abs() < 1e-15);
        assert!((m * p + 1.0).abs() < 1e-15);
    }

    #[test]
    fn orbit_hitting_pole_is_truncated() {
        let orbit = iterate_orbit(a(0.5), OrbitState::new(1.0).unwrap(), 3);
        assert_eq!(orbit.states, vec![1.0, 0.0]);
        assert_eq!(orbit.truncated_at, Some(1));
    }

    #[test]
    fn short_orbit() {
        let orbit = iterate_orbit(a(0.5), OrbitState::new(2.0).unwrap(), 2);
        assert!(!orbit.is_truncated());
        assert_eq!(orbit.states.len(), 3);
        assert_eq!(orbit.states[1], 0.75);
        let third = 0.5 * (0.75 - 1.0 / 0.75);
        assert!((orbit.states[2] - third).abs() < 1e-16);
        assert!((orbit.states[2] + 0.291_666_666_666_666_6).abs() < 1e-15);
    }

    #[test]
    fn zero_length_orbit() {
        let orbit = iterate_orbit(a(0.5), OrbitState::new(3.0).unwrap(), 0);
        assert_eq!(orbit.states, vec![3.0]);
        assert!(!orbit.is_truncated());
    }

    #[test]
    fn orbit_state_rejects_pole_and_nan() {
        assert!(OrbitState::new(0.0).is_err());
        assert!(OrbitState::new(f64::NAN).is_err());
        assert!(OrbitState::new(f64::INFINITY).is_err());
    }

    #[test]
    fn complex_maps_reduce_to_real_ones() {
        let alpha = a(0.7);
        let z = boole_transform_complex(alpha, Complex64::new(2.5, 0.0));
        assert_eq!(z.im, 0.0);
        assert!((z.re - boole_transform(alpha, 2.5).unwrap()).abs() < 1e-15);
        let w = g_transform_complex(alpha, Complex64::new(2.5, 0.0));
        assert!((w.re - g_transform(alpha, 2.5).unwrap()).abs() < 1e-15);
    }
}

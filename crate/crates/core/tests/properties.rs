use proptest::prelude::*;

use boole_pf::cauchy::CauchyParams;
use boole_pf::diff::central_jacobian;
use boole_pf::geometry::conformal_factor;
use boole_pf::orbit::{boole_transform, preimages, Alpha};
use boole_pf::params::{
    canonical_step, complex_s_step, from_canonical, jacobian_analytic, parameter_components, parameter_step, reflect,
    to_canonical, HPoint,
};

fn alpha() -> impl Strategy<Value = Alpha> {
    (0.01f64..0.99).prop_map(|a| Alpha::new(a).unwrap())
}

fn point() -> impl Strategy<Value = HPoint> {
    (-20.0f64..20.0, 0.01f64..20.0).prop_map(|(n, g)| HPoint::new(n, g).unwrap())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn preimages_map_back(al in alpha(), x in -1e6f64..1e6) {
        let (m, p) = preimages(al, x);
        prop_assert!(m < 0.0 && p > 0.0);
        prop_assert!(close(m * p, -1.0, 1e-15));
        prop_assert!(close(boole_transform(al, m).unwrap(), x, 1e-12));
        prop_assert!(close(boole_transform(al, p).unwrap(), x, 1e-12));
    }

    #[test]
    fn boole_transform_is_odd(al in alpha(), x in 1e-6f64..1e6) {
        prop_assert_eq!(boole_transform(al, -x).unwrap(), -boole_transform(al, x).unwrap());
    }

    #[test]
    fn upper_half_plane_is_invariant(al in alpha(), x in point()) {
        let y = parameter_step(al, x).unwrap();
        prop_assert!(y.gamma() > 0.0 && !y.is_boundary());
    }

    #[test]
    fn step_commutes_with_reflection(al in alpha(), x in point()) {
        prop_assert_eq!(parameter_step(al, reflect(x)).unwrap(), reflect(parameter_step(al, x).unwrap()));
    }

    #[test]
    fn step_is_the_complex_boole_transform(al in alpha(), x in point()) {
        let y = parameter_step(al, x).unwrap();
        let (s, _) = complex_s_step(al, x).unwrap();
        prop_assert!(close(s.re, y.nu(), 1e-13) && close(-s.im, y.gamma(), 1e-13));
    }

    #[test]
    fn canonical_step_is_the_parameter_step(al in alpha(), x in point()) {
        let via_h = to_canonical(parameter_step(al, x).unwrap()).unwrap();
        let direct = canonical_step(al, to_canonical(x).unwrap()).unwrap();
        prop_assert!(close(via_h.q(), direct.q(), 1e-12) && close(via_h.p(), direct.p(), 1e-12));
        let back = from_canonical(to_canonical(x).unwrap()).unwrap();
        prop_assert!(close(back.gamma(), x.gamma(), 1e-15));
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences(al in alpha(), n in -3.0f64..3.0, g in 0.2f64..3.0) {
        let x = HPoint::new(n, g).unwrap();
        let j = jacobian_analytic(al, x).unwrap();
        let fd = central_jacobian(|a, b| parameter_components(al, a, b), n, g, 1e-6).unwrap();
        prop_assert!(j.max_abs_diff(&fd) < 1e-6);
    }

    #[test]
    fn conformal_factor_range(x in point()) {
        let f = conformal_factor(x).unwrap();
        prop_assert!((0.0..1.0).contains(&f));
        if x.distance(&HPoint::new(0.0, 1.0).unwrap()) > 1e-6 {
            prop_assert!(f >= 1e-12 * 0.99);
        }
    }

    #[test]
    fn cauchy_quantile_inverts_cdf(nu in -50.0f64..50.0, g in 0.01f64..50.0, u in 1e-9f64..(1.0 - 1e-9)) {
        let c = CauchyParams::new(nu, g).unwrap();
        let x = c.quantile(u).unwrap();
        prop_assert!((c.cdf(x) - u).abs() < 1e-12);
        prop_assert!((c.cdf(x) + c.sf(x) - 1.0).abs() < 1e-15);
    }
}

use std::f64::consts::PI;

use polysym::dual::{
    self, harmonic_odd_projection, lambda_m, odd_part_norm, FractionalDerivInput, RadialBody, SphereQuadrature,
};
use polysym::dual::harmonics::odd_degrees;
use polysym::symmetry::Verdict;
use polysym::{zoo, SquareMatrix, Vector};

fn shifted(c: [f64; 3], r: f64) -> RadialBody {
    RadialBody::shifted_ball(Vector::from(c), r).unwrap()
}

fn zoo_bodies() -> Vec<(&'static str, RadialBody, bool)> {
    let rot = {
        let (c, s) = (0.6f64, 0.8f64);
        SquareMatrix::from_columns(vec![
            Vector::from([c, s, 0.0]),
            Vector::from([-1.5 * s, 1.5 * c, 0.0]),
            Vector::from([0.0, 0.0, 0.7]),
        ])
        .unwrap()
    };
    vec![
        ("ball", RadialBody::ball(3, 1.3).unwrap(), true),
        ("ellipsoid", RadialBody::ellipsoid_axes(&[1.0, 1.5, 2.0], Vector::zeros(3)).unwrap(), true),
        ("rotated ellipsoid", RadialBody::ellipsoid(rot.clone(), Vector::zeros(3)).unwrap(), true),
        ("shifted ball", shifted([0.0, 0.0, 0.2], 1.0), false),
        ("oblique shifted ball", shifted([0.3, -0.1, 0.15], 1.0), false),
        (
            "translated ellipsoid",
            RadialBody::ellipsoid(rot, Vector::from([0.1, 0.2, -0.1])).unwrap(),
            false,
        ),
    ]
}

#[test]
fn radial_sum_expansion() {
    let quad = SphereQuadrature::default_for(3).unwrap();
    for body in [RadialBody::ball(3, 1.0).unwrap(), RadialBody::ellipsoid_axes(&[1.0, 1.5, 2.0], Vector::zeros(3)).unwrap()] {
        let w: Vec<f64> = (0..=3).map(|l| dual::dual_quermassintegral(&body, l).unwrap()).collect();
        for t in [0.1, 0.5] {
            let direct = quad.integrate(|x| (body.radial(x).unwrap() + t).powi(3)) / 3.0;
            let binom = [1.0, 3.0, 3.0, 1.0];
            let expanded: f64 = (0..=3).map(|l| binom[l] * w[l] * t.powi(l as i32)).sum();
            assert!((direct - expanded).abs() <= 1e-9 * direct, "t = {t}: {direct} vs {expanded}");
        }
    }
}

#[test]
fn zeroth_dual_quermassintegral_is_volume() {
    let cases: Vec<(RadialBody, f64, f64)> = vec![
        (RadialBody::ball(3, 2.0).unwrap(), 4.0 * PI / 3.0 * 8.0, 1e-12),
        (RadialBody::ellipsoid_axes(&[1.0, 1.5, 2.0], Vector::zeros(3)).unwrap(), 4.0 * PI, 1e-10),
        (shifted([0.1, 0.2, -0.3], 1.0), 4.0 * PI / 3.0, 1e-8),
        (RadialBody::ball(4, 1.0).unwrap(), PI * PI / 2.0, 1e-10),
        // ρ is only piecewise smooth for polytopes
        (RadialBody::polytope(zoo::cube(3)).unwrap(), 8.0, 1e-2),
        (RadialBody::polytope(zoo::cross_polytope(3)).unwrap(), 4.0 / 3.0, 1e-2),
    ];
    for (body, vol, tol) in cases {
        let w0 = dual::dual_quermassintegral(&body, 0).unwrap();
        assert!((w0 - vol).abs() <= tol * vol, "{w0} vs {vol}");
    }
}

#[test]
fn fractional_derivative_approaches_classical_values() {
    // e^{−2t} has h^(q)(0) = 2^q; e^{−t} would be constant in q
    let inp = FractionalDerivInput::new(|t: f64| (-2.0 * t).exp(), vec![1.0, -2.0, 4.0]);
    for k in [1.0f64, 2.0] {
        let exact = 2f64.powf(k);
        for sign in [-1.0, 1.0] {
            let e2 = (dual::fractional_derivative(&inp, k + sign * 1e-2).unwrap() - exact).abs();
            let e3 = (dual::fractional_derivative(&inp, k + sign * 1e-3).unwrap() - exact).abs();
            assert!(e3 < e2, "k = {k}, sign {sign}: {e2} then {e3}");
        }
    }
    for (n, l, m) in [(3, 0, 1), (3, 1, 3), (4, 1, 1), (4, 2, 5)] {
        let at = lambda_m(n, l, m, 1.0).unwrap();
        let e2 = (lambda_m(n, l, m, 1.0 - 1e-2).unwrap() - at).abs();
        let e3 = (lambda_m(n, l, m, 1.0 - 1e-3).unwrap() - at).abs();
        assert!(e3 < e2, "n={n} l={l} m={m}: {e2} then {e3}");
    }
}

#[test]
fn odd_norm_and_odd_harmonics_agree() {
    let quad = SphereQuadrature::default_for(3).unwrap();
    for (name, body, symmetric) in zoo_bodies() {
        let g = |x: &Vector| body.radial(x).unwrap().ln();
        let norm = odd_part_norm(g, &quad);
        let coeffs = harmonic_odd_projection(g, &odd_degrees(7), &quad).unwrap();
        let max = coeffs.iter().map(|c| c.value.abs()).fold(0.0, f64::max);
        assert_eq!(norm <= 1e-8, max <= 1e-6, "{name}: norm {norm}, largest coefficient {max}");
        assert_eq!(norm <= 1e-8, symmetric, "{name}");
    }
}

#[test]
fn dual_test_both_ways() {
    for (name, body, symmetric) in zoo_bodies() {
        let rep = dual::dual_symmetry_test(&body, 1, 24, 1e-6).unwrap();
        if symmetric {
            assert_eq!(rep.verdict, Verdict::Pass, "{name}");
            assert!(rep.max_abs_derivative < 1e-6, "{name}: {}", rep.max_abs_derivative);
        } else {
            assert_eq!(rep.verdict, Verdict::Fail, "{name}");
            assert!(rep.worst_relative_margin > 1e-4, "{name}");
        }
    }
}

#[test]
fn section_values_match_closed_forms() {
    let ball = RadialBody::ball(3, 1.0).unwrap();
    let e3 = Vector::unit(3, 2);
    for t in [0.0, 0.3, 0.6, -0.8] {
        let v = dual::section_dual_quermassintegral(&ball, &e3, t, 1).unwrap();
        assert!((v - PI * (1.0 - t * t).sqrt()).abs() < 1e-10, "t = {t}");
    }
    // shifted ball along its axis: a disc of radius √(R² − (t − c)²) centred on the axis
    let s = shifted([0.0, 0.0, 0.2], 1.0);
    let v = dual::section_dual_quermassintegral(&s, &e3, 0.5, 1).unwrap();
    assert!((v - PI * (1.0 - 0.09f64).sqrt()).abs() < 1e-10);
    // section volume (l = 0) of an ellipsoid slice: π a b (1 − t²/c²)
    let e = RadialBody::ellipsoid_axes(&[1.0, 1.5, 2.0], Vector::zeros(3)).unwrap();
    let v = dual::section_dual_quermassintegral(&e, &e3, 1.0, 0).unwrap();
    assert!((v - PI * 1.5 * 0.75).abs() < 1e-9);
    assert!(dual::section_dual_quermassintegral(&ball, &e3, 1.2, 1).is_err());
}

#[test]
fn limit_identity_on_the_zoo() {
    let quad = SphereQuadrature::default_for(3).unwrap();
    let s = shifted([0.0, 0.0, 0.2], 1.0);
    for (l, m) in [(1, 1), (0, 1), (1, 3)] {
        let id = dual::verify_limit_identity(&s, l, m, &quad).unwrap();
        assert!(
            (id.lhs - id.rhs).abs() <= 0.02 * id.rhs.abs(),
            "l={l} m={m}: {} vs {}",
            id.lhs,
            id.rhs
        );
        assert!(id.rhs.abs() > 1e-4);
    }
    let e = RadialBody::ellipsoid_axes(&[1.0, 1.5, 2.0], Vector::zeros(3)).unwrap();
    let id = dual::verify_limit_identity(&e, 1, 1, &quad).unwrap();
    assert!(id.lhs.abs() <= 1e-6 && id.rhs.abs() <= 1e-6, "{id:?}");
}

mod common;

use common::*;
use polysym::linalg::{det_columns, det_derivative};
use polysym::sections::{self, SectionEvaluator};
use polysym::symmetry::{self, TestConfig};
use polysym::{zoo, Polytope, Vector};
use proptest::prelude::*;
use rand::Rng;

/// Random polytope and a cut through its interior away from all vertices.
fn setup(seed: u64, n: usize) -> (Polytope, Vector, f64) {
    let mut rng = rng(seed);
    let p = zoo::random_hull_around_origin(&mut rng, n, n + 6, 0.05);
    loop {
        let xi = zoo::random_unit(&mut rng, n);
        let t = rng.random_range(-0.3..0.3);
        if vertex_gap(&p, &xi, t) > 1e-4 && vertex_gap(&p, &xi, -t) > 1e-4 {
            return (p, xi, t);
        }
    }
}

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![3 => Just(3usize), 1 => Just(4usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn translation_covariance(seed in any::<u64>(), n in dims(), shift in prop::collection::vec(-2.0f64..2.0, 4)) {
        let (p, xi, t) = setup(seed, n);
        let c = Vector::new(shift[..n].to_vec());
        let q = p.translated(&c).unwrap();
        let a = sections::section_perimeter(&p, &xi, t).unwrap();
        let b = sections::section_perimeter(&q, &xi, t + c.dot(&xi)).unwrap();
        prop_assert!(rel_err(a, b) < 1e-9, "{} vs {}", a, b);
        let da = sections::perimeter_derivative_at(&p, &xi, t).unwrap();
        let db = sections::perimeter_derivative_at(&q, &xi, t + c.dot(&xi)).unwrap();
        prop_assert!((da - db).abs() < 1e-8 * a.max(1.0));
    }

    #[test]
    fn rotation_invariance(seed in any::<u64>(), n in dims()) {
        let (p, xi, t) = setup(seed, n);
        let rot = random_rotation(&mut rng(seed ^ 0x5eed), n);
        let q = p.map_vertices(|v| apply_rows(&rot, v)).unwrap();
        let rxi = apply_rows(&rot, &xi).normalized().unwrap();
        let a = sections::section_perimeter(&p, &xi, t).unwrap();
        let b = sections::section_perimeter(&q, &rxi, t).unwrap();
        prop_assert!(rel_err(a, b) < 1e-9, "{} vs {}", a, b);
        let va = sections::section_volume(&p, &xi, t).unwrap();
        let vb = sections::section_volume(&q, &rxi, t).unwrap();
        prop_assert!(rel_err(va, vb) < 1e-9);
    }

    #[test]
    fn reversing_direction_reflects_profile(seed in any::<u64>(), n in dims()) {
        let (p, xi, t) = setup(seed, n);
        let a = sections::section_perimeter(&p, &xi, t).unwrap();
        let b = sections::section_perimeter(&p, &-&xi, -t).unwrap();
        prop_assert!(rel_err(a, b) < 1e-10);
        let da = sections::perimeter_derivative_at(&p, &xi, t).unwrap();
        let db = sections::perimeter_derivative_at(&p, &-&xi, -t).unwrap();
        prop_assert!((da + db).abs() < 1e-8 * a.max(1.0));
    }

    #[test]
    fn symmetric_hulls_have_even_profiles(seed in any::<u64>(), n in dims(), t in 0.0f64..0.3) {
        let mut r = rng(seed);
        let p = zoo::random_symmetric_hull(&mut r, n, n + 2);
        let xi = zoo::random_unit(&mut r, n);
        prop_assume!(vertex_gap(&p, &xi, t) > 1e-4 && vertex_gap(&p, &xi, 0.0) > 1e-6);
        let mut ev = SectionEvaluator::new(&p, &xi).unwrap();
        let (a, b) = (ev.perimeter(t), ev.perimeter(-t));
        prop_assert!(rel_err(a, b) < 1e-9, "{} vs {}", a, b);
        prop_assert!(ev.perimeter_derivative(0.0).abs() < 1e-9 * ev.perimeter(0.0));
    }

    #[test]
    fn apex_independence(seed in any::<u64>(), n in dims(), k in 1usize..6) {
        let (p, xi, t) = setup(seed, n);
        let base = SectionEvaluator::new(&p, &xi).unwrap().perimeter(t);
        let mut ev = SectionEvaluator::new(&p, &xi)
            .unwrap()
            .with_apex_choice(sections::ApexChoice::Ranked(k));
        prop_assert!(rel_err(ev.perimeter(t), base) < 1e-10);
    }

    #[test]
    fn scaling_law(seed in any::<u64>(), n in dims(), s in 0.2f64..5.0) {
        let (p, xi, t) = setup(seed, n);
        let q = p.scaled(s).unwrap();
        let a = sections::section_perimeter(&p, &xi, t).unwrap();
        let b = sections::section_perimeter(&q, &xi, s * t).unwrap();
        prop_assert!(rel_err(b, s.powi(n as i32 - 2) * a) < 1e-9);
        let va = sections::section_volume(&p, &xi, t).unwrap();
        let vb = sections::section_volume(&q, &xi, s * t).unwrap();
        prop_assert!(rel_err(vb, s.powi(n as i32 - 1) * va) < 1e-9);
    }

    #[test]
    fn determinant_derivative_matches_difference_quotient(
        a in prop::collection::vec(-2.0f64..2.0, 16),
        b in prop::collection::vec(-2.0f64..2.0, 16),
        n in 2usize..5,
    ) {
        let cols = |m: &[f64], s: f64, d: &[f64]| -> Vec<Vector> {
            (0..n).map(|j| Vector::new((0..n).map(|i| m[j * 4 + i] + s * d[j * 4 + i]).collect())).collect()
        };
        let det_at = |s: f64| {
            let c = cols(&a, s, &b);
            det_columns(&c.iter().collect::<Vec<_>>())
        };
        let analytic = det_derivative(&cols(&a, 0.0, &b), &cols(&b, 0.0, &[0.0; 16]));
        let h = 1e-5;
        let fd = (det_at(h) - det_at(-h)) / (2.0 * h);
        prop_assert!((analytic - fd).abs() < 1e-6 * (1.0 + analytic.abs()), "{} vs {}", analytic, fd);
    }
}

#[test]
fn shifted_cube_margins_grow_with_shift() {
    let cfg = TestConfig {
        directions: 60,
        seed: 5,
        ..TestConfig::default()
    };
    let (mut last, mut last_vol) = (0.0, 0.0);
    for c in [0.1, 0.2, 0.4] {
        let p = zoo::box_with_bounds(&[(-1.0 + c, 1.0 + c), (-1.0, 1.0), (-1.0, 1.0)]);
        let rep = symmetry::max_section_test_with(&p, &cfg).unwrap();
        assert_eq!(rep.verdict, symmetry::Verdict::Fail, "c = {c}");
        assert!(rep.worst_relative_margin > last, "c = {c}: {} after {last}", rep.worst_relative_margin);
        last = rep.worst_relative_margin;
        let vol = symmetry::volume_section_test_with(&p, &cfg).unwrap();
        assert_eq!(vol.verdict, symmetry::Verdict::Fail, "c = {c}");
        assert!(vol.worst_relative_margin > last_vol, "c = {c}: volume {} after {last_vol}", vol.worst_relative_margin);
        last_vol = vol.worst_relative_margin;
    }
}

#[test]
fn shifted_cube_margin_is_monotone_along_each_direction() {
    let dirs = symmetry::test_directions(3, 40, 9);
    for xi in dirs {
        let mut last = -1.0;
        for c in [0.1, 0.2, 0.4] {
            let p = zoo::box_with_bounds(&[(-1.0 + c, 1.0 + c), (-1.0, 1.0), (-1.0, 1.0)]);
            let xi = match symmetry::ensure_generic(&xi, &p) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let m = sections::perimeter_profile(&p, &xi, 32).unwrap().margin();
            assert!(m >= last - 1e-9, "{xi:?} c = {c}: {m} after {last}");
            last = m;
        }
    }
}

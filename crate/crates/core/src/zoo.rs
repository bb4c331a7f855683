//! Standard test bodies: hypercubes, cross-polytopes, the regular
//! tetrahedron and seeded random hulls.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;
use crate::polytope::{hull_from_vertices, Polytope};

/// `{±1}ⁿ`.
pub fn cube(n: usize) -> Polytope {
    box_with_bounds(&vec![(-1.0, 1.0); n])
}

/// Axis-parallel box `Π [lo_k, hi_k]`.
pub fn box_with_bounds(bounds: &[(f64, f64)]) -> Polytope {
    let n = bounds.len();
    let pts: Vec<Vector> = (0..1usize << n)
        .map(|mask| {
            Vector::new(
                (0..n)
                    .map(|k| if mask >> k & 1 == 1 { bounds[k].1 } else { bounds[k].0 })
                    .collect(),
            )
        })
        .collect();
    hull_from_vertices(&pts, n).expect("box is full-dimensional")
}

/// `conv{±e_k}`.
pub fn cross_polytope(n: usize) -> Polytope {
    let pts: Vec<Vector> = (0..n)
        .flat_map(|k| [Vector::unit(n, k), -&Vector::unit(n, k)])
        .collect();
    hull_from_vertices(&pts, n).expect("cross-polytope is full-dimensional")
}

/// `conv{(1,1,1), (1,−1,−1), (−1,1,−1), (−1,−1,1)}`, centred at the origin.
pub fn regular_tetrahedron() -> Polytope {
    let pts: Vec<Vector> = vec![
        [1.0, 1.0, 1.0].into(),
        [1.0, -1.0, -1.0].into(),
        [-1.0, 1.0, -1.0].into(),
        [-1.0, -1.0, 1.0].into(),
    ];
    hull_from_vertices(&pts, 3).expect("tetrahedron is full-dimensional")
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        let g = Vector::new((0..n).map(|_| rng.sample(StandardNormal)).collect());
        if let Some(u) = g.normalized() {
            return u;
        }
    }
}

/// Random point with direction uniform on the sphere and radius in
/// `[r_lo, r_hi]`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize, r_lo: f64, r_hi: f64) -> Vector {
    let u = random_unit(rng, n);
    &u * rng.random_range(r_lo..r_hi)
}

/// `conv(S ∪ −S)` for `k` random points `S`.
pub fn random_symmetric_hull<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Polytope {
    loop {
        let s: Vec<Vector> = (0..k).map(|_| random_point(rng, n, 0.5, 1.5)).collect();
        let pts: Vec<Vector> = s.iter().flat_map(|p| [p.clone(), -p]).collect();
        if let Ok(p) = hull_from_vertices(&pts, n) {
            if p.inradius_at_origin() > 0.05 {
                return p;
            }
        }
    }
}

/// Hull of `k` random points whose facets all stay at distance at least
/// `margin` from the origin.
pub fn random_hull_around_origin<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    margin: f64,
) -> Polytope {
    loop {
        let pts: Vec<Vector> = (0..k).map(|_| random_point(rng, n, 0.6, 1.4)).collect();
        if let Ok(p) = hull_from_vertices(&pts, n) {
            if p.inradius_at_origin() > margin {
                return p;
            }
        }
    }
}

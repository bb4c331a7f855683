//! Independent reference computations for the integration tests.
//!
//! Sections are rebuilt from the vertex list alone: the section of
//! `conv V` by `{⟨x, ξ⟩ = t}` is the hull of the points where segments
//! between vertices on opposite sides cross the hyperplane. The hull is then
//! measured in flat coordinates on the hyperplane (monotone chain
//! in 2D, brute-force facet search in 3D).
#![allow(dead_code)]

use polysym::{Polytope, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of `ξ⊥` by Gram–Schmidt on the standard basis.
pub fn perp_basis(xi: &[f64]) -> Vec<Vec<f64>> {
    let n = xi.len();
    let mut basis: Vec<Vec<f64>> = vec![xi.to_vec()];
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Section points in flat coordinates of the hyperplane.
pub fn section_points(vertices: &[Vector], xi: &[f64], t: f64) -> Vec<Vec<f64>> {
    let basis = perp_basis(xi);
    let h: Vec<f64> = vertices.iter().map(|v| dot(v.as_slice(), xi)).collect();
    let mut pts = Vec::new();
    for i in 0..vertices.len() {
        for j in 0..vertices.len() {
            if h[i] > t && h[j] < t {
                let s = (h[i] - t) / (h[i] - h[j]);
                let x: Vec<f64> = vertices[i]
                    .iter()
                    .zip(vertices[j].iter())
                    .map(|(a, b)| a + s * (b - a))
                    .collect();
                pts.push(basis.iter().map(|b| dot(&x, b)).collect());
            }
        }
    }
    pts
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull (counter-clockwise) of planar points.
pub fn hull2(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 1e-14 {
            lower.pop();
        }
        lower.push(q.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 1e-14 {
            upper.pop();
        }
        upper.push(q.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_perimeter_area(poly: &[Vec<f64>]) -> (f64, f64) {
    let k = poly.len();
    let mut per = 0.0;
    let mut area = 0.0;
    for i in 0..k {
        let (a, b) = (&poly[i], &poly[(i + 1) % k]);
        per += ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        area += a[0] * b[1] - a[1] * b[0];
    }
    (per, 0.5 * area.abs())
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Surface area and volume of the hull of points in `ℝ³`.
pub fn hull3_area_volume(points: &[Vec<f64>]) -> (f64, f64) {
    let m = points.len();
    let scale = points
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-10 * scale;
    let centroid: Vec<f64> = (0..3)
        .map(|k| points.iter().map(|p| p[k]).sum::<f64>() / m as f64)
        .collect();
    let mut planes: Vec<([f64; 3], f64)> = Vec::new();
    let (mut area, mut volume) = (0.0, 0.0);
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let nrm = cross3(&sub3(&points[j], &points[i]), &sub3(&points[k], &points[i]));
                let len = dot(&nrm, &nrm).sqrt();
                if len < eps * scale {
                    continue;
                }
                let mut u = nrm.map(|x| x / len);
                let mut off = dot(&u, &points[i]);
                if dot(&u, &centroid) > off {
                    u = u.map(|x| -x);
                    off = -off;
                }
                if points.iter().any(|p| dot(&u, p) > off + eps) {
                    continue;
                }
                if planes
                    .iter()
                    .any(|(w, o)| dot(w, &u) > 1.0 - 1e-9 && (o - off).abs() < eps)
                {
                    continue;
                }
                planes.push((u, off));
                // facet polygon in plane coordinates
                let e1 = {
                    let d = sub3(&points[j], &points[i]);
                    let l = dot(&d, &d).sqrt();
                    d.map(|x| x / l)
                };
                let e2 = cross3(&u, &e1);
                let on: Vec<Vec<f64>> = points
                    .iter()
                    .filter(|p| (dot(&u, p) - off).abs() <= eps)
                    .map(|p| vec![dot(&e1, p), dot(&e2, p)])
                    .collect();
                let (_, a) = polygon_perimeter_area(&hull2(&on));
                area += a;
                volume += a * (off - dot(&u, &centroid)) / 3.0;
            }
        }
    }
    (area, volume)
}

/// `(relative-boundary measure, section volume)` of `P ∩ {⟨x, ξ⟩ = t}`.
pub fn oracle_section(p: &Polytope, xi: &Vector, t: f64) -> (f64, f64) {
    let pts = section_points(p.vertices(), xi.as_slice(), t);
    match p.dim() {
        3 => {
            if pts.len() < 2 {
                return (0.0, 0.0);
            }
            polygon_perimeter_area(&hull2(&pts))
        }
        4 => {
            if pts.len() < 4 {
                return (0.0, 0.0);
            }
            hull3_area_volume(&pts)
        }
        n => panic!("oracle implemented for n = 3, 4 only (got {n})"),
    }
}

pub fn oracle_perimeter(p: &Polytope, xi: &Vector, t: f64) -> f64 {
    oracle_section(p, xi, t).0
}

/// Central difference of the oracle perimeter.
pub fn fd_perimeter(p: &Polytope, xi: &Vector, t: f64, h: f64) -> f64 {
    (oracle_perimeter(p, xi, t + h) - oracle_perimeter(p, xi, t - h)) / (2.0 * h)
}

/// `(argmax, max, value at 0)` of `f` on a uniform grid over `[lo, hi]`.
pub fn grid_scan(f: impl Fn(f64) -> f64, lo: f64, hi: f64, k: usize) -> (f64, f64, f64) {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in 0..=k {
        let t = lo + (hi - lo) * i as f64 / k as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    (best.0, best.1, f(0.0))
}

/// `min_k |⟨v_k, ξ⟩ − t|`.
pub fn vertex_gap(p: &Polytope, xi: &Vector, t: f64) -> f64 {
    p.vertices()
        .iter()
        .map(|v| (v.dot(xi) - t).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Random rotation of `ℝⁿ` as a list of rows.
pub fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < n {
        let mut v = polysym::zoo::random_unit(rng, n).into_inner();
        for r in &rows {
            let c = dot(&v, r);
            v.iter_mut().zip(r).for_each(|(x, y)| *x -= c * y);
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-3 {
            rows.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    rows.into_iter().map(Vector::new).collect()
}

pub fn apply_rows(rows: &[Vector], x: &Vector) -> Vector {
    Vector::new(rows.iter().map(|r| r.dot(x)).collect())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

//! Quadrature rules: Gauss–Legendre, product rules on low-dimensional
//! spheres and adaptive Gauss–Kronrod on intervals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=k {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = k as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[k - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[k - 1 - i] = wi;
    }
    (x, w)
}

/// Nodes on `S^{d−1}` with positive weights summing to its surface area.
/// Every rule built here is invariant under `x ↦ −x`.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    dim: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    /// Trapezoid rule with `k` (even) equally spaced nodes on `S¹`.
    pub fn circle(k: usize) -> Self {
        let k = k.max(2).next_multiple_of(2);
        let w = 2.0 * PI / k as f64;
        let nodes = (0..k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / k as f64;
                Vector::from([a.cos(), a.sin()])
            })
            .collect();
        Self {
            dim: 2,
            nodes,
            weights: vec![w; k],
        }
    }

    /// Gauss–Legendre in `cos θ` times the trapezoid rule in azimuth on `S²`.
    pub fn sphere2(polar: usize, azimuth: usize) -> Self {
        let (x, w) = gauss_legendre(polar);
        let az = azimuth.max(2).next_multiple_of(2);
        let dphi = 2.0 * PI / az as f64;
        let mut nodes = Vec::with_capacity(polar * az);
        let mut weights = Vec::with_capacity(polar * az);
        for (&c, &wc) in x.iter().zip(&w) {
            let s = (1.0 - c * c).sqrt();
            for j in 0..az {
                let phi = dphi * j as f64;
                nodes.push(Vector::from([s * phi.cos(), s * phi.sin(), c]));
                weights.push(wc * dphi);
            }
        }
        Self {
            dim: 3,
            nodes,
            weights,
        }
    }

    /// `S³` as `(cos ψ, sin ψ · ω)` with `ω ∈ S²`; Gauss–Chebyshev of the
    /// second kind in `cos ψ` absorbs the `sin² ψ` density exactly.
    pub fn sphere3(polar: usize, inner: &SphereQuadrature) -> Self {
        assert_eq!(inner.dim, 3);
        let k = polar as f64 + 1.0;
        let mut nodes = Vec::with_capacity(polar * inner.len());
        let mut weights = Vec::with_capacity(polar * inner.len());
        for i in 1..=polar {
            let a = PI * i as f64 / k;
            let (c, s) = (a.cos(), a.sin());
            let wc = PI / k * s * s;
            for (om, wo) in inner.nodes.iter().zip(&inner.weights) {
                nodes.push(Vector::from([c, s * om[0], s * om[1], s * om[2]]));
                weights.push(wc * wo);
            }
        }
        Self {
            dim: 4,
            nodes,
            weights,
        }
    }

    /// Default resolution for `S^{d−1}`: 1024 nodes on the circle, 64 × 128
    /// on `S²`, 32 × (32 × 64) on `S³`.
    pub fn default_for(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Self::circle(1024)),
            3 => Ok(Self::sphere2(64, 128)),
            4 => Ok(Self::sphere3(32, &Self::sphere2(32, 64))),
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// Ambient dimension `d` (the sphere is `S^{d−1}`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, mut f: impl FnMut(&Vector) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Surface area of `S^{d−1}`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / statrs::function::gamma::gamma(h)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod on `[a, b]`. Stops once the summed error
/// estimate is below `max(abs_tol, rel_tol·|I|)` or after 2000 panels.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || panels.len() >= 2000 {
            return total;
        }
        let (iw, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = panels.swap_remove(iw);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return total;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

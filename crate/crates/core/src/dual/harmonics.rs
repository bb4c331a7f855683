//! Legendre polynomials of dimension `n`, the multipliers `λ_m(q)`, real
//! spherical harmonics on `S²` and odd-part analysis of functions on
//! spheres.

use std::f64::consts::PI;

use serde::Serialize;

use super::fractional::{fractional_derivative, FractionalDerivInput};
use super::quadrature::SphereQuadrature;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// `(P, P′, P″)` of the dimension-`n` Legendre polynomial of degree `m`
/// at `t`, normalised by `P(1) = 1`.
pub fn legendre_with_derivatives(n: usize, m: usize, t: f64) -> (f64, f64, f64) {
    assert!(n >= 2, "Legendre polynomials need n ≥ 2");
    let (mut p0, mut d0, mut s0) = (1.0, 0.0, 0.0);
    if m == 0 {
        return (p0, d0, s0);
    }
    let (mut p1, mut d1, mut s1) = (t, 1.0, 0.0);
    let nn = n as f64;
    for k in 1..m {
        let kf = k as f64;
        let a = 2.0 * kf + nn - 2.0;
        let c = kf + nn - 2.0;
        let p2 = (a * t * p1 - kf * p0) / c;
        let d2 = (a * (p1 + t * d1) - kf * d0) / c;
        let s2 = (a * (2.0 * d1 + t * s1) - kf * s0) / c;
        (p0, d0, s0) = (p1, d1, s1);
        (p1, d1, s1) = (p2, d2, s2);
    }
    (p1, d1, s1)
}

/// `P_m^n(t)`.
pub fn legendre(n: usize, m: usize, t: f64) -> f64 {
    legendre_with_derivatives(n, m, t).0
}

/// Fractional derivative of order `q` at 0 of
/// `f(t) = P_m^n(t) (1 − t²)^{(n−2−l)/2}` on `[0, 1]`.
pub fn lambda_m(n: usize, l: usize, m: usize, q: f64) -> Result<f64> {
    if n < 3 || l > n - 2 {
        return Err(Error::InvalidArgument(format!("need 0 ≤ l ≤ n − 2, got n = {n}, l = {l}")));
    }
    if !(q > -1.0 && q < 2.0) {
        return Err(Error::OrderOutOfRange { q, upper: 2.0 });
    }
    let (p, dp, ddp) = legendre_with_derivatives(n, m, 0.0);
    if q == 1.0 {
        return Ok(-dp);
    }
    if q == 0.0 {
        return Ok(p);
    }
    let alpha = (n - 2 - l) as f64 / 2.0;
    let f = move |t: f64| {
        if (0.0..=1.0).contains(&t) {
            legendre(n, m, t) * (1.0 - t * t).max(0.0).powf(alpha)
        } else {
            0.0
        }
    };
    let input = FractionalDerivInput::new(f, vec![p, dp, ddp - 2.0 * alpha * p]).with_support_end(1.0);
    fractional_derivative(&input, q)
}

/// Real orthonormal spherical harmonic on `S²` of the given degree and
/// order (`−degree ≤ order ≤ degree`; negative orders use `sin`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RealHarmonic {
    pub degree: usize,
    pub order: i32,
}

/// Associated Legendre function `P_l^m(x)` (without Condon–Shortley phase).
fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 1..=m {
        pmm *= (2 * i - 1) as f64 * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm0 = pmm;
    for k in (m + 2)..=l {
        let p = (x * (2 * k - 1) as f64 * pm1 - (k + m - 1) as f64 * pm0) / (k - m) as f64;
        pm0 = pm1;
        pm1 = p;
    }
    pm1
}

impl RealHarmonic {
    pub fn new(degree: usize, order: i32) -> Result<Self> {
        if order.unsigned_abs() as usize > degree {
            return Err(Error::InvalidArgument(format!(
                "order {order} exceeds degree {degree}"
            )));
        }
        Ok(Self { degree, order })
    }

    /// The zonal harmonic `Y_m^0`.
    pub fn zonal(degree: usize) -> Self {
        Self { degree, order: 0 }
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        let l = self.degree;
        let m = self.order.unsigned_abs() as usize;
        let ct = x[2].clamp(-1.0, 1.0);
        let phi = x[1].atan2(x[0]);
        let ratio: f64 = ((l - m + 1)..=(l + m)).map(|i| i as f64).product();
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) / ratio).sqrt();
        let p = assoc_legendre(l, m, ct);
        match self.order {
            0 => norm * p,
            o if o > 0 => std::f64::consts::SQRT_2 * norm * p * (m as f64 * phi).cos(),
            _ => std::f64::consts::SQRT_2 * norm * p * (m as f64 * phi).sin(),
        }
    }
}

/// All real harmonics of the listed degrees.
pub fn harmonic_basis(degrees: &[usize]) -> Vec<RealHarmonic> {
    degrees
        .iter()
        .flat_map(|&d| (-(d as i32)..=d as i32).map(move |o| RealHarmonic { degree: d, order: o }))
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HarmonicCoefficient {
    pub harmonic: RealHarmonic,
    pub value: f64,
}

/// `L²` norm of `(g(x) − g(−x))/2`.
pub fn odd_part_norm(g: impl Fn(&Vector) -> f64, quad: &SphereQuadrature) -> f64 {
    quad.integrate(|x| {
        let o = 0.5 * (g(x) - g(&-x));
        o * o
    })
    .sqrt()
}

/// `⟨g, H⟩` for every basis harmonic of the given odd degrees (`n = 3`).
pub fn harmonic_odd_projection(
    g: impl Fn(&Vector) -> f64,
    degrees: &[usize],
    quad: &SphereQuadrature,
) -> Result<Vec<HarmonicCoefficient>> {
    if quad.dim() != 3 {
        return Err(Error::HarmonicDimension);
    }
    if let Some(d) = degrees.iter().find(|d| *d % 2 == 0) {
        return Err(Error::InvalidArgument(format!("degree {d} is even")));
    }
    let values: Vec<f64> = quad.nodes().iter().map(&g).collect();
    Ok(harmonic_basis(degrees)
        .into_iter()
        .map(|h| {
            let value = quad
                .nodes()
                .iter()
                .zip(quad.weights())
                .zip(&values)
                .map(|((x, w), gx)| w * gx * h.eval(x))
                .sum();
            HarmonicCoefficient { harmonic: h, value }
        })
        .collect())
}

/// Odd degrees `1, 3, …, ≤ max`.
pub fn odd_degrees(max: usize) -> Vec<usize> {
    (1..=max).step_by(2).collect()
}

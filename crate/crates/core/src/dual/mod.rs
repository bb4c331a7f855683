//! Star bodies given by radial functions, dual quermassintegrals of their
//! central and shifted sections, and the dual section test for symmetry.

pub mod fractional;
pub mod harmonics;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SquareMatrix, Vector};
use crate::polytope::{self, Polytope, PolytopeFile};
use crate::search;
use crate::symmetry::{self, DirectionResult, Verdict, Witness};

pub use fractional::{fractional_derivative, FractionalDerivInput};
pub use harmonics::{
    harmonic_basis, harmonic_odd_projection, lambda_m, legendre, odd_part_norm, HarmonicCoefficient,
    RealHarmonic,
};
pub use quadrature::{sphere_area, SphereQuadrature};

const MAXD: usize = 8;
const UNIT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum BodyKind {
    ShiftedBall { center: Vector, radius: f64 },
    /// `center + A·B`, `A` given by its columns.
    Ellipsoid {
        matrix: SquareMatrix,
        inverse: SquareMatrix,
        center: Vector,
    },
    Polytope(Polytope),
}

/// A body with the origin in its interior, described through its radial
/// function `ρ(ξ) = max{a > 0 : aξ ∈ K}`.
#[derive(Clone, Debug)]
pub struct RadialBody {
    dim: usize,
    kind: BodyKind,
    c1: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn apply_into(m: &SquareMatrix, x: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (c, xi) in m.columns().iter().zip(x) {
        for (o, ci) in out.iter_mut().zip(c.iter()) {
            *o += xi * ci;
        }
    }
}

impl RadialBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::shifted_ball(Vector::zeros(dim), radius)
    }

    /// Ball `B(c, R)`; needs `|c| < R`.
    pub fn shifted_ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        if center.norm() >= radius {
            return Err(Error::OriginNotInterior);
        }
        Ok(Self {
            dim: center.dim(),
            kind: BodyKind::ShiftedBall { center, radius },
            c1: true,
        })
    }

    /// Ellipsoid `c + A·B` with `A` given by columns.
    pub fn ellipsoid(matrix: SquareMatrix, center: Vector) -> Result<Self> {
        let n = matrix.dim();
        if center.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: center.dim(),
            });
        }
        let cols = (0..n)
            .map(|k| matrix.solve(&Vector::unit(n, k)).ok_or(Error::DegenerateSpan))
            .collect::<Result<Vec<_>>>()?;
        let inverse = SquareMatrix::from_columns(cols)?;
        if inverse.apply(&center).norm() >= 1.0 {
            return Err(Error::OriginNotInterior);
        }
        Ok(Self {
            dim: n,
            kind: BodyKind::Ellipsoid {
                matrix,
                inverse,
                center,
            },
            c1: true,
        })
    }

    /// Axis-parallel ellipsoid with the given semi-axes.
    pub fn ellipsoid_axes(axes: &[f64], center: Vector) -> Result<Self> {
        if axes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::InvalidArgument("semi-axes must be positive".into()));
        }
        let n = axes.len();
        let cols = (0..n).map(|k| &Vector::unit(n, k) * axes[k]).collect();
        Self::ellipsoid(SquareMatrix::from_columns(cols)?, center)
    }

    /// Polytope-backed body; not C¹.
    pub fn polytope(p: Polytope) -> Result<Self> {
        p.require_origin_interior()?;
        Ok(Self {
            dim: p.dim(),
            kind: BodyKind::Polytope(p),
            c1: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_c1(&self) -> bool {
        self.c1
    }

    /// A length comparable to the size of the body.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            BodyKind::ShiftedBall { radius, .. } => *radius,
            BodyKind::Ellipsoid { matrix, .. } => matrix
                .columns()
                .iter()
                .map(Vector::norm)
                .fold(0.0, f64::max),
            BodyKind::Polytope(p) => 0.5 * p.diameter(),
        }
    }

    /// Whether `x` lies in the interior.
    pub fn contains_interior(&self, x: &Vector) -> bool {
        match &self.kind {
            BodyKind::ShiftedBall { center, radius } => x.distance(center) < *radius,
            BodyKind::Ellipsoid { inverse, center, .. } => inverse.apply(&(x - center)).norm() < 1.0,
            BodyKind::Polytope(p) => p.facets().iter().all(|f| f.offset - f.normal.dot(x) > 0.0),
        }
    }

    /// Ground-truth `K = −K` check.
    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        match &self.kind {
            BodyKind::ShiftedBall { center, .. } | BodyKind::Ellipsoid { center, .. } => {
                center.norm() <= tol
            }
            BodyKind::Polytope(p) => polytope::is_origin_symmetric(p, tol),
        }
    }

    /// `max{a > 0 : p + aθ ∈ K}` for interior `p` and unit `θ`, no checks.
    pub fn radial_from_slice(&self, p: &[f64], theta: &[f64]) -> f64 {
        let n = self.dim;
        match &self.kind {
            BodyKind::ShiftedBall { center, radius } => {
                let mut w = [0.0; MAXD];
                for i in 0..n {
                    w[i] = p[i] - center[i];
                }
                let w = &w[..n];
                let b = dot(w, theta);
                let c = dot(w, w) - radius * radius;
                -b + (b * b - c).max(0.0).sqrt()
            }
            BodyKind::Ellipsoid { inverse, center, .. } => {
                let mut w = [0.0; MAXD];
                for i in 0..n {
                    w[i] = p[i] - center[i];
                }
                let (mut u, mut v) = ([0.0; MAXD], [0.0; MAXD]);
                apply_into(inverse, &w[..n], &mut u[..n]);
                apply_into(inverse, theta, &mut v[..n]);
                let (u, v) = (&u[..n], &v[..n]);
                let (uv, vv, uu) = (dot(u, v), dot(v, v), dot(u, u));
                (-uv + (uv * uv - vv * (uu - 1.0)).max(0.0).sqrt()) / vv
            }
            BodyKind::Polytope(poly) => poly
                .facets()
                .iter()
                .filter_map(|f| {
                    let d = dot(f.normal.as_slice(), theta);
                    (d > 0.0).then(|| (f.offset - dot(f.normal.as_slice(), p)) / d)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn check_unit(&self, theta: &Vector) -> Result<()> {
        if theta.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: theta.dim(),
            });
        }
        if (theta.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument("direction must be a unit vector".into()));
        }
        Ok(())
    }

    /// `max{a > 0 : p + aθ ∈ K}`.
    pub fn radial_from(&self, p: &Vector, theta: &Vector) -> Result<f64> {
        self.check_unit(theta)?;
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        if !self.contains_interior(p) {
            return Err(Error::PointNotInterior);
        }
        Ok(self.radial_from_slice(p.as_slice(), theta.as_slice()))
    }

    /// `ρ_K(ξ)`.
    pub fn radial(&self, xi: &Vector) -> Result<f64> {
        self.check_unit(xi)?;
        if !self.contains_interior(&Vector::zeros(self.dim)) {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.radial_from_slice(&[0.0; MAXD][..self.dim], xi.as_slice()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("kind").is_some() {
            serde_json::from_value::<BodySpec>(v)?.build()
        } else {
            let file: PolytopeFile = serde_json::from_value(v)?;
            Self::polytope(file.build()?)
        }
    }
}

/// Structured body description, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Ball {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_radius")]
        radius: f64,
    },
    ShiftedBall {
        center: Vec<f64>,
        radius: f64,
    },
    /// Either diagonal `axes` or a full `matrix` (rows of `A`).
    Ellipsoid {
        #[serde(default)]
        axes: Option<Vec<f64>>,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
}

fn default_dim() -> usize {
    3
}

fn default_radius() -> f64 {
    1.0
}

impl BodySpec {
    pub fn build(&self) -> Result<RadialBody> {
        match self {
            BodySpec::Ball { dim, radius } => RadialBody::ball(*dim, *radius),
            BodySpec::ShiftedBall { center, radius } => {
                RadialBody::shifted_ball(Vector::new(center.clone()), *radius)
            }
            BodySpec::Ellipsoid {
                axes,
                matrix,
                center,
            } => {
                let n = match (axes, matrix) {
                    (Some(a), None) => a.len(),
                    (None, Some(m)) => m.len(),
                    _ => {
                        return Err(Error::Parse(
                            "ellipsoid needs exactly one of `axes` or `matrix`".into(),
                        ))
                    }
                };
                let c = Vector::new(center.clone().unwrap_or_else(|| vec![0.0; n]));
                match (axes, matrix) {
                    (Some(a), _) => RadialBody::ellipsoid_axes(a, c),
                    (_, Some(rows)) => {
                        if rows.iter().any(|r| r.len() != n) {
                            return Err(Error::Parse("ellipsoid matrix must be square".into()));
                        }
                        let cols = (0..n)
                            .map(|j| Vector::new(rows.iter().map(|r| r[j]).collect()))
                            .collect();
                        RadialBody::ellipsoid(SquareMatrix::from_columns(cols)?, c)
                    }
                    _ => unreachable!(),
                }
            }
            BodySpec::Polytope { vertices } => {
                let n = vertices.first().map(Vec::len).unwrap_or(0);
                let pts: Vec<Vector> = vertices.iter().cloned().map(Vector::new).collect();
                RadialBody::polytope(polytope::hull_from_vertices(&pts, n)?)
            }
        }
    }
}

/// `W̃_l(K) = (1/d) ∫_{S^{d−1}} ρ^{d−l}` at the default resolution.
pub fn dual_quermassintegral(body: &RadialBody, l: usize) -> Result<f64> {
    dual_quermassintegral_with(body, l, &SphereQuadrature::default_for(body.dim())?)
}

pub fn dual_quermassintegral_with(body: &RadialBody, l: usize, quad: &SphereQuadrature) -> Result<f64> {
    let d = body.dim();
    if l > d {
        return Err(Error::InvalidArgument(format!("need 0 ≤ l ≤ {d}, got {l}")));
    }
    if quad.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: quad.dim(),
        });
    }
    let origin = [0.0; MAXD];
    let e = (d - l) as i32;
    Ok(quad.integrate(|x| body.radial_from_slice(&origin[..d], x.as_slice()).powi(e)) / d as f64)
}

/// `t ↦ W̃_l((K − tξ) ∩ ξ⊥)` for a fixed body, direction and `l`.
pub struct SectionDual<'a> {
    body: &'a RadialBody,
    xi: Vector,
    l: usize,
    dirs: Vec<Vector>,
    weights: Vec<f64>,
}

impl<'a> SectionDual<'a> {
    pub fn new(body: &'a RadialBody, xi: &Vector, l: usize) -> Result<Self> {
        let n = body.dim();
        let quad = SphereQuadrature::default_for(n.saturating_sub(1))?;
        Self::with_quadrature(body, xi, l, &quad)
    }

    /// Uses `quad` on `S^{n−2}`, mapped into `ξ⊥`.
    pub fn with_quadrature(body: &'a RadialBody, xi: &Vector, l: usize, quad: &SphereQuadrature) -> Result<Self> {
        let n = body.dim();
        body.check_unit(xi)?;
        if n < 3 || l > n - 2 {
            return Err(Error::InvalidArgument(format!("need 0 ≤ l ≤ n − 2, got n = {n}, l = {l}")));
        }
        if quad.dim() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                found: quad.dim(),
            });
        }
        let basis = linalg::complement_basis(std::slice::from_ref(xi))?;
        let dirs = quad
            .nodes()
            .iter()
            .map(|c| {
                let mut v = Vector::zeros(n);
                for (ck, ek) in c.iter().zip(&basis) {
                    v.axpy(*ck, ek);
                }
                v
            })
            .collect();
        Ok(Self {
            body,
            xi: xi.clone(),
            l,
            dirs,
            weights: quad.weights().to_vec(),
        })
    }

    pub fn direction(&self) -> &Vector {
        &self.xi
    }

    /// Open interval of heights with `tξ` interior: `(−ρ(−ξ), ρ(ξ))`.
    pub fn support(&self) -> (f64, f64) {
        let n = self.body.dim();
        let o = [0.0; MAXD];
        let up = self.body.radial_from_slice(&o[..n], self.xi.as_slice());
        let down = self.body.radial_from_slice(&o[..n], (-&self.xi).as_slice());
        (-down, up)
    }

    /// Value at `t`, assuming `tξ` interior.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.body.dim();
        let mut p = [0.0; MAXD];
        for (pi, xi) in p.iter_mut().zip(self.xi.iter()) {
            *pi = t * xi;
        }
        let e = (n - 1 - self.l) as i32;
        let s: f64 = self
            .dirs
            .iter()
            .zip(&self.weights)
            .map(|(th, w)| w * self.body.radial_from_slice(&p[..n], th.as_slice()).powi(e))
            .sum();
        s / (n - 1) as f64
    }

    /// Checked [`Self::eval`].
    pub fn value(&self, t: f64) -> Result<f64> {
        if !self.body.contains_interior(&(&self.xi * t)) {
            return Err(Error::PointNotInterior);
        }
        Ok(self.eval(t))
    }

    /// Central difference with step `1e-4` times the smaller of `ρ(±ξ)`.
    pub fn derivative_at_zero(&self) -> f64 {
        let (lo, hi) = self.support();
        let h = 1e-4 * hi.min(-lo);
        (self.eval(h) - self.eval(-h)) / (2.0 * h)
    }
}

/// `W̃_{l,ξ}(t) = W̃_l((K − tξ) ∩ ξ⊥)`.
pub fn section_dual_quermassintegral(body: &RadialBody, xi: &Vector, t: f64, l: usize) -> Result<f64> {
    SectionDual::new(body, xi, l)?.value(t)
}

#[derive(Clone, Debug)]
pub struct DualConfig {
    pub directions: usize,
    pub seed: u64,
    pub tol: f64,
    /// Grid points over the height interval before refinement.
    pub grid: usize,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            directions: 200,
            seed: 0,
            tol: symmetry::PASS_TOL,
            grid: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualReport {
    pub l: usize,
    pub c1: bool,
    pub directions_tested: usize,
    pub per_direction: Vec<DirectionResult>,
    pub witnesses: Vec<Witness>,
    pub worst_relative_margin: f64,
    pub max_abs_derivative: f64,
    pub oracle: bool,
    pub verdict: Verdict,
    pub note: &'static str,
}

impl DualReport {
    pub fn worst_witness(&self) -> Option<&Witness> {
        self.witnesses
            .iter()
            .max_by(|a, b| a.relative_margin.total_cmp(&b.relative_margin))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn scan(sd: &SectionDual, grid: usize) -> (f64, f64, f64) {
    let (lo, hi) = sd.support();
    let shrink = 1.0 - 1e-6;
    let x_tol = 1e-10 * (hi - lo);
    let (_, mut arg, mut max) = search::grid_refine_max(|t| sd.eval(t), lo * shrink, hi * shrink, grid, x_tol);
    let central = sd.eval(0.0);
    if central >= max {
        (arg, max) = (0.0, central);
    }
    (arg, max, central)
}

/// Checks along `num_directions` directions that `W̃_{l,ξ}` peaks at 0.
pub fn dual_symmetry_test(body: &RadialBody, l: usize, num_directions: usize, tol: f64) -> Result<DualReport> {
    dual_symmetry_test_with(
        body,
        l,
        &DualConfig {
            directions: num_directions,
            tol,
            ..DualConfig::default()
        },
    )
}

pub fn dual_symmetry_test_with(body: &RadialBody, l: usize, cfg: &DualConfig) -> Result<DualReport> {
    if !body.is_c1() {
        log::warn!("body is not C¹; the section test is not backed by a theorem here");
    }
    if cfg.directions == 0 || !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument("need directions ≥ 1 and tol > 0".into()));
    }
    let dirs = symmetry::test_directions(body.dim(), cfg.directions, cfg.seed);
    let section_quad = SphereQuadrature::default_for(body.dim().saturating_sub(1))?;
    let mut per_direction = Vec::with_capacity(dirs.len());
    for (index, xi) in dirs.into_iter().enumerate() {
        let sd = SectionDual::with_quadrature(body, &xi, l, &section_quad)?;
        let (mut arg, mut max, central) = scan(&sd, cfg.grid);
        let rel = |max: f64| (max - central) / max.abs().max(f64::MIN_POSITIVE);
        let mut status = symmetry::classify(rel(max), cfg.tol);
        if status == Verdict::Inconclusive {
            (arg, max, _) = scan(&sd, 4 * cfg.grid);
            status = symmetry::classify(rel(max), cfg.tol);
        }
        per_direction.push(DirectionResult {
            index,
            max_location: arg,
            max_value: max,
            central_value: central,
            margin: max - central,
            relative_margin: rel(max),
            derivative: Some(sd.derivative_at_zero()),
            status,
            direction: xi,
        });
    }
    let witnesses: Vec<Witness> = per_direction
        .iter()
        .filter(|r| r.status == Verdict::Fail)
        .map(|r| Witness {
            index: r.index,
            direction: r.direction.clone(),
            margin: r.margin,
            relative_margin: r.relative_margin,
            max_location: r.max_location,
        })
        .collect();
    let verdict = if !witnesses.is_empty() {
        Verdict::Fail
    } else if per_direction.iter().any(|r| r.status == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(DualReport {
        l,
        c1: body.is_c1(),
        directions_tested: per_direction.len(),
        worst_relative_margin: per_direction
            .iter()
            .map(|r| r.relative_margin)
            .fold(f64::NEG_INFINITY, f64::max),
        max_abs_derivative: per_direction
            .iter()
            .filter_map(|r| r.derivative)
            .fold(0.0, |a, d| a.max(d.abs())),
        per_direction,
        witnesses,
        oracle: body.is_origin_symmetric(1e-9 * body.scale()),
        verdict,
        note: symmetry::NOTE,
    })
}

/// Both sides of the limit identity linking the slopes `W̃′_{l,ξ}(0)` to the
/// odd harmonics of `ρ^{n−2−l}` (or `log ρ` when `l = n − 2`).
#[derive(Clone, Debug, Serialize)]
pub struct LimitIdentity {
    pub harmonic: RealHarmonic,
    pub l: usize,
    /// `−∫ H(ξ) W̃′_{l,ξ}(0) dξ`.
    pub lhs: f64,
    /// `|S^{n−2}| · c_l · λ_m(1) · ∫ H g`.
    pub rhs: f64,
    pub lambda: f64,
    /// `∫ H g` with `g = ρ^{n−2−l}` or `log ρ`.
    pub harmonic_integral: f64,
    /// `|S^{n−2}|`, the total mass of the section quadrature.
    pub normalization: f64,
}

/// Limit identity for the zonal harmonic of odd degree `m` (`n = 3`).
pub fn verify_limit_identity(body: &RadialBody, l: usize, m: usize, quad: &SphereQuadrature) -> Result<LimitIdentity> {
    if m % 2 == 0 {
        return Err(Error::InvalidArgument(format!("degree {m} must be odd")));
    }
    verify_limit_identity_for(body, l, RealHarmonic::zonal(m), quad)
}

pub fn verify_limit_identity_for(
    body: &RadialBody,
    l: usize,
    h: RealHarmonic,
    quad: &SphereQuadrature,
) -> Result<LimitIdentity> {
    let n = body.dim();
    if n != 3 || quad.dim() != 3 {
        return Err(Error::HarmonicDimension);
    }
    if l > n - 2 {
        return Err(Error::InvalidArgument(format!("need 0 ≤ l ≤ {}, got {l}", n - 2)));
    }
    let m = h.degree;
    let section_quad = SphereQuadrature::default_for(n - 1)?;
    let mut lhs = 0.0;
    let mut integral = 0.0;
    let origin = [0.0; MAXD];
    for (xi, w) in quad.nodes().iter().zip(quad.weights()) {
        let hv = h.eval(xi);
        let sd = SectionDual::with_quadrature(body, xi, l, &section_quad)?;
        lhs -= w * hv * sd.derivative_at_zero();
        let rho = body.radial_from_slice(&origin[..n], xi.as_slice());
        let g = if l == n - 2 {
            rho.ln()
        } else {
            rho.powi((n - 2 - l) as i32)
        };
        integral += w * hv * g;
    }
    let lambda = lambda_m(n, l, m, 1.0)?;
    let (nf, lf) = (n as f64, l as f64);
    let coeff = if l == n - 2 {
        lambda / (nf - 1.0)
    } else {
        (nf - 1.0 - lf) * lambda / ((nf - 2.0 - lf) * (nf - 1.0))
    };
    let normalization = sphere_area(n - 1);
    Ok(LimitIdentity {
        harmonic: h,
        l,
        lhs,
        rhs: normalization * coeff * integral,
        lambda,
        harmonic_integral: integral,
        normalization,
    })
}

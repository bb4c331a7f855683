//! Hyperplane sections `P ∩ {tξ + ξ⊥}` of a polytope.
//!
//! The boundary of a section is cut into simplices: in every facet `F_j`
//! that meets the hyperplane an apex `q_j` is placed on the segment between
//! a vertex above and a vertex below, and each piece `G ∩ {tξ + ξ⊥}` of a
//! ridge `G ⊂ F_j` is coned to it. Since `q_j` lies inside the convex set
//! `F_j ∩ {tξ + ξ⊥}` the cones never overlap and absolute determinants give
//! the measure directly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Vector, TAU};
use crate::polytope::Polytope;
use crate::search;

/// Unit-length slack accepted for `ξ`.
const UNIT_TOL: f64 = 1e-9;
/// Angular distance below which an auxiliary direction counts as lying in a
/// ridge flat.
const FLAT_TOL: f64 = 1e-6;
/// Sample points are moved this far (relative to the diameter) off vertex
/// heights.
pub const NUDGE: f64 = 1e-12;
/// Vertex heights closer than this (relative) form one breakpoint.
const MERGE: f64 = 1e-10;
/// Profile points within this relative distance of the maximum count as
/// maximisers.
const PLATEAU: f64 = 1e-9;

const MAX_DIM: usize = 4;

/// How the auxiliary vertex pair `(a, b)` of an active facet is picked.
///
/// Candidates are ordered by: direction `a − b` not parallel to a ridge
/// first, then by decreasing height spread, then by vertex indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ApexChoice {
    #[default]
    Widest,
    /// The k-th candidate (cyclically).
    Ranked(usize),
}

/// Crossing points, active facets and apexes of one section.
#[derive(Clone, Debug, Serialize)]
pub struct SectionSlice {
    pub direction: Vector,
    pub height: f64,
    /// Edge index → intersection of the edge with the hyperplane.
    pub crossings: BTreeMap<usize, Vector>,
    pub active_facets: Vec<usize>,
    /// Facet index → apex `q_j`.
    pub apexes: BTreeMap<usize, Vector>,
}

/// Which section functional a profile tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Perimeter,
    Volume,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Perimeter => "perimeter",
            Functional::Volume => "volume",
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn check_direction(p: &Polytope, xi: &Vector) -> Result<()> {
    if xi.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: xi.dim(),
        });
    }
    let norm = xi.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector (norm {norm})"
        )));
    }
    Ok(())
}

/// Reusable section evaluator for a fixed polytope and direction.
///
/// All buffers are allocated once; evaluating at a new height only touches
/// flat arrays. Heights exactly at a vertex are resolved by treating the
/// vertex as lying below, which gives the one-sided limit and keeps the
/// functionals continuous.
pub struct SectionEvaluator<'a> {
    p: &'a Polytope,
    n: usize,
    xi: Vector,
    heights: Vec<f64>,
    /// `(n−2)! √(1 − ⟨n_j, ξ⟩²)` per facet.
    denom: Vec<f64>,
    choice: ApexChoice,
    t: f64,
    prepared: bool,
    above: Vec<bool>,
    mask: Vec<bool>,
    pairs: Vec<Option<(usize, usize)>>,
    crossed: Vec<bool>,
    points: Vec<f64>,
    velocity: Vec<f64>,
    active: Vec<bool>,
    apex: Vec<f64>,
    apex_velocity: Vec<f64>,
}

impl<'a> SectionEvaluator<'a> {
    pub fn new(p: &'a Polytope, xi: &Vector) -> Result<Self> {
        check_direction(p, xi)?;
        let n = p.dim();
        if n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let heights = p.vertices().iter().map(|v| v.dot(xi)).collect();
        let fact = factorial(n - 2);
        let denom = p
            .facets()
            .iter()
            .map(|f| {
                let c = f.normal.dot(xi);
                fact * (1.0 - c * c).max(0.0).sqrt()
            })
            .collect();
        let ne = p.edges().len();
        let nf = p.facets().len();
        let nv = p.vertices().len();
        Ok(Self {
            p,
            n,
            xi: xi.clone(),
            heights,
            denom,
            choice: ApexChoice::Widest,
            t: f64::NAN,
            prepared: false,
            above: vec![false; nv],
            mask: Vec::new(),
            pairs: vec![None; nf],
            crossed: vec![false; ne],
            points: vec![0.0; ne * n],
            velocity: vec![0.0; ne * n],
            active: vec![false; nf],
            apex: vec![0.0; nf * n],
            apex_velocity: vec![0.0; nf * n],
        })
    }

    pub fn with_apex_choice(mut self, choice: ApexChoice) -> Self {
        self.choice = choice;
        self.mask.clear();
        self.prepared = false;
        self
    }

    pub fn polytope(&self) -> &Polytope {
        self.p
    }

    pub fn direction(&self) -> &Vector {
        &self.xi
    }

    /// `⟨v_k, ξ⟩` for every vertex.
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// `[min_k ⟨v_k, ξ⟩, max_k ⟨v_k, ξ⟩]`.
    pub fn support(&self) -> (f64, f64) {
        self.heights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| {
                (lo.min(h), hi.max(h))
            })
    }

    /// Errors when some vertex lies within `TAU · diam` of the hyperplane.
    pub fn check_generic(&self, t: f64) -> Result<()> {
        let tol = TAU * self.p.diameter();
        for (k, &h) in self.heights.iter().enumerate() {
            if (h - t).abs() <= tol {
                return Err(Error::DegenerateSection {
                    vertex: k,
                    distance: (h - t).abs(),
                });
            }
        }
        Ok(())
    }

    fn check_conditioning(&self) -> Result<()> {
        for (j, &d) in self.denom.iter().enumerate() {
            if self.active[j] && d < TAU {
                return Err(Error::IllConditionedFacet { facet: j });
            }
        }
        Ok(())
    }

    fn prepare(&mut self, t: f64) {
        if self.prepared && self.t == t {
            return;
        }
        let n = self.n;
        let p = self.p;
        for (a, &h) in self.above.iter_mut().zip(&self.heights) {
            *a = h > t;
        }
        for (e, edge) in p.edges().iter().enumerate() {
            let (u, v) = (edge.vertices[0], edge.vertices[1]);
            let cross = self.above[u] != self.above[v];
            self.crossed[e] = cross;
            if cross {
                let (hu, hv) = (self.heights[u], self.heights[v]);
                let (pu, pv) = (p.vertex(u), p.vertex(v));
                let s = (t - hu) / (hv - hu);
                let inv = 1.0 / (hv - hu);
                for i in 0..n {
                    let l = pv[i] - pu[i];
                    self.points[e * n + i] = pu[i] + s * l;
                    self.velocity[e * n + i] = l * inv;
                }
            }
        }
        for (j, f) in p.facets().iter().enumerate() {
            let first = self.above[f.vertices[0]];
            self.active[j] = f.vertices.iter().any(|&v| self.above[v] != first);
        }
        if self.mask != self.above {
            self.choose_pairs();
            self.mask.clone_from(&self.above);
        }
        for j in 0..p.facets().len() {
            if !self.active[j] {
                continue;
            }
            let (a, b) = self.pairs[j].expect("active facet has an auxiliary pair");
            let (ha, hb) = (self.heights[a], self.heights[b]);
            let (pa, pb) = (p.vertex(a), p.vertex(b));
            // q = w + m (t − ⟨w,ξ⟩)/⟨m,ξ⟩ with w the midpoint, m ∥ a − b
            let s = (t - 0.5 * (ha + hb)) / (ha - hb);
            let inv = 1.0 / (ha - hb);
            for i in 0..n {
                let d = pa[i] - pb[i];
                self.apex[j * n + i] = 0.5 * (pa[i] + pb[i]) + s * d;
                self.apex_velocity[j * n + i] = d * inv;
            }
        }
        self.t = t;
        self.prepared = true;
    }

    fn choose_pairs(&mut self) {
        let p = self.p;
        for (j, f) in p.facets().iter().enumerate() {
            self.pairs[j] = None;
            if !self.active[j] {
                continue;
            }
            let mut cands: Vec<(bool, f64, usize, usize)> = Vec::new();
            for &a in &f.vertices {
                if !self.above[a] {
                    continue;
                }
                for &b in &f.vertices {
                    if self.above[b] {
                        continue;
                    }
                    let m = (p.vertex(a) - p.vertex(b))
                        .normalized()
                        .expect("distinct vertices");
                    let in_flat = p
                        .facet_ridges(j)
                        .iter()
                        .any(|&r| linalg::residual(&m, p.ridge_basis(r)).norm() < FLAT_TOL);
                    cands.push((in_flat, self.heights[a] - self.heights[b], a, b));
                }
            }
            cands.sort_by(|x, y| {
                x.0.cmp(&y.0)
                    .then(y.1.total_cmp(&x.1))
                    .then(x.2.cmp(&y.2))
                    .then(x.3.cmp(&y.3))
            });
            let k = match self.choice {
                ApexChoice::Widest => 0,
                ApexChoice::Ranked(k) => k % cands.len(),
            };
            self.pairs[j] = Some((cands[k].2, cands[k].3));
        }
    }

    fn point(&self, e: usize) -> &[f64] {
        &self.points[e * self.n..(e + 1) * self.n]
    }

    /// Visits the boundary simplices of facet `j`, passing the crossed edges
    /// of each ridge piece.
    fn for_each_simplex(&self, j: usize, mut f: impl FnMut(&[usize])) {
        let n = self.n;
        let mut buf = [0usize; MAX_DIM];
        for &r in self.p.facet_ridges(j) {
            let mut k = 0;
            for &e in self.p.ridge_edges(r) {
                if self.crossed[e] {
                    if k < n - 2 {
                        buf[k] = e;
                    }
                    k += 1;
                }
            }
            if k == n - 2 {
                f(&buf[..k]);
            } else {
                debug_assert!(k == 0, "ridge section with {k} crossings");
            }
        }
    }

    /// `(Σ |det|, Σ sign·det')` over the simplices of facet `j`.
    fn facet_terms(&self, j: usize, derivative: bool) -> (f64, f64) {
        let n = self.n;
        let q = &self.apex[j * n..(j + 1) * n];
        let qv = &self.apex_velocity[j * n..(j + 1) * n];
        let normal = self.p.facets()[j].normal.as_slice();
        let xi = self.xi.as_slice();
        let mut measure = 0.0;
        let mut rate = 0.0;
        self.for_each_simplex(j, |edges| {
            let mut x = [[0.0; MAX_DIM]; MAX_DIM - 2];
            let mut dx = [[0.0; MAX_DIM]; MAX_DIM - 2];
            for (g, &e) in edges.iter().enumerate() {
                let pe = self.point(e);
                let ve = &self.velocity[e * n..(e + 1) * n];
                for i in 0..n {
                    x[g][i] = pe[i] - q[i];
                    dx[g][i] = ve[i] - qv[i];
                }
            }
            let mut cols: [&[f64]; MAX_DIM] = [&[]; MAX_DIM];
            let mut dcols: [&[f64]; MAX_DIM] = [&[]; MAX_DIM];
            let zero = [0.0; MAX_DIM];
            for g in 0..n - 2 {
                cols[g] = &x[g][..n];
                dcols[g] = &dx[g][..n];
            }
            cols[n - 2] = normal;
            cols[n - 1] = xi;
            dcols[n - 2] = &zero[..n];
            dcols[n - 1] = &zero[..n];
            let d = linalg::det_slices(&cols[..n]);
            measure += d.abs();
            if derivative {
                let sign = if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                rate += sign * linalg::det_derivative_slices(&cols[..n], &dcols[..n]);
            }
        });
        (measure / self.denom[j], rate / self.denom[j])
    }

    /// `vol_{n−2}(F_j ∩ {tξ + ξ⊥})`, 0 for inactive facets.
    pub fn facet_measure(&mut self, j: usize, t: f64) -> f64 {
        self.prepare(t);
        if !self.active[j] {
            return 0.0;
        }
        self.facet_terms(j, false).0
    }

    /// `vol_{n−2}(relbd(P ∩ {tξ + ξ⊥}))` without genericity checks.
    pub fn perimeter(&mut self, t: f64) -> f64 {
        self.prepare(t);
        (0..self.active.len())
            .filter(|&j| self.active[j])
            .map(|j| self.facet_terms(j, false).0)
            .sum()
    }

    /// Derivative of [`Self::perimeter`] in `t` (within a piece between
    /// vertex heights).
    pub fn perimeter_derivative(&mut self, t: f64) -> f64 {
        self.prepare(t);
        (0..self.active.len())
            .filter(|&j| self.active[j])
            .map(|j| self.facet_terms(j, true).1)
            .sum()
    }

    /// `vol_{n−1}(P ∩ {tξ + ξ⊥})` without genericity checks.
    pub fn volume(&mut self, t: f64) -> f64 {
        self.prepare(t);
        let n = self.n;
        let mut c = [0.0; MAX_DIM];
        let mut count = 0usize;
        for e in 0..self.crossed.len() {
            if self.crossed[e] {
                for (ci, pi) in c.iter_mut().zip(self.point(e)) {
                    *ci += pi;
                }
                count += 1;
            }
        }
        if count == 0 {
            return 0.0;
        }
        for ci in &mut c[..n] {
            *ci /= count as f64;
        }
        let xi = self.xi.as_slice();
        let mut total = 0.0;
        for j in 0..self.active.len() {
            if !self.active[j] {
                continue;
            }
            let q = &self.apex[j * n..(j + 1) * n];
            let mut qc = [0.0; MAX_DIM];
            for i in 0..n {
                qc[i] = q[i] - c[i];
            }
            self.for_each_simplex(j, |edges| {
                let mut x = [[0.0; MAX_DIM]; MAX_DIM - 2];
                let mut cols: [&[f64]; MAX_DIM] = [&[]; MAX_DIM];
                for (g, &e) in edges.iter().enumerate() {
                    let pe = self.point(e);
                    for i in 0..n {
                        x[g][i] = pe[i] - c[i];
                    }
                }
                for g in 0..n - 2 {
                    cols[g] = &x[g][..n];
                }
                cols[n - 2] = &qc[..n];
                cols[n - 1] = xi;
                total += linalg::det_slices(&cols[..n]).abs();
            });
        }
        total / factorial(n - 1)
    }

    /// Snapshot of the section at height `t`.
    pub fn slice(&mut self, t: f64) -> SectionSlice {
        self.prepare(t);
        let n = self.n;
        let crossings = (0..self.crossed.len())
            .filter(|&e| self.crossed[e])
            .map(|e| (e, Vector::new(self.point(e).to_vec())))
            .collect();
        let active_facets: Vec<usize> =
            (0..self.active.len()).filter(|&j| self.active[j]).collect();
        let apexes = active_facets
            .iter()
            .map(|&j| (j, Vector::new(self.apex[j * n..(j + 1) * n].to_vec())))
            .collect();
        SectionSlice {
            direction: self.xi.clone(),
            height: t,
            crossings,
            active_facets,
            apexes,
        }
    }

    fn checked(&mut self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("height {t} is not finite")));
        }
        self.check_generic(t)?;
        self.prepare(t);
        self.check_conditioning()
    }

    /// Samples the chosen functional between consecutive vertex heights and
    /// refines the best sample by golden-section search.
    pub fn profile(&mut self, functional: Functional, samples_per_piece: usize) -> SectionProfile {
        let diam = self.p.diameter();
        let mut hs = self.heights.clone();
        hs.sort_by(f64::total_cmp);
        let mut breakpoints: Vec<f64> = Vec::with_capacity(hs.len());
        for h in hs {
            match breakpoints.last() {
                Some(&b) if h - b <= MERGE * diam => {}
                _ => breakpoints.push(h),
            }
        }
        let support = (breakpoints[0], *breakpoints.last().expect("non-empty"));
        let delta = NUDGE * diam;
        let s = samples_per_piece.max(2);
        let eval = |ev: &mut Self, t: f64| match functional {
            Functional::Perimeter => ev.perimeter(t),
            Functional::Volume => ev.volume(t),
        };
        let mut samples: Vec<(f64, f64)> = Vec::with_capacity(s * breakpoints.len() + 1);
        for w in breakpoints.windows(2) {
            let (lo, hi) = (w[0] + delta, w[1] - delta);
            for k in 0..s {
                let t = lo + (hi - lo) * k as f64 / (s - 1) as f64;
                samples.push((t, eval(self, t)));
            }
        }
        let central_value = eval(self, 0.0);
        if support.0 < 0.0 && 0.0 < support.1 {
            samples.push((0.0, central_value));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));

        let ib = samples
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut candidates = samples.clone();
        if samples.len() >= 2 {
            let lo = samples[ib.saturating_sub(1)].0;
            let hi = samples[(ib + 1).min(samples.len() - 1)].0;
            let refined = search::golden_section_max(|t| eval(self, t), lo, hi, NUDGE * diam);
            candidates.push(refined);
        }
        let max_value = candidates
            .iter()
            .map(|c| c.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let max_location = candidates
            .iter()
            .filter(|c| c.1 >= max_value - PLATEAU * max_value.abs())
            .map(|c| c.0)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        SectionProfile {
            functional,
            direction: self.xi.clone(),
            support,
            breakpoints,
            samples,
            central_value,
            max_value,
            max_location,
        }
    }
}

/// Sampled profile `t ↦ functional(P ∩ {tξ + ξ⊥})`.
#[derive(Clone, Debug, Serialize)]
pub struct SectionProfile {
    pub functional: Functional,
    pub direction: Vector,
    pub support: (f64, f64),
    /// Distinct sorted vertex heights.
    pub breakpoints: Vec<f64>,
    pub samples: Vec<(f64, f64)>,
    pub central_value: f64,
    pub max_value: f64,
    /// Maximiser closest to 0.
    pub max_location: f64,
}

impl SectionProfile {
    /// `max_value − central_value`.
    pub fn margin(&self) -> f64 {
        self.max_value - self.central_value
    }

    pub fn to_csv(&self) -> String {
        let fmt = |xs: &mut dyn Iterator<Item = f64>| {
            xs.map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
        };
        let mut out = format!(
            "# xi={}; breakpoints={}; max={} at t={}; central={}\nt,{}\n",
            fmt(&mut self.direction.iter().copied()),
            fmt(&mut self.breakpoints.iter().copied()),
            self.max_value,
            self.max_location,
            self.central_value,
            self.functional.name()
        );
        for (t, v) in &self.samples {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}

/// Crossing points, active facets and apexes at height `t`.
pub fn crossing_points(p: &Polytope, xi: &Vector, t: f64) -> Result<SectionSlice> {
    let mut ev = SectionEvaluator::new(p, xi)?;
    ev.checked(t)?;
    Ok(ev.slice(t))
}

/// `vol_{n−2}(F_j ∩ {tξ + ξ⊥})` from the data stored in `slice`.
pub fn facet_section_measure(p: &Polytope, j: usize, slice: &SectionSlice) -> Result<f64> {
    let n = p.dim();
    if j >= p.facets().len() {
        return Err(Error::InvalidArgument(format!("facet index {j} out of range")));
    }
    let Some(q) = slice.apexes.get(&j) else {
        return Ok(0.0);
    };
    let normal = &p.facets()[j].normal;
    let c = normal.dot(&slice.direction);
    let root = (1.0 - c * c).max(0.0).sqrt();
    if root < TAU {
        return Err(Error::IllConditionedFacet { facet: j });
    }
    let mut total = 0.0;
    for &r in p.facet_ridges(j) {
        let pts: Vec<&Vector> = p
            .ridge_edges(r)
            .iter()
            .filter_map(|e| slice.crossings.get(e))
            .collect();
        if pts.len() != n - 2 {
            continue;
        }
        let mut cols: Vec<Vector> = pts.iter().map(|x| *x - q).collect();
        cols.push(normal.clone());
        cols.push(slice.direction.clone());
        let refs: Vec<&Vector> = cols.iter().collect();
        total += linalg::det_columns(&refs).abs();
    }
    Ok(total / (factorial(n - 2) * root))
}

/// `vol_{n−2}(relbd(P ∩ {tξ + ξ⊥}))`; 0 outside the support.
pub fn section_perimeter(p: &Polytope, xi: &Vector, t: f64) -> Result<f64> {
    let mut ev = SectionEvaluator::new(p, xi)?;
    ev.checked(t)?;
    Ok(ev.perimeter(t))
}

/// `vol_{n−1}(P ∩ {tξ + ξ⊥})`; 0 outside the support.
pub fn section_volume(p: &Polytope, xi: &Vector, t: f64) -> Result<f64> {
    let mut ev = SectionEvaluator::new(p, xi)?;
    ev.checked(t)?;
    Ok(ev.volume(t))
}

/// Derivative of the perimeter profile at `t = 0`.
pub fn perimeter_derivative_analytic(p: &Polytope, xi: &Vector) -> Result<f64> {
    p.require_origin_interior()?;
    perimeter_derivative_at(p, xi, 0.0)
}

/// Derivative of the perimeter profile at a height `t` off the vertex
/// heights.
pub fn perimeter_derivative_at(p: &Polytope, xi: &Vector, t: f64) -> Result<f64> {
    let mut ev = SectionEvaluator::new(p, xi)?;
    ev.checked(t)?;
    Ok(ev.perimeter_derivative(t))
}

fn profile(
    p: &Polytope,
    xi: &Vector,
    samples_per_piece: usize,
    functional: Functional,
) -> Result<SectionProfile> {
    p.require_origin_interior()?;
    check_direction(p, xi)?;
    let xi = crate::symmetry::ensure_generic(xi, p)?;
    let mut ev = SectionEvaluator::new(p, &xi)?;
    Ok(ev.profile(functional, samples_per_piece))
}

/// Perimeter profile along `ξ`; `ξ` is perturbed first when `ξ⊥` passes
/// through a vertex.
pub fn perimeter_profile(p: &Polytope, xi: &Vector, samples_per_piece: usize) -> Result<SectionProfile> {
    profile(p, xi, samples_per_piece, Functional::Perimeter)
}

/// Section-volume profile along `ξ`.
pub fn volume_profile(p: &Polytope, xi: &Vector, samples_per_piece: usize) -> Result<SectionProfile> {
    profile(p, xi, samples_per_piece, Functional::Volume)
}

//! Convex polytopes from vertex lists.
//!
//! A [`Polytope`] is built by brute-force facet enumeration: every affinely
//! independent n-subset of the input spans a candidate hyperplane, and the
//! candidates with all points on one side become facets. The face lattice is
//! the closure of the facet vertex sets under intersection, classified by
//! affine rank. This is O(Vⁿ⁺¹) and meant for V ≲ 40, n ∈ {3, 4}.
//!
//! The module also hosts the ridge constructions used by the structural
//! symmetry audits: the unit vector `η_G` of a ridge and the homothetic copy
//! `reflec(G, t)` of `−G` at height `t` along `η_G`.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Vector, TAU};

/// Relative tolerance used when matching vertex sets (reflec pairing).
pub const MATCH_TOL: f64 = 1e-6;

/// Relative tolerance for merging duplicate input points.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Facet {
    /// Outer unit normal `n_j`.
    pub normal: Vector,
    /// Offset `h_j` of the supporting hyperplane `⟨x, n_j⟩ = h_j`.
    pub offset: f64,
    /// Sorted indices of the vertices lying on the facet.
    pub vertices: Vec<usize>,
}

/// A k-face given by its vertex set and the facets containing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub facets: Vec<usize>,
}

/// The line `u + l s` carrying an edge; `u` is the first endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeLine {
    pub base: Vector,
    pub direction: Vector,
}

/// Full-dimensional convex polytope with V- and H-representation.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
    lattice: Vec<Vec<Face>>,
    diameter: f64,
    edge_lines: Vec<EdgeLine>,
    facet_ridges: Vec<Vec<usize>>,
    ridge_edges: Vec<Vec<usize>>,
    ridge_bases: Vec<Vec<Vector>>,
}

/// Builds the polytope `conv(points)` in ℝⁿ, n ∈ {3, 4}.
///
/// Points closer than `1e-9 · diam` are merged (with a warning) and points
/// that are not vertices of the hull are discarded.
pub fn hull_from_vertices(points: &[Vector], n: usize) -> Result<Polytope> {
    if !(3..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    for p in points {
        if p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
        if !p.is_finite() {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
    }
    let diam = diameter_of(points);
    if points.len() < n + 1 || diam == 0.0 {
        return Err(Error::NotFullDimensional { rank: 0, dim: n });
    }

    let mut kept: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if kept.iter().any(|q| q.distance(p) <= DEDUP_TOL * diam) {
            log::warn!("duplicate point {:?} dropped", p.as_slice());
        } else {
            kept.push(p.clone());
        }
    }
    let refs: Vec<&Vector> = kept.iter().collect();
    let rank = linalg::affine_rank(&refs, TAU);
    if rank < n {
        return Err(Error::NotFullDimensional { rank, dim: n });
    }

    let tol = TAU * diam;
    let m = kept.len();
    let mut candidates: Vec<(Vector, Vec<usize>, Vec<bool>)> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for combo in (0..m).combinations(n) {
        if candidates
            .iter()
            .any(|(_, _, mask)| combo.iter().all(|&i| mask[i]))
        {
            continue;
        }
        let base = &kept[combo[0]];
        let diffs: Vec<Vector> = combo[1..].iter().map(|&i| &kept[i] - base).collect();
        let span = linalg::orthonormalize(&diffs, 1e-9);
        if span.len() < n - 1 {
            continue;
        }
        let normal = linalg::complement_basis(&span)?.remove(0);
        let offset = normal.dot(base);
        let signed: Vec<f64> = kept.iter().map(|x| normal.dot(x) - offset).collect();
        let hi = signed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = signed.iter().copied().fold(f64::INFINITY, f64::min);
        let normal = if hi <= tol {
            normal
        } else if lo >= -tol {
            -&normal
        } else {
            continue;
        };
        let mask: Vec<bool> = signed.iter().map(|s| s.abs() <= tol).collect();
        let incident: Vec<usize> = (0..m).filter(|&i| mask[i]).collect();
        if seen.insert(incident.clone()) {
            candidates.push((normal, incident, mask));
        }
    }

    // a point is a vertex iff the normals of its facets span ℝⁿ
    let is_vertex: Vec<bool> = (0..m)
        .map(|i| {
            let normals: Vec<Vector> = candidates
                .iter()
                .filter(|(_, _, mask)| mask[i])
                .map(|(nrm, _, _)| nrm.clone())
                .collect();
            linalg::rank(&normals, 1e-6) == n
        })
        .collect();
    let mut remap = vec![usize::MAX; m];
    let mut vertices = Vec::new();
    for i in 0..m {
        if is_vertex[i] {
            remap[i] = vertices.len();
            vertices.push(kept[i].clone());
        }
    }
    let facets: Vec<Facet> = candidates
        .into_iter()
        .map(|(normal, incident, _)| {
            let verts: Vec<usize> = incident
                .into_iter()
                .filter(|&i| is_vertex[i])
                .map(|i| remap[i])
                .collect();
            let offset =
                verts.iter().map(|&v| normal.dot(&vertices[v])).sum::<f64>() / verts.len() as f64;
            Facet {
                normal,
                offset,
                vertices: verts,
            }
        })
        .collect();
    Ok(Polytope::assemble(n, vertices, facets))
}

/// All k-faces of `p`.
pub fn faces(p: &Polytope, k: usize) -> &[Face] {
    p.faces(k)
}

impl Polytope {
    fn assemble(dim: usize, vertices: Vec<Vector>, facets: Vec<Facet>) -> Self {
        let diameter = diameter_of(&vertices);
        let lattice = face_lattice(dim, &vertices, &facets);
        let edge_lines = lattice[1]
            .iter()
            .map(|e| {
                let a = &vertices[e.vertices[0]];
                let b = &vertices[e.vertices[1]];
                EdgeLine {
                    base: a.clone(),
                    direction: (b - a).normalized().expect("distinct edge endpoints"),
                }
            })
            .collect();
        let ridges = &lattice[dim - 2];
        let facet_ridges = (0..facets.len())
            .map(|j| {
                ridges
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.facets.contains(&j))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let ridge_edges = ridges
            .iter()
            .map(|r| {
                lattice[1]
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.vertices.iter().all(|v| r.vertices.contains(v)))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let ridge_bases = ridges
            .iter()
            .map(|r| {
                let base = &vertices[r.vertices[0]];
                let diffs: Vec<Vector> =
                    r.vertices[1..].iter().map(|&v| &vertices[v] - base).collect();
                linalg::orthonormalize(&diffs, 1e-9)
            })
            .collect();
        Self {
            dim,
            vertices,
            facets,
            lattice,
            diameter,
            edge_lines,
            facet_ridges,
            ridge_edges,
            ridge_bases,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vector {
        &self.vertices[i]
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// k-faces for `0 ≤ k ≤ n − 1`.
    pub fn faces(&self, k: usize) -> &[Face] {
        assert!(k < self.dim, "face dimension {k} out of range");
        &self.lattice[k]
    }

    pub fn edges(&self) -> &[Face] {
        &self.lattice[1]
    }

    pub fn ridges(&self) -> &[Face] {
        &self.lattice[self.dim - 2]
    }

    pub fn edge_line(&self, e: usize) -> &EdgeLine {
        &self.edge_lines[e]
    }

    /// Ridge indices contained in facet `j`.
    pub fn facet_ridges(&self, j: usize) -> &[usize] {
        &self.facet_ridges[j]
    }

    /// Edge indices contained in ridge `r`.
    pub fn ridge_edges(&self, r: usize) -> &[usize] {
        &self.ridge_edges[r]
    }

    /// Orthonormal basis of the direction space of ridge `r`.
    pub fn ridge_basis(&self, r: usize) -> &[Vector] {
        &self.ridge_bases[r]
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// True when every facet offset exceeds `TAU · diam`.
    pub fn origin_interior(&self) -> bool {
        self.facets
            .iter()
            .all(|f| f.offset > TAU * self.diameter)
    }

    pub(crate) fn require_origin_interior(&self) -> Result<()> {
        if self.origin_interior() {
            Ok(())
        } else {
            Err(Error::OriginNotInterior)
        }
    }

    /// Rebuilds the hull of the image of the vertex set under `f`.
    pub fn map_vertices(&self, f: impl Fn(&Vector) -> Vector) -> Result<Polytope> {
        let pts: Vec<Vector> = self.vertices.iter().map(f).collect();
        hull_from_vertices(&pts, self.dim)
    }

    pub fn translated(&self, c: &Vector) -> Result<Polytope> {
        self.map_vertices(|v| v + c)
    }

    pub fn scaled(&self, s: f64) -> Result<Polytope> {
        self.map_vertices(|v| v * s)
    }

    /// Signed distance of the origin to the facet hyperplanes, minimised.
    pub fn inradius_at_origin(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_file(&self) -> PolytopeFile {
        PolytopeFile {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.as_slice().to_vec()).collect(),
            facets: Some(
                self.facets
                    .iter()
                    .map(|f| FacetRecord {
                        normal: f.normal.as_slice().to_vec(),
                        offset: f.offset,
                        vertices: f.vertices.clone(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("polytope serializes")
    }

    pub fn from_json(s: &str) -> Result<Polytope> {
        let file: PolytopeFile = serde_json::from_str(s)?;
        file.build()
    }
}

/// On-disk polytope description. Facets are informational only and are
/// always recomputed from the vertices on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetRecord>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetRecord {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

impl PolytopeFile {
    pub fn build(&self) -> Result<Polytope> {
        let pts: Vec<Vector> = self.vertices.iter().cloned().map(Vector::new).collect();
        hull_from_vertices(&pts, self.dim)
    }
}

fn diameter_of(points: &[Vector]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(a.distance(b));
        }
    }
    d
}

fn face_lattice(n: usize, vertices: &[Vector], facets: &[Facet]) -> Vec<Vec<Face>> {
    let mut all: BTreeSet<Vec<usize>> = facets.iter().map(|f| f.vertices.clone()).collect();
    let mut queue: Vec<Vec<usize>> = all.iter().cloned().collect();
    while let Some(face) = queue.pop() {
        for f in facets {
            let inter: Vec<usize> = face
                .iter()
                .copied()
                .filter(|v| f.vertices.binary_search(v).is_ok())
                .collect();
            if !inter.is_empty() && all.insert(inter.clone()) {
                queue.push(inter);
            }
        }
    }
    let mut lattice: Vec<Vec<Face>> = vec![Vec::new(); n];
    for set in all {
        let pts: Vec<&Vector> = set.iter().map(|&i| &vertices[i]).collect();
        let k = linalg::affine_rank(&pts, 1e-9);
        if k >= n {
            continue;
        }
        let containing = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| set.iter().all(|v| f.vertices.binary_search(v).is_ok()))
            .map(|(j, _)| j)
            .collect();
        lattice[k].push(Face {
            dim: k,
            vertices: set,
            facets: containing,
        });
    }
    lattice
}

/// Foot of the perpendicular from the origin to `aff(G)`.
pub fn perpendicular_foot(g: &Face, p: &Polytope) -> Vector {
    let base = p.vertex(g.vertices[0]);
    let diffs: Vec<Vector> = g.vertices[1..]
        .iter()
        .map(|&v| p.vertex(v) - base)
        .collect();
    let basis = linalg::orthonormalize(&diffs, 1e-9);
    linalg::residual(base, &basis)
}

/// The unit vector `η_G` with `ℝη_G ⊥ aff(G)` and `G ⊂ {⟨x, η_G⟩ ≤ 0}`.
pub fn eta(g: &Face, p: &Polytope) -> Result<Vector> {
    let foot = perpendicular_foot(g, p);
    let dist = foot.norm();
    if dist <= TAU * p.diameter().max(1.0) {
        return Err(Error::FaceThroughOrigin);
    }
    let eta = &foot * (-1.0 / dist);
    debug_assert!(g
        .vertices
        .iter()
        .all(|&v| (p.vertex(v).dot(&eta) + dist).abs() <= 1e-7 * p.diameter().max(1.0)));
    Ok(eta)
}

/// Vertices of `reflec(G, t)`: the homothetic copy of `−G` in the hyperplane
/// `⟨x, η_G⟩ = t`, i.e. `(−t/|p|) g` for each vertex `g` of `G`.
pub fn reflec(g: &Face, p: &Polytope, t: f64) -> Result<Vec<Vector>> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::NonPositiveHeight(t));
    }
    let foot = perpendicular_foot(g, p);
    let dist = foot.norm();
    if dist <= TAU * p.diameter().max(1.0) {
        return Err(Error::FaceThroughOrigin);
    }
    let s = -t / dist;
    Ok(g.vertices.iter().map(|&v| p.vertex(v) * s).collect())
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Vector], b: &[Vector]) -> f64 {
    let one_way = |x: &[Vector], y: &[Vector]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.distance(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[derive(Clone, Debug, Serialize)]
pub struct RidgeAudit {
    pub ridge: usize,
    pub vertices: Vec<usize>,
    /// Index of the ridge matching `reflec(G, t*)`, if any.
    pub partner: Option<usize>,
    /// The matching height `t*`.
    pub height: Option<f64>,
    /// Smallest Hausdorff distance seen over candidate ridges, relative to the
    /// diameter. Reported for unpaired ridges to expose near misses.
    pub best_relative_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReflecAudit {
    pub ridges: Vec<RidgeAudit>,
    pub paired: usize,
    pub passed: bool,
}

/// For each ridge `G`, searches the ridges `G'` for one whose vertex set equals
/// `reflec(G, t*)` with `t* = ⟨g', η_G⟩ > 0`, matched within
/// `MATCH_TOL · diam` in Hausdorff distance.
pub fn reflec_face_audit(p: &Polytope) -> Result<ReflecAudit> {
    p.require_origin_interior()?;
    let tol = MATCH_TOL * p.diameter();
    let ridges = p.ridges();
    let mut out = Vec::with_capacity(ridges.len());
    for (ri, g) in ridges.iter().enumerate() {
        let eta_g = eta(g, p)?;
        let mut partner = None;
        let mut best = f64::INFINITY;
        for (rj, other) in ridges.iter().enumerate() {
            if rj == ri || other.vertices.len() != g.vertices.len() {
                continue;
            }
            let t_star = p.vertex(other.vertices[0]).dot(&eta_g);
            if t_star <= TAU * p.diameter() {
                continue;
            }
            let image = reflec(g, p, t_star)?;
            let target: Vec<Vector> = other.vertices.iter().map(|&v| p.vertex(v).clone()).collect();
            let d = hausdorff(&image, &target);
            best = best.min(d);
            if d <= tol {
                partner = Some((rj, t_star));
                break;
            }
        }
        out.push(RidgeAudit {
            ridge: ri,
            vertices: g.vertices.clone(),
            partner: partner.map(|x| x.0),
            height: partner.map(|x| x.1),
            best_relative_distance: if partner.is_some() {
                0.0
            } else {
                best / p.diameter()
            },
        });
    }
    let paired = out.iter().filter(|r| r.partner.is_some()).count();
    Ok(ReflecAudit {
        passed: paired == out.len(),
        paired,
        ridges: out,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexRay {
    pub vertex: usize,
    /// Vertices `w ≠ v` on the opposite ray, `w = λ v` with `λ < 0`.
    pub partners: Vec<usize>,
    /// `|w| / |v|` when there is exactly one partner.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeCorrespondence {
    pub edge: [usize; 2],
    pub image: Option<[usize; 2]>,
    pub parallel: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexRayAudit {
    pub vertices: Vec<VertexRay>,
    pub edges: Vec<EdgeCorrespondence>,
    /// Every vertex has exactly one partner on the opposite ray.
    pub exactly_one: bool,
    /// Every edge maps to a parallel edge between the partners.
    pub edges_parallel: bool,
    /// All ratios equal one (the conclusion `ṽ = −v`).
    pub unit_ratios: bool,
    pub passed: bool,
}

/// For each vertex `v`, lists the vertices on the ray `−ℝ₊v` and checks the
/// edge correspondence `E(u, v) ↦ E(ũ, ṽ)`.
pub fn vertex_ray_pairs(p: &Polytope) -> Result<VertexRayAudit> {
    p.require_origin_interior()?;
    let ang_tol = MATCH_TOL;
    let units: Vec<Vector> = p
        .vertices()
        .iter()
        .map(|v| v.normalized().expect("origin is interior, so no vertex is zero"))
        .collect();
    let rays: Vec<VertexRay> = (0..units.len())
        .map(|i| {
            let partners: Vec<usize> = (0..units.len())
                .filter(|&j| j != i && (&units[i] + &units[j]).norm() <= ang_tol)
                .collect();
            let ratio = (partners.len() == 1)
                .then(|| p.vertex(partners[0]).norm() / p.vertex(i).norm());
            VertexRay {
                vertex: i,
                partners,
                ratio,
            }
        })
        .collect();
    let exactly_one = rays.iter().all(|r| r.partners.len() == 1);
    let unit_ratios = exactly_one
        && rays
            .iter()
            .all(|r| (r.ratio.unwrap_or(0.0) - 1.0).abs() <= MATCH_TOL);

    let mut edges = Vec::new();
    for e in p.edges() {
        let (u, v) = (e.vertices[0], e.vertices[1]);
        let (pu, pv) = (&rays[u].partners, &rays[v].partners);
        if pu.len() != 1 || pv.len() != 1 {
            edges.push(EdgeCorrespondence {
                edge: [u, v],
                image: None,
                parallel: false,
            });
            continue;
        }
        let (tu, tv) = (pu[0], pv[0]);
        let mut key = [tu, tv];
        key.sort_unstable();
        let exists = p.edges().iter().any(|f| f.vertices[..] == key[..]);
        let d1 = (p.vertex(v) - p.vertex(u)).normalized();
        let d2 = (p.vertex(tv) - p.vertex(tu)).normalized();
        let parallel = exists
            && match (d1, d2) {
                (Some(a), Some(b)) => (&a + &b).norm() <= ang_tol || (&a - &b).norm() <= ang_tol,
                _ => false,
            };
        edges.push(EdgeCorrespondence {
            edge: [u, v],
            image: exists.then_some([tu, tv]),
            parallel,
        });
    }
    let edges_parallel = edges.iter().all(|e| e.parallel);
    Ok(VertexRayAudit {
        passed: exactly_one && edges_parallel,
        exactly_one,
        edges_parallel,
        unit_ratios,
        vertices: rays,
        edges,
    })
}

/// Ground-truth check of `P = −P`: every vertex's negation lies within
/// `tol` of a distinct vertex.
pub fn is_origin_symmetric(p: &Polytope, tol: f64) -> bool {
    let verts = p.vertices();
    let mut used = vec![false; verts.len()];
    for v in verts {
        let neg = -v;
        let hit = verts
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, w.distance(&neg)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match hit {
            Some((j, d)) if d <= tol => used[j] = true,
            _ => return false,
        }
    }
    true
}

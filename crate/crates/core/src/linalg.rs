//! Dense small-dimension linear algebra.
//!
//! Everything here is sized for "desk scale" geometry (n ≤ 6). Vectors are
//! heap backed so that the dimension can be chosen at run time, but the
//! determinant works on a stack buffer to keep the section hot path cheap.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for geometric predicates.
pub const TAU: f64 = 1e-9;

/// A point or direction in ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// The `k`-th standard basis vector of ℝⁿ.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    #[inline]
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// `self += a * x`
    #[inline]
    pub fn axpy(&mut self, a: f64, x: &Vector) {
        for (s, v) in self.0.iter_mut().zip(&x.0) {
            *s += a * v;
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, rhs: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * rhs).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl AddAssign<&Vector> for Vector {
    fn add_assign(&mut self, rhs: &Vector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Vector> for Vector {
    fn sub_assign(&mut self, rhs: &Vector) {
        self.axpy(-1.0, rhs);
    }
}

/// Square matrix stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    columns: Vec<Vector>,
}

impl SquareMatrix {
    pub fn from_columns(columns: Vec<Vector>) -> Result<Self> {
        let n = columns.len();
        if let Some(bad) = columns.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(Self { columns })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            columns: (0..n).map(|k| Vector::unit(n, k)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Vector {
        &self.columns[j]
    }

    /// `M x` where `M` has the stored columns.
    pub fn apply(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (c, xi) in self.columns.iter().zip(x.iter()) {
            out.axpy(*xi, c);
        }
        out
    }

    pub fn det(&self) -> f64 {
        let cols: Vec<&Vector> = self.columns.iter().collect();
        det_columns(&cols)
    }

    /// Solves `M x = b` by partial-pivot elimination. `None` when singular.
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        let n = self.dim();
        // row-major augmented copy
        let mut a = vec![0.0; n * (n + 1)];
        for (j, c) in self.columns.iter().enumerate() {
            for i in 0..n {
                a[i * (n + 1) + j] = c[i];
            }
        }
        for i in 0..n {
            a[i * (n + 1) + n] = b[i];
        }
        let w = n + 1;
        for k in 0..n {
            let piv = (k..n).max_by(|&r, &s| a[r * w + k].abs().total_cmp(&a[s * w + k].abs()))?;
            if a[piv * w + k] == 0.0 {
                return None;
            }
            if piv != k {
                for c in 0..w {
                    a.swap(k * w + c, piv * w + c);
                }
            }
            for r in (k + 1)..n {
                let f = a[r * w + k] / a[k * w + k];
                for c in k..w {
                    a[r * w + c] -= f * a[k * w + c];
                }
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = a[k * w + n];
            for c in (k + 1)..n {
                s -= a[k * w + c] * x[c];
            }
            x[k] = s / a[k * w + k];
        }
        Some(Vector(x))
    }
}

const STACK_DET: usize = 8;

/// Determinant of the matrix whose columns are `cols`.
///
/// Gaussian elimination with partial pivoting; an exactly vanishing pivot
/// column yields `0`.
pub fn det_columns(cols: &[&Vector]) -> f64 {
    let mut buf: [&[f64]; STACK_DET] = [&[]; STACK_DET];
    if cols.len() <= STACK_DET {
        for (b, c) in buf.iter_mut().zip(cols) {
            *b = c.as_slice();
        }
        det_slices(&buf[..cols.len()])
    } else {
        let v: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        det_slices(&v)
    }
}

/// [`det_columns`] on raw coordinate slices.
pub fn det_slices(cols: &[&[f64]]) -> f64 {
    let n = cols.len();
    debug_assert!(cols.iter().all(|c| c.len() == n));
    match n {
        0 => return 1.0,
        1 => return cols[0][0],
        2 => return cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1],
        3 => {
            let (a, b, c) = (cols[0], cols[1], cols[2]);
            return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1])
                + c[0] * (a[1] * b[2] - a[2] * b[1]);
        }
        _ => {}
    }
    if n <= STACK_DET {
        let mut buf = [0.0f64; STACK_DET * STACK_DET];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                buf[i * n + j] = c[i];
            }
        }
        eliminate(&mut buf[..n * n], n)
    } else {
        let mut buf = vec![0.0; n * n];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                buf[i * n + j] = c[i];
            }
        }
        eliminate(&mut buf, n)
    }
}

fn eliminate(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for r in (k + 1)..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for r in (k + 1)..n {
            let f = a[r * n + k] / p;
            if f != 0.0 {
                for c in (k + 1)..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
    }
    det
}

pub fn det(m: &SquareMatrix) -> f64 {
    m.det()
}

/// Derivative of `t ↦ det(f_1(t), …, f_n(t))` from the column values
/// `f_j(t₀)` and their derivatives `f_j'(t₀)`:
/// `F'(t₀) = Σ_j det(f_1, …, f_j', …, f_n)`.
pub fn det_derivative(values: &[Vector], derivs: &[Vector]) -> f64 {
    assert_eq!(values.len(), derivs.len(), "column count mismatch");
    let v: Vec<&[f64]> = values.iter().map(Vector::as_slice).collect();
    let d: Vec<&[f64]> = derivs.iter().map(Vector::as_slice).collect();
    det_derivative_slices(&v, &d)
}

/// [`det_derivative`] on raw slices. All-zero derivative columns are skipped.
pub fn det_derivative_slices(values: &[&[f64]], derivs: &[&[f64]]) -> f64 {
    let n = values.len();
    let mut cols: [&[f64]; STACK_DET] = [&[]; STACK_DET];
    let mut heap: Vec<&[f64]>;
    let cols: &mut [&[f64]] = if n <= STACK_DET {
        cols[..n].copy_from_slice(values);
        &mut cols[..n]
    } else {
        heap = values.to_vec();
        &mut heap
    };
    let mut total = 0.0;
    for j in 0..n {
        if derivs[j].iter().all(|&x| x == 0.0) {
            continue;
        }
        cols[j] = derivs[j];
        total += det_slices(cols);
        cols[j] = values[j];
    }
    total
}

/// Gram–Schmidt on `vectors`, discarding any vector whose residual norm is at
/// most `tol` times its original norm. The result is orthonormal.
pub fn orthonormalize(vectors: &[Vector], tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let r = residual(v, &basis);
        // second pass restores orthogonality lost to cancellation
        let r = residual(&r, &basis);
        let rn = r.norm();
        if rn > tol * scale {
            basis.push(&r * (1.0 / rn));
        }
    }
    basis
}

/// Component of `v` orthogonal to the span of the orthonormal `basis`.
pub fn residual(v: &Vector, basis: &[Vector]) -> Vector {
    let mut r = v.clone();
    for b in basis {
        let c = r.dot(b);
        r.axpy(-c, b);
    }
    r
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)`.
///
/// The input must be non-empty and linearly independent.
pub fn complement_basis(vectors: &[Vector]) -> Result<Vec<Vector>> {
    let n = vectors
        .first()
        .map(Vector::dim)
        .ok_or_else(|| Error::InvalidArgument("complement of an empty list".into()))?;
    if let Some(bad) = vectors.iter().find(|v| v.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let mut basis = orthonormalize(vectors, 1e-9);
    if basis.len() < vectors.len() {
        return Err(Error::DegenerateSpan);
    }
    let k = basis.len();
    while basis.len() < n {
        // pick the standard basis vector with the largest residual
        let r = (0..n)
            .map(|i| residual(&Vector::unit(n, i), &basis))
            .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
            .expect("n > 0");
        let r = residual(&r, &basis);
        let rn = r.norm();
        basis.push(&r * (1.0 / rn));
    }
    Ok(basis.split_off(k))
}

/// Affine rank (dimension of the affine hull) of a point set.
pub fn affine_rank(points: &[&Vector], tol: f64) -> usize {
    match points.split_first() {
        None => 0,
        Some((first, rest)) => {
            let diffs: Vec<Vector> = rest.iter().map(|p| *p - first).collect();
            let scale = diffs.iter().map(Vector::norm).fold(0.0, f64::max);
            if scale == 0.0 {
                return 0;
            }
            rank_with_scale(&diffs, tol * scale)
        }
    }
}

fn rank_with_scale(vectors: &[Vector], abs_tol: f64) -> usize {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let r = residual(&residual(v, &basis), &basis);
        let rn = r.norm();
        if rn > abs_tol {
            basis.push(&r * (1.0 / rn));
        }
    }
    basis.len()
}

/// Linear rank of a set of vectors with absolute tolerance.
pub fn rank(vectors: &[Vector], abs_tol: f64) -> usize {
    rank_with_scale(vectors, abs_tol)
}

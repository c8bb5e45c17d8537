use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square complex matrix; all traces are normalized so that `τ(1) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix(DMatrix<Complex64>);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        DenseMatrix(DMatrix::from_fn(n, n, f))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare(n, r.len()));
        }
        Ok(Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn try_from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DenseMatrix(m))
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.0[(i, j)] = z;
    }

    pub fn add(&self, rhs: &Self) -> Self {
        DenseMatrix(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        DenseMatrix(&self.0 - &rhs.0)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        DenseMatrix(&self.0 * &rhs.0)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        DenseMatrix(&self.0 * z)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn axpy(&mut self, z: Complex64, x: &Self) {
        self.0.zip_apply(&x.0, |a, b| *a += z * b);
    }

    pub fn adjoint(&self) -> Self {
        DenseMatrix(self.0.adjoint())
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        DenseMatrix(self.0.kronecker(&rhs.0))
    }

    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let (a, b) = (self.dim(), rhs.dim());
        let mut out = DMatrix::zeros(a + b, a + b);
        out.view_mut((0, 0), (a, a)).copy_from(&self.0);
        out.view_mut((a, a), (b, b)).copy_from(&rhs.0);
        DenseMatrix(out)
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// `τ(x) = Tr(x) / N`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.0.trace() / self.dim() as f64
    }

    /// `⟨x, y⟩ = τ(y* x)`.
    pub fn inner(&self, y: &Self) -> Complex64 {
        let s: Complex64 = self.0.iter().zip(y.0.iter()).map(|(x, y)| y.conj() * x).sum();
        s / self.dim() as f64
    }

    /// `‖x‖₂ = sqrt(τ(x* x))`.
    pub fn two_norm(&self) -> f64 {
        (self.0.norm_squared() / self.dim() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.dim() == rhs.dim() && self.sub(rhs).max_abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Distance `‖x − c·1‖₂` to the nearest scalar, `c = τ(x)`.
    pub fn distance_to_scalars(&self) -> f64 {
        let c = self.normalized_trace();
        self.sub(&Self::identity(self.dim()).scale(c)).two_norm()
    }

    /// Flattening in column-major order, as used by the `vec` trick.
    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn from_vector(n: usize, v: &DVector<Complex64>) -> Self {
        DenseMatrix(DMatrix::from_column_slice(n, n, v.as_slice()))
    }

    /// Entries as `[re, im]` pairs, row by row.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect())
            .collect()
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol) && self.approx_eq(&self.mul(self), tol)
    }

    /// Restriction to the coordinate subset `idx` (rows and columns).
    pub fn compress(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Places `x` on the coordinates `idx` of an otherwise zero `n × n` matrix.
    pub fn embed(x: &Self, n: usize, idx: &[usize]) -> Self {
        let mut out = Self::zeros(n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.set(i, j, x.get(a, b));
            }
        }
        out
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: Self) -> DenseMatrix {
        DenseMatrix::add(self, rhs)
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: Self) -> DenseMatrix {
        DenseMatrix::sub(self, rhs)
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: Self) -> DenseMatrix {
        DenseMatrix::mul(self, rhs)
    }
}

/// Serializable form: `[re, im]` entries row by row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseRows(pub Vec<Vec<[f64; 2]>>);

impl From<&DenseMatrix> for DenseRows {
    fn from(m: &DenseMatrix) -> Self {
        DenseRows(m.to_rows())
    }
}

impl TryFrom<DenseRows> for DenseMatrix {
    type Error = Error;
    fn try_from(rows: DenseRows) -> Result<Self> {
        let n = rows.0.len();
        if let Some(r) = rows.0.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare(n, r.len()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows.0[i][j][0], rows.0[i][j][1]));
        DenseMatrix::try_from_matrix(m)
    }
}

/// Orthonormal basis of the numerical null space of `map`.
///
/// A singular direction counts as null when its singular value is at most
/// `tol` times the largest one.
pub fn kernel_basis(map: &DMatrix<Complex64>, tol: f64) -> Result<Vec<DVector<Complex64>>> {
    if map.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let cols = map.ncols();
    if cols == 0 {
        return Ok(Vec::new());
    }
    // pad so the SVD returns a full set of right singular vectors
    let work = if map.nrows() < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (map.nrows(), cols)).copy_from(map);
        padded
    } else {
        map.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let largest = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * largest;
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect())
}

/// Rank of the Gram matrix `G_ij = τ(x_j* x_i)`, thresholded relative to its largest eigenvalue.
pub fn gram_rank(vectors: &[DenseMatrix], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let k = vectors.len();
    let mut g = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let z = vectors[i].inner(&vectors[j]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    let eig = g.symmetric_eigenvalues();
    let largest = eig.iter().cloned().fold(0.0, f64::max);
    if largest <= 0.0 {
        return 0;
    }
    eig.iter().filter(|&&e| e > tol * largest).count()
}

/// Trace-orthonormal family grown by modified Gram–Schmidt with one re-orthogonalization pass.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    dim: usize,
    elems: Vec<DenseMatrix>,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        OrthoBasis {
            dim,
            elems: Vec::new(),
        }
    }

    pub fn from_orthonormal(dim: usize, elems: Vec<DenseMatrix>) -> Self {
        OrthoBasis { dim, elems }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[DenseMatrix] {
        &self.elems
    }

    pub fn into_elements(self) -> Vec<DenseMatrix> {
        self.elems
    }

    fn residual(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut r = x.clone();
        for _ in 0..2 {
            for b in &self.elems {
                let c = r.inner(b);
                r.axpy(-c, b);
            }
        }
        r
    }

    /// Adds the component of `x` orthogonal to the current span when its norm
    /// exceeds `tol` relative to `‖x‖`; returns whether the span grew.
    pub fn push(&mut self, x: &DenseMatrix, tol: f64) -> bool {
        let scale = x.two_norm();
        if scale == 0.0 {
            return false;
        }
        let r = self.residual(x);
        let n = r.two_norm();
        if n <= tol * scale {
            return false;
        }
        self.elems.push(r.scale_real(1.0 / n));
        true
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for b in &self.elems {
            out.axpy(x.inner(b), b);
        }
        out
    }

    /// `‖x − P x‖₂`.
    pub fn distance(&self, x: &DenseMatrix) -> f64 {
        self.residual(x).two_norm()
    }

    pub fn contains(&self, x: &DenseMatrix, tol: f64) -> bool {
        self.distance(x) <= tol * x.two_norm().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::monomial::{clock, shift};

    #[test]
    fn trace_and_norm_basics() {
        assert_eq!(DenseMatrix::identity(5).normalized_trace(), Complex64::new(1.0, 0.0));
        assert_eq!(DenseMatrix::zeros(3).two_norm(), 0.0);
        assert!((DenseMatrix::identity(7).two_norm() - 1.0).abs() < 1e-15);
        assert!((clock(2).to_dense().two_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_of_trivial_maps() {
        let z = DMatrix::<Complex64>::zeros(4, 4);
        assert_eq!(kernel_basis(&z, 1e-9).unwrap().len(), 4);
        let id = DMatrix::<Complex64>::identity(4, 4);
        assert!(kernel_basis(&id, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn kernel_of_clock_commutator_is_diagonal() {
        let g = clock(2).to_dense();
        let i = DenseMatrix::identity(2);
        // vec(gX − Xg) = (1 ⊗ g − gᵀ ⊗ 1) vec(X)
        let map = i.kron(&g).sub(&DenseMatrix(g.0.transpose()).kron(&i));
        let ker = kernel_basis(map.as_matrix(), 1e-9).unwrap();
        assert_eq!(ker.len(), 2);
        for v in ker {
            let x = DenseMatrix::from_vector(2, &v);
            assert!(x.get(0, 1).norm() < 1e-12 && x.get(1, 0).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_rejects_nan() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(kernel_basis(&m, 1e-9), Err(Error::NonFinite)));
    }

    #[test]
    fn gram_rank_examples() {
        let one = DenseMatrix::identity(2);
        assert_eq!(gram_rank(&[one.clone(), one.clone()], 1e-9), 1);
        let (p, q) = (clock(2), shift(2));
        let pauli = [
            one,
            p.to_dense(),
            q.to_dense(),
            p.mul(&q).to_dense(),
        ];
        assert_eq!(gram_rank(&pauli, 1e-9), 4);
        assert_eq!(gram_rank(&[], 1e-9), 0);
    }

    #[test]
    fn ortho_basis_projects() {
        let mut b = OrthoBasis::new(2);
        assert!(b.push(&DenseMatrix::identity(2), 1e-9));
        assert!(!b.push(&DenseMatrix::identity(2).scale_real(3.0), 1e-9));
        assert!(b.push(&clock(2).to_dense(), 1e-9));
        let x = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, -1.0]]).unwrap();
        let diag = DenseMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(b.project(&x).approx_eq(&diag, 1e-12));
    }

    #[test]
    fn direct_sum_and_embed() {
        let a = DenseMatrix::identity(1);
        let b = clock(2).to_dense();
        let s = a.direct_sum(&b);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.get(2, 2), Complex64::new(-1.0, 0.0));
        let e = DenseMatrix::embed(&b, 4, &[1, 3]);
        assert!(e.compress(&[1, 3]).approx_eq(&b, 0.0));
    }
}

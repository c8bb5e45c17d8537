use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{capacity, Error, Result};
use crate::linalg::{DenseMatrix, MonomialMatrix, OrthoBasis};
use crate::report::{Check, Report};

/// Bound on `N²`, the number of unknowns in a dense commutant solve.
pub const COMMUTANT_CAPACITY: u128 = 1 << 10;

/// Trace-orthonormal basis of a unital *-subalgebra of `M_N`.
#[derive(Clone, Debug)]
pub struct SubalgebraBasis {
    basis: OrthoBasis,
    contains_identity: bool,
}

impl SubalgebraBasis {
    /// Orthonormalizes the span of `elems`; no closure is taken.
    pub fn from_span(n: usize, elems: &[DenseMatrix], tol: f64) -> Self {
        let mut basis = OrthoBasis::new(n);
        for x in elems {
            basis.push(x, tol);
        }
        Self::from_basis(basis, tol)
    }

    pub fn from_monomials(n: usize, mats: &[MonomialMatrix], tol: f64) -> Self {
        let dense: Vec<DenseMatrix> = mats.iter().map(|m| m.to_dense()).collect();
        Self::from_span(n, &dense, tol)
    }

    fn from_basis(basis: OrthoBasis, tol: f64) -> Self {
        let n = basis.ambient_dim();
        let contains_identity = basis.contains(&DenseMatrix::identity(n), tol.max(1e-10));
        SubalgebraBasis {
            basis,
            contains_identity,
        }
    }

    pub fn scalars(n: usize) -> Self {
        Self::from_span(n, &[DenseMatrix::identity(n)], 1e-12)
    }

    /// All of `M_N`, spanned by matrix units.
    pub fn full(n: usize) -> Self {
        let units: Vec<DenseMatrix> = (0..n * n)
            .map(|k| {
                let mut e = DenseMatrix::zeros(n);
                e.set(k % n, k / n, Complex64::new(1.0, 0.0));
                e
            })
            .collect();
        Self::from_span(n, &units, 1e-12)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    pub fn elements(&self) -> &[DenseMatrix] {
        self.basis.elements()
    }

    pub fn contains(&self, x: &DenseMatrix, tol: f64) -> bool {
        self.basis.contains(x, tol)
    }

    /// Trace-orthogonal projection onto the span.
    pub fn project(&self, x: &DenseMatrix) -> DenseMatrix {
        self.basis.project(x)
    }

    pub fn distance(&self, x: &DenseMatrix) -> f64 {
        self.basis.distance(x)
    }

    /// Largest distance of an adjoint or a product of basis elements from the span.
    pub fn closure_defect(&self) -> f64 {
        let b = self.elements();
        let mut worst: f64 = 0.0;
        for x in b {
            worst = worst.max(self.distance(&x.adjoint()));
            for y in b {
                worst = worst.max(self.distance(&x.mul(y)));
            }
        }
        worst
    }

    /// Whether two bases span the same space.
    pub fn same_span(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && other.elements().iter().all(|x| self.contains(x, tol))
    }
}

fn check_square(gens: &[DenseMatrix]) -> Result<usize> {
    let n = gens.first().map(|g| g.dim()).unwrap_or(0);
    if let Some(g) = gens.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch(g.dim(), n));
    }
    Ok(n)
}

/// Smallest unital *-subalgebra containing `generators`.
pub fn algebra_closure(generators: &[DenseMatrix], tol: f64) -> Result<SubalgebraBasis> {
    let n = check_square(generators)?;
    if n == 0 {
        return Err(Error::InvalidParams("closure needs at least one generator".into()));
    }
    let unknowns = (n as u128) * (n as u128);
    if unknowns > COMMUTANT_CAPACITY {
        return Err(capacity("closure unknowns N^2", unknowns, COMMUTANT_CAPACITY));
    }
    let mut basis = OrthoBasis::new(n);
    basis.push(&DenseMatrix::identity(n), tol);
    for g in generators {
        basis.push(g, tol);
        basis.push(&g.adjoint(), tol);
    }
    let limit = 2 * (unknowns as f64).log2().ceil() as usize + 4;
    let mut frontier: Vec<DenseMatrix> = basis.elements().to_vec();
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > limit {
            return Err(Error::NonConvergence(limit));
        }
        let current = basis.elements().to_vec();
        let mut fresh = Vec::new();
        for x in &frontier {
            for y in &current {
                for z in [x.mul(y), y.mul(x)] {
                    if basis.push(&z, tol) {
                        fresh.push(basis.elements().last().expect("just pushed").clone());
                    }
                }
            }
        }
        frontier = fresh;
    }
    Ok(SubalgebraBasis::from_basis(basis, tol))
}

/// Hermitian form `Σ_g C_g* C_g` with `C_g = 1⊗g − gᵀ⊗1`, the commutator map on column-major `vec X`.
fn commutator_form(gens: &[DenseMatrix], n: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut left = DMatrix::<Complex64>::zeros(n, n);
    let mut right = DMatrix::<Complex64>::zeros(n, n);
    let mut cross = DMatrix::<Complex64>::zeros(n * n, n * n);
    for g in gens {
        let g = g.as_matrix();
        let gbar = g.map(|z| z.conj());
        left += g.adjoint() * g;
        right += &gbar * g.transpose();
        cross += gbar.kronecker(g);
    }
    let mut h = id.kronecker(&left) + right.kronecker(&id);
    h -= &cross;
    h -= cross.adjoint();
    h
}

fn null_vectors(h: DMatrix<Complex64>, tol: f64) -> Vec<nalgebra::DVector<Complex64>> {
    let eig = h.symmetric_eigen();
    let largest = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = tol * largest.max(1.0);
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= cut)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// `{X : [g, X] = 0 for every basis element g}`.
pub fn commutant(sub: &SubalgebraBasis, tol: f64) -> Result<SubalgebraBasis> {
    commutant_of(sub.elements(), sub.ambient_dim(), tol)
}

/// Commutant of an arbitrary family in `M_n`.
pub fn commutant_of(gens: &[DenseMatrix], n: usize, tol: f64) -> Result<SubalgebraBasis> {
    if let Some(g) = gens.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch(g.dim(), n));
    }
    let unknowns = (n as u128) * (n as u128);
    if unknowns > COMMUTANT_CAPACITY {
        return Err(capacity("commutant unknowns N^2", unknowns, COMMUTANT_CAPACITY));
    }
    let h = commutator_form(gens, n);
    let scale = (n as f64).sqrt();
    let elems: Vec<DenseMatrix> = null_vectors(h, tol)
        .iter()
        .map(|v| DenseMatrix::from_vector(n, v).scale_real(scale))
        .collect();
    let basis = OrthoBasis::from_orthonormal(n, elems);
    Ok(SubalgebraBasis::from_basis(basis, tol))
}

/// `commutant(sub) ∩ span(ambient)`.
pub fn relative_commutant(sub: &SubalgebraBasis, ambient: &SubalgebraBasis, tol: f64) -> Result<SubalgebraBasis> {
    let n = ambient.ambient_dim();
    if sub.ambient_dim() != n {
        return Err(Error::DimensionMismatch(sub.ambient_dim(), n));
    }
    let a = ambient.elements();
    let k = a.len();
    let mut h = DMatrix::<Complex64>::zeros(k, k);
    for g in sub.elements() {
        let comms: Vec<DenseMatrix> = a.iter().map(|x| g.commutator(x)).collect();
        for i in 0..k {
            for j in i..k {
                let z = comms[j].inner(&comms[i]);
                h[(i, j)] += z;
                if i != j {
                    h[(j, i)] += z.conj();
                }
            }
        }
    }
    let elems: Vec<DenseMatrix> = null_vectors(h, tol)
        .iter()
        .map(|c| {
            let mut x = DenseMatrix::zeros(n);
            for (coef, b) in c.iter().zip(a) {
                x.axpy(*coef, b);
            }
            x
        })
        .collect();
    Ok(SubalgebraBasis::from_basis(OrthoBasis::from_orthonormal(n, elems), tol))
}

/// Trace-preserving conditional expectation onto `sub`.
pub fn conditional_expectation(x: &DenseMatrix, sub: &SubalgebraBasis) -> DenseMatrix {
    sub.project(x)
}

/// `(1/m) Σ_{j<m} u^j x u^{−j}`.
pub fn averaging_expectation(x: &DenseMatrix, u: &MonomialMatrix, order: u64) -> Result<DenseMatrix> {
    if u.dim() != x.dim() {
        return Err(Error::DimensionMismatch(u.dim(), x.dim()));
    }
    if order == 0 || !u.pow(order).is_identity() {
        return Err(Error::OrderMismatch(order));
    }
    let mut acc = x.clone();
    let mut y = x.clone();
    for _ in 1..order {
        y = u.conjugate_dense(&y);
        acc = acc.add(&y);
    }
    Ok(acc.scale_real(1.0 / order as f64))
}

/// `‖E(y)‖₂ ≈ 0` and `E(y* y) ∈ ℂ1`.
pub fn orthogonality_check(y: &DenseMatrix, sub: &SubalgebraBasis, tol: f64) -> Report {
    let mut report = Report::new();
    let ey = conditional_expectation(y, sub);
    report.push(Check::within(
        "orthogonality: E(y) = 0",
        "E(y) = 0",
        ey.two_norm(),
        tol,
        format!("|y|_2 = {:.3e}", y.two_norm()),
    ));
    let eyy = conditional_expectation(&y.adjoint().mul(y), sub);
    report.push(Check::within(
        "orthogonality: E(y*y) is scalar",
        "E(y* y) in C1",
        eyy.distance_to_scalars(),
        tol,
        format!("tau(y*y) = {:.6}", eyy.normalized_trace().re),
    ));
    report
}

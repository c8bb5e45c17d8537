use num_complex::Complex64;

use super::dense::DenseMatrix;
use super::monomial::MonomialMatrix;
use super::phase::Phase;
use crate::error::{Error, Result};

/// Linear combination of monomials of a common dimension.
///
/// Canonical form: every stored monomial has phase 1 in its first nonzero
/// column, the extracted phase lives in the coefficient, equal monomials are
/// merged and vanishing terms dropped.
#[derive(Clone, Debug, Default)]
pub struct MonomialSum {
    dim: usize,
    terms: Vec<(Complex64, MonomialMatrix)>,
}

const CANCEL: f64 = 1e-13;

fn normalize(m: &MonomialMatrix) -> (Phase, MonomialMatrix) {
    match m.columns().flatten().next() {
        Some((_, p)) if !p.is_one() => (p, m.scale(p.inv())),
        _ => (Phase::ONE, m.clone()),
    }
}

impl MonomialSum {
    pub fn zero(dim: usize) -> Self {
        MonomialSum {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn from_monomial(m: MonomialMatrix) -> Self {
        let mut s = Self::zero(m.dim());
        s.push(Complex64::new(1.0, 0.0), m);
        s
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Complex64, MonomialMatrix)>) -> Result<Self> {
        let mut s = Self::zero(dim);
        for (c, m) in terms {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(m.dim(), dim));
            }
            s.push(c, m);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Complex64, MonomialMatrix)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, c: Complex64, m: MonomialMatrix) {
        if m.is_zero() {
            return;
        }
        let (p, m) = normalize(&m);
        let c = c * p.to_complex();
        if let Some(pos) = self.terms.iter().position(|(_, t)| *t == m) {
            self.terms[pos].0 += c;
            if self.terms[pos].0.norm() < CANCEL {
                self.terms.swap_remove(pos);
            }
        } else if c.norm() >= CANCEL {
            self.terms.push((c, m));
        }
    }

    pub fn add_term(&mut self, c: Complex64, m: MonomialMatrix) {
        assert_eq!(m.dim(), self.dim, "monomial sum dimension");
        self.push(c, m);
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (c, m) in &rhs.terms {
            out.push(*c, m.clone());
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for (c, m) in &self.terms {
            out.push(c * z, m.clone());
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.push(a * b, x.mul(y));
            }
        }
        out
    }

    pub fn mul_monomial(&self, rhs: &MonomialMatrix) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            out.push(*a, x.mul(rhs));
        }
        out
    }

    pub fn left_mul_monomial(&self, lhs: &MonomialMatrix) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            out.push(*a, lhs.mul(x));
        }
        out
    }

    /// `g · x · g*`.
    pub fn conjugate(&self, g: &MonomialMatrix) -> Self {
        let ga = g.adjoint();
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            out.push(*a, g.mul(x).mul(&ga));
        }
        out
    }

    /// `(1/m) Σ_{j<m} g^j x g^{*j}`.
    pub fn average(&self, g: &MonomialMatrix, m: u64) -> Self {
        let mut out = Self::zero(self.dim);
        let mut power = MonomialMatrix::identity(self.dim);
        let w = Complex64::new(1.0 / m as f64, 0.0);
        for _ in 0..m {
            let pa = power.adjoint();
            for (a, x) in &self.terms {
                out.push(a * w, power.mul(x).mul(&pa));
            }
            power = power.mul(g);
        }
        out
    }

    pub fn normalized_trace(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, m)| c * m.normalized_trace())
            .sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for (c, m) in &self.terms {
            for (col, e) in m.columns().enumerate() {
                if let Some((row, p)) = e {
                    let z = out.get(row, col) + c * p.to_complex();
                    out.set(row, col, z);
                }
            }
        }
        out
    }

    /// Sum of coefficient magnitudes.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::monomial::{clock, shift};

    #[test]
    fn merges_equal_support_up_to_phase() {
        let p = clock(2);
        let minus = p.scale(Phase::root(2));
        let s = MonomialSum::from_terms(2, [(Complex64::new(1.0, 0.0), p.clone()), (Complex64::new(1.0, 0.0), minus)])
            .unwrap();
        assert!(s.is_empty());
        let t = MonomialSum::from_terms(2, [(Complex64::new(1.0, 0.0), p.clone()), (Complex64::new(2.0, 0.0), p)]).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t.terms()[0].0 - Complex64::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn average_of_shift_over_clock_vanishes() {
        let x = MonomialSum::from_monomial(shift(2));
        assert!(x.average(&clock(2), 2).is_empty());
        let y = MonomialSum::from_monomial(clock(2));
        assert_eq!(y.average(&clock(2), 2).len(), 1);
    }

    #[test]
    fn dense_image_matches() {
        let s = MonomialSum::from_monomial(clock(3)).add(&MonomialSum::from_monomial(shift(3)));
        let d = clock(3).to_dense().add(&shift(3).to_dense());
        assert!(s.to_dense().approx_eq(&d, 1e-14));
        assert!((s.normalized_trace() - d.normalized_trace()).norm() < 1e-14);
    }
}

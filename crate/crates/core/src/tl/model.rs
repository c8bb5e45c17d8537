use num_complex::Complex64;

use super::TLParams;
use crate::linalg::DenseMatrix;
use crate::report::{Check, Report};

/// Jones projections on a few coordinates, each coordinate standing for a block of
/// the given multiplicity, with the trace weight of each coordinate block.
#[derive(Clone, Debug)]
pub struct BlockModel {
    pub lambda: f64,
    /// Index of `e_matrices[0]`; the model holds `e_first, e_first+1, …`.
    pub first_index: usize,
    pub block_sizes: Vec<u64>,
    pub e_matrices: Vec<DenseMatrix>,
    /// `τ` of each coordinate unit `E_cc ⊗ 1`.
    pub weights: Vec<f64>,
    /// Off-diagonal positions allowed in the block form of elements commuting with
    /// the top projection; positions in one group carry the same entry.
    pub q_form: Vec<Vec<(usize, usize)>>,
}

fn weights_from_sizes(sizes: &[u64]) -> Vec<f64> {
    let total: u64 = sizes.iter().sum();
    sizes.iter().map(|&m| m as f64 / total as f64).collect()
}

fn sym(n: usize, entries: &[(usize, usize, f64)]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for &(i, j, x) in entries {
        m.set(i, j, Complex64::new(x, 0.0));
        m.set(j, i, Complex64::new(x, 0.0));
    }
    m
}

/// `e₃ = E₁₁` and `e₂` mixing the first two coordinates; multiplicities `(p, p, q − 2p)`.
pub fn tl_m3_model(params: TLParams) -> BlockModel {
    let l = params.lambda();
    let mix = (l * (1.0 - l)).sqrt();
    let e2 = sym(3, &[(0, 0, l), (0, 1, mix), (1, 1, 1.0 - l)]);
    let e3 = sym(3, &[(0, 0, 1.0)]);
    let (p, q) = (params.p(), params.q());
    let sizes = vec![p, p, q - 2 * p];
    BlockModel {
        lambda: l,
        first_index: 2,
        weights: weights_from_sizes(&sizes),
        block_sizes: sizes,
        e_matrices: vec![e2, e3],
        q_form: vec![vec![(1, 2)], vec![(2, 1)]],
    }
}

/// Six-coordinate model of `e₂, e₃, e₄` with multiplicities
/// `(p², p², pq − p², pq − p², pq − p², q² − 3pq + p²)`.
pub fn tl_m4_model(params: TLParams) -> BlockModel {
    let l = params.lambda();
    let mix = (l * (1.0 - l)).sqrt();
    let e4 = sym(6, &[(0, 0, 1.0), (2, 2, 1.0)]);
    let e3 = sym(
        6,
        &[(0, 0, l), (0, 1, mix), (1, 1, 1.0 - l), (2, 2, l), (2, 3, mix), (3, 3, 1.0 - l)],
    );
    let a = l / (1.0 - l);
    let c = (1.0 - 2.0 * l) / (1.0 - l);
    let b = (l * (1.0 - 2.0 * l)).sqrt() / (1.0 - l);
    let e2 = sym(6, &[(0, 0, 1.0), (3, 3, a), (3, 4, b), (4, 4, c)]);
    let (p, q) = (params.p(), params.q());
    let sizes = vec![p * p, p * p, p * q - p * p, p * q - p * p, p * q - p * p, q * q - 3 * p * q + p * p];
    BlockModel {
        lambda: l,
        first_index: 2,
        weights: weights_from_sizes(&sizes),
        block_sizes: sizes,
        e_matrices: vec![e2, e3, e4],
        q_form: vec![vec![(0, 2), (1, 3)], vec![(2, 0), (3, 1)], vec![(4, 5)], vec![(5, 4)]],
    }
}

impl BlockModel {
    pub fn coords(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.first_index..self.first_index + self.e_matrices.len()
    }

    /// `e_i`, if the model holds it.
    pub fn e(&self, i: usize) -> Option<&DenseMatrix> {
        i.checked_sub(self.first_index).and_then(|k| self.e_matrices.get(k))
    }

    /// Same projections with other weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> BlockModel {
        BlockModel { weights, ..self.clone() }
    }

    /// `Σ_c w_c x_cc`.
    pub fn trace(&self, x: &DenseMatrix) -> Complex64 {
        self.weights.iter().enumerate().map(|(c, &w)| x.get(c, c) * w).sum()
    }

    pub fn total_dim(&self) -> usize {
        self.block_sizes.iter().sum::<u64>() as usize
    }

    /// First ambient index of each coordinate block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.block_sizes
            .iter()
            .map(|&m| {
                let o = acc;
                acc += m as usize;
                o
            })
            .collect()
    }

    /// `x` with each entry `x_{cc'}` placed as `x_{cc'} · 1` between equal-size blocks.
    ///
    /// Panics if a nonzero entry links blocks of different sizes.
    pub fn expand(&self, x: &DenseMatrix) -> DenseMatrix {
        let off = self.offsets();
        let mut out = DenseMatrix::zeros(self.total_dim());
        for c in 0..self.coords() {
            for c2 in 0..self.coords() {
                let z = x.get(c, c2);
                if z == Complex64::new(0.0, 0.0) {
                    continue;
                }
                assert_eq!(self.block_sizes[c], self.block_sizes[c2], "entry ({c},{c2}) links blocks of different sizes");
                for t in 0..self.block_sizes[c] as usize {
                    out.set(off[c] + t, off[c2] + t, z);
                }
            }
        }
        out
    }

    /// Projection, braid-type and commutation relations, and `τ(e_i) = λ`.
    pub fn relation_report(&self, tol: f64) -> Report {
        let mut report = Report::new();
        let l = Complex64::new(self.lambda, 0.0);
        for i in self.indices() {
            let e = self.e(i).expect("index in range");
            let res = e.sub(&e.adjoint()).max_abs().max(e.mul(e).sub(e).max_abs());
            report.push(Check::within(format!("tl: e{i} is a projection"), "e = e* = e^2", res, tol, ""));
            let tr = (self.trace(e) - l).norm();
            report.push(Check::within(format!("tl: tau(e{i}) = lambda"), "tau(e_i) = lambda", tr, tol, format!("{}", self.trace(e).re)));
        }
        for i in self.indices() {
            for j in self.indices() {
                let (ei, ej) = (self.e(i).expect("in range"), self.e(j).expect("in range"));
                if i.abs_diff(j) == 1 {
                    let res = ei.mul(ej).mul(ei).sub(&ei.scale(l)).max_abs();
                    report.push(Check::within(format!("tl: e{i} e{j} e{i} = lambda e{i}"), "e_i e_(i+-1) e_i = lambda e_i", res, tol, ""));
                } else if i < j {
                    let res = ei.commutator(ej).max_abs();
                    report.push(Check::within(format!("tl: [e{i}, e{j}] = 0"), "[e_i, e_j] = 0 for |i - j| >= 2", res, tol, ""));
                }
            }
        }
        if let (Some(e2), Some(e4)) = (self.e(2), self.e(4)) {
            let mut unit = DenseMatrix::zeros(self.coords());
            unit.set(0, 0, Complex64::new(1.0, 0.0));
            let res = e2.mul(e4).sub(&unit).max_abs();
            report.push(Check::within("tl: e2 e4 is the first coordinate projection", "e2 e4 = E11", res, tol, ""));
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, q: u64) -> TLParams {
        TLParams::new(p, q).unwrap()
    }

    #[test]
    fn m3_at_one_fifth() {
        let m = tl_m3_model(params(1, 5));
        let (e2, e3) = (m.e(2).unwrap(), m.e(3).unwrap());
        let l = Complex64::new(0.2, 0.0);
        assert!(e2.mul(e3).mul(e2).approx_eq(&e2.scale(l), 1e-12));
        assert!(e3.mul(e2).mul(e3).approx_eq(&e3.scale(l), 1e-12));
        assert_eq!(m.weights, vec![0.2, 0.2, 0.6]);
        assert!((m.trace(e3).re - 0.2).abs() < 1e-15);
        assert!(m.e(4).is_none() && m.e(1).is_none());
    }

    #[test]
    fn m4_relations() {
        for (p, q) in [(1, 5), (1, 6), (2, 9), (3, 13)] {
            let m = tl_m4_model(params(p, q));
            let rep = m.relation_report(1e-12);
            assert!(rep.all_pass(), "{p}/{q}\n{}", rep.to_text());
            assert_eq!(m.total_dim() as u64, q * q);
        }
        let m = tl_m4_model(params(1, 5));
        assert_eq!(m.block_sizes, vec![1, 1, 4, 4, 4, 11]);
        // the (3,4) block of e2 against e3: (λ/(1−λ))·(1−λ) = λ
        let (e2, e3) = (m.e(2).unwrap(), m.e(3).unwrap());
        assert!(e3.mul(e2).mul(e3).approx_eq(&e3.scale_real(0.2), 1e-12));
    }

    #[test]
    fn expansion_preserves_relations() {
        let m = tl_m4_model(params(1, 5));
        let big: Vec<_> = m.e_matrices.iter().map(|e| m.expand(e)).collect();
        assert_eq!(big[0].dim(), 25);
        for e in &big {
            assert!(e.is_projection(1e-12));
        }
        assert!(big[1].mul(&big[0]).mul(&big[1]).approx_eq(&big[1].scale_real(0.2), 1e-12));
        assert!((big[2].normalized_trace().re - 0.2).abs() < 1e-12);
    }

    #[test]
    fn broken_model_fails() {
        let mut m = tl_m3_model(params(1, 5));
        m.e_matrices[0] = m.e_matrices[0].scale_real(0.5);
        assert!(!m.relation_report(1e-12).all_pass());
    }
}

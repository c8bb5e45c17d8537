use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::monomial::MonomialMatrix;
use crate::error::{capacity, Result};

/// Largest number of entry positions a single coupled component may hold.
pub const DEFAULT_COMPONENT_LIMIT: usize = 4096;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Dimension of the linear span of a family of monomials.
///
/// Monomials only interact through shared entry positions, so the family
/// splits into independent blocks whose ranks are computed by SVD and summed.
pub fn monomial_span_rank(mats: &[MonomialMatrix], tol: f64) -> Result<usize> {
    monomial_span_rank_limited(mats, tol, DEFAULT_COMPONENT_LIMIT)
}

pub fn monomial_span_rank_limited(mats: &[MonomialMatrix], tol: f64, limit: usize) -> Result<usize> {
    let mut pos_index: HashMap<(u32, u32), usize> = HashMap::new();
    let mut supports: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(mats.len());
    for m in mats {
        let mut sup = Vec::with_capacity(m.nnz());
        for (c, e) in m.columns().enumerate() {
            if let Some((r, p)) = e {
                let next = pos_index.len();
                let id = *pos_index.entry((r as u32, c as u32)).or_insert(next);
                sup.push((id, p.to_complex()));
            }
        }
        supports.push(sup);
    }
    let mut uf = UnionFind::new(pos_index.len());
    for sup in &supports {
        for w in sup.windows(2) {
            uf.union(w[0].0, w[1].0);
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, sup) in supports.iter().enumerate() {
        if let Some(&(first, _)) = sup.first() {
            groups.entry(uf.find(first)).or_default().push(i);
        }
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();
    let mut rank = 0;
    for root in roots {
        let members = &groups[&root];
        let mut local: HashMap<usize, usize> = HashMap::new();
        for &i in members {
            for &(id, _) in &supports[i] {
                let next = local.len();
                local.entry(id).or_insert(next);
            }
        }
        let cols = local.len();
        if cols > limit {
            return Err(capacity("span component positions", cols as u128, limit as u128));
        }
        let rows = members.len();
        let mut m = DMatrix::<Complex64>::zeros(rows, cols);
        for (r, &i) in members.iter().enumerate() {
            for &(id, z) in &supports[i] {
                m[(r, local[&id])] = z;
            }
        }
        rank += numeric_rank(&m, tol);
    }
    Ok(rank)
}

/// Rank with singular values thresholded at `tol` times the largest.
pub fn numeric_rank(m: &DMatrix<Complex64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * largest).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::gram_rank;
    use crate::linalg::monomial::{clock, shift};

    #[test]
    fn pauli_family_spans_m2() {
        let (p, q) = (clock(2), shift(2));
        let fam = [MonomialMatrix::identity(2), p.clone(), q.clone(), p.mul(&q)];
        assert_eq!(monomial_span_rank(&fam, 1e-9).unwrap(), 4);
    }

    #[test]
    fn agrees_with_gram_on_words() {
        let (p, q) = (clock(3), shift(3));
        let mut fam = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                fam.push(p.pow(i).mul(&q.pow(j)));
                fam.push(q.pow(j).mul(&p.pow(i)));
            }
        }
        let dense: Vec<_> = fam.iter().map(|m| m.to_dense()).collect();
        assert_eq!(monomial_span_rank(&fam, 1e-9).unwrap(), gram_rank(&dense, 1e-9));
        assert_eq!(monomial_span_rank(&fam, 1e-9).unwrap(), 9);
    }

    #[test]
    fn component_limit_is_enforced() {
        let fam = [MonomialMatrix::identity(8)];
        assert!(monomial_span_rank_limited(&fam, 1e-9, 4).is_err());
    }
}

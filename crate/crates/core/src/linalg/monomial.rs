use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use super::phase::{root_of_unity, Phase};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Partial generalized permutation matrix with exact root-of-unity entries.
///
/// Column `c` is either zero or holds the single entry
/// `exp(2πi · phases[c] / modulus)` in row `rows[c]`. No two columns share a row.
#[derive(Clone, Debug, Eq, Serialize, Deserialize)]
pub struct MonomialMatrix {
    modulus: u32,
    rows: Vec<u32>,
    phases: Vec<u32>,
}

impl PartialEq for MonomialMatrix {
    fn eq(&self, other: &Self) -> bool {
        if self.rows != other.rows {
            return false;
        }
        if self.modulus == other.modulus {
            return self.phases == other.phases;
        }
        let l = self.modulus.lcm(&other.modulus);
        let (fa, fb) = (l / self.modulus, l / other.modulus);
        self.rows
            .iter()
            .zip(self.phases.iter().zip(&other.phases))
            .all(|(&r, (&a, &b))| r == NONE || a * fa == b * fb)
    }
}

impl std::hash::Hash for MonomialMatrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        let mut m = self.clone();
        m.reduce_modulus();
        m.rows.hash(state);
        m.modulus.hash(state);
        for (r, p) in m.rows.iter().zip(&m.phases) {
            if *r != NONE {
                p.hash(state);
            }
        }
    }
}

/// How two monomials exchange: `a·b = phase·b·a`, both products vanish, or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exchange {
    Phase(Phase),
    BothZero,
    NonScalar,
}

impl Exchange {
    pub fn commutes(&self) -> bool {
        matches!(self, Exchange::Phase(p) if p.is_one()) || *self == Exchange::BothZero
    }

    /// True when `a·b = phase·b·a` holds, counting vanishing products as a match.
    pub fn satisfies(&self, phase: Phase) -> bool {
        match self {
            Exchange::Phase(p) => *p == phase,
            Exchange::BothZero => true,
            Exchange::NonScalar => false,
        }
    }
}

impl fmt::Display for Exchange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exchange::Phase(p) => write!(f, "{p}"),
            Exchange::BothZero => write!(f, "0 = 0"),
            Exchange::NonScalar => write!(f, "non-scalar"),
        }
    }
}

impl MonomialMatrix {
    pub fn identity(dim: usize) -> Self {
        MonomialMatrix {
            modulus: 1,
            rows: (0..dim as u32).collect(),
            phases: vec![0; dim],
        }
    }

    pub fn zero(dim: usize) -> Self {
        MonomialMatrix {
            modulus: 1,
            rows: vec![NONE; dim],
            phases: vec![0; dim],
        }
    }

    /// Builds from per-column entries `(row, phase)`; rejects repeated rows.
    pub fn from_columns(columns: Vec<Option<(usize, Phase)>>) -> Result<Self> {
        let dim = columns.len();
        let modulus = columns
            .iter()
            .flatten()
            .fold(1u32, |m, (_, p)| m.lcm(&p.modulus()));
        let mut seen = vec![false; dim];
        let mut rows = Vec::with_capacity(dim);
        let mut phases = Vec::with_capacity(dim);
        for col in columns {
            match col {
                Some((r, p)) => {
                    if r >= dim {
                        return Err(Error::DimensionMismatch(r, dim));
                    }
                    if std::mem::replace(&mut seen[r], true) {
                        return Err(Error::MalformedTower(format!("row {r} used twice")));
                    }
                    rows.push(r as u32);
                    phases.push(p.numerator_over(modulus).expect("lcm modulus"));
                }
                None => {
                    rows.push(NONE);
                    phases.push(0);
                }
            }
        }
        Ok(MonomialMatrix {
            modulus,
            rows,
            phases,
        })
    }

    /// Raw constructor used by deserialization; validates the partial-permutation shape.
    pub fn from_raw(modulus: u32, rows: Vec<Option<u32>>, phases: Vec<u32>) -> Result<Self> {
        if rows.len() != phases.len() {
            return Err(Error::DimensionMismatch(rows.len(), phases.len()));
        }
        if modulus == 0 {
            return Err(Error::MalformedTower("zero modulus".into()));
        }
        let cols = rows
            .into_iter()
            .zip(phases)
            .map(|(r, p)| {
                if p >= modulus {
                    return Err(Error::MalformedTower(format!("phase {p} >= modulus {modulus}")));
                }
                Ok(r.map(|r| (r as usize, Phase::new(p as i64, modulus))))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut m = Self::from_columns(cols)?;
        m.lift(modulus);
        Ok(m)
    }

    pub fn diagonal(phases: impl IntoIterator<Item = Option<Phase>>) -> Self {
        let cols = phases
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.map(|p| (i, p)))
            .collect();
        Self::from_columns(cols).expect("diagonal is a partial permutation")
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Entry of column `c`, if nonzero.
    pub fn column(&self, c: usize) -> Option<(usize, Phase)> {
        match self.rows[c] {
            NONE => None,
            r => Some((r as usize, Phase::new(self.phases[c] as i64, self.modulus))),
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = Option<(usize, Phase)>> + '_ {
        (0..self.dim()).map(move |c| self.column(c))
    }

    /// Row index per column (`None` for zero columns) and phase numerators over `modulus()`.
    pub fn raw_parts(&self) -> (Vec<Option<u32>>, &[u32]) {
        let rows = self
            .rows
            .iter()
            .map(|&r| if r == NONE { None } else { Some(r) })
            .collect();
        (rows, &self.phases)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().filter(|&&r| r != NONE).count()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == NONE)
    }

    /// Every column nonzero (then it is a unitary permutation-with-phases).
    pub fn is_unitary(&self) -> bool {
        self.rows.iter().all(|&r| r != NONE)
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(c, &r)| r == c as u32)
            && self.phases.iter().all(|&p| p == 0)
    }

    /// Re-expresses phases over `modulus`, which must be a multiple of the current one.
    pub fn lift(&mut self, modulus: u32) {
        if modulus == self.modulus {
            return;
        }
        assert!(modulus.is_multiple_of(self.modulus), "lift to non-multiple modulus");
        let f = modulus / self.modulus;
        for p in &mut self.phases {
            *p *= f;
        }
        self.modulus = modulus;
    }

    /// Smallest modulus that still represents every phase exactly.
    pub fn reduce_modulus(&mut self) {
        let g = self
            .rows
            .iter()
            .zip(&self.phases)
            .filter(|(&r, _)| r != NONE)
            .fold(self.modulus, |g, (_, &p)| g.gcd(&p));
        if g > 1 {
            for p in &mut self.phases {
                *p /= g;
            }
            self.modulus /= g;
        }
    }

    pub fn lifted(&self, modulus: u32) -> Self {
        let mut m = self.clone();
        m.lift(modulus);
        m
    }

    fn common_modulus(a: &Self, b: &Self) -> u32 {
        a.modulus.lcm(&b.modulus)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch(self.dim(), rhs.dim()));
        }
        let m = Self::common_modulus(self, rhs);
        let (fa, fb) = (m / self.modulus, m / rhs.modulus);
        let mut rows = vec![NONE; self.dim()];
        let mut phases = vec![0; self.dim()];
        for c in 0..rhs.dim() {
            let r = rhs.rows[c];
            if r == NONE {
                continue;
            }
            let r2 = self.rows[r as usize];
            if r2 == NONE {
                continue;
            }
            rows[c] = r2;
            phases[c] = (rhs.phases[c] * fb + self.phases[r as usize] * fa) % m;
        }
        let mut out = MonomialMatrix {
            modulus: m,
            rows,
            phases,
        };
        out.reduce_modulus();
        Ok(out)
    }

    /// Product; panics on dimension mismatch (use [`try_mul`](Self::try_mul) to recover).
    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("monomial dimensions agree")
    }

    pub fn adjoint(&self) -> Self {
        let mut rows = vec![NONE; self.dim()];
        let mut phases = vec![0; self.dim()];
        for (c, (&r, &p)) in self.rows.iter().zip(&self.phases).enumerate() {
            if r != NONE {
                rows[r as usize] = c as u32;
                phases[r as usize] = (self.modulus - p) % self.modulus;
            }
        }
        MonomialMatrix {
            modulus: self.modulus,
            rows,
            phases,
        }
    }

    /// Kronecker product `self ⊗ rhs`; index `(i, j)` maps to `i * rhs.dim() + j`.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let m = Self::common_modulus(self, rhs);
        let (fa, fb) = (m / self.modulus, m / rhs.modulus);
        let nb = rhs.dim();
        let n = self.dim() * nb;
        let mut rows = vec![NONE; n];
        let mut phases = vec![0; n];
        for (ca, (&ra, &pa)) in self.rows.iter().zip(&self.phases).enumerate() {
            if ra == NONE {
                continue;
            }
            let base_r = ra as usize * nb;
            let base_c = ca * nb;
            for (cb, (&rb, &pb)) in rhs.rows.iter().zip(&rhs.phases).enumerate() {
                if rb == NONE {
                    continue;
                }
                rows[base_c + cb] = (base_r + rb as usize) as u32;
                phases[base_c + cb] = (pa * fa + pb * fb) % m;
            }
        }
        let mut out = MonomialMatrix {
            modulus: m,
            rows,
            phases,
        };
        out.reduce_modulus();
        out
    }

    /// `self ⊗ 1_k`.
    pub fn tensor_identity_right(&self, k: usize) -> Self {
        if k == 1 {
            return self.clone();
        }
        self.tensor(&MonomialMatrix::identity(k))
    }

    pub fn scale(&self, phase: Phase) -> Self {
        let m = self.modulus.lcm(&phase.modulus());
        let mut out = self.lifted(m);
        let add = phase.numerator_over(m).expect("lcm");
        for (p, &r) in out.phases.iter_mut().zip(&self.rows) {
            if r != NONE {
                *p = (*p + add) % m;
            }
        }
        out.reduce_modulus();
        out
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut result = MonomialMatrix::identity(self.dim());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// `g^k` for signed `k`, with negative powers taken as powers of the adjoint.
    pub fn pow_signed(&self, k: i64) -> Self {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.adjoint().pow(k.unsigned_abs())
        }
    }

    /// Smallest `k ≥ 1` with `g^k` equal to the support projection `g*g`, for
    /// monomials whose row and column supports coincide.
    pub fn order(&self) -> Option<u64> {
        let support = self.adjoint().mul(self);
        if support != self.mul(&self.adjoint()) {
            return None;
        }
        // cycle lengths times phase orders bound the order; walk cycles directly
        let mut order: u64 = 1;
        let mut seen = vec![false; self.dim()];
        for start in 0..self.dim() {
            if seen[start] || self.rows[start] == NONE {
                continue;
            }
            let mut len = 0u64;
            let mut acc = 0u64;
            let mut c = start;
            loop {
                seen[c] = true;
                acc += self.phases[c] as u64;
                len += 1;
                c = self.rows[c] as usize;
                if c == start {
                    break;
                }
            }
            let m = self.modulus as u64;
            let ph = acc % m;
            let phase_order = m / ph.gcd(&m);
            order = order.lcm(&(len * phase_order));
        }
        Some(order)
    }

    /// Normalized trace `(1/N) Σ` of diagonal phases.
    pub fn normalized_trace(&self) -> Complex64 {
        let n = self.dim() as f64;
        self.trace_phase_counts()
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(p, &k)| root_of_unity(p as u64, self.modulus as u64) * k as f64)
            .sum::<Complex64>()
            / n
    }

    /// Number of fixed points carrying each phase numerator (over `modulus()`).
    pub fn trace_phase_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.modulus as usize];
        for (c, (&r, &p)) in self.rows.iter().zip(&self.phases).enumerate() {
            if r == c as u32 {
                counts[p as usize] += 1;
            }
        }
        counts
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut d = DenseMatrix::zeros(n);
        for (c, (&r, &p)) in self.rows.iter().zip(&self.phases).enumerate() {
            if r != NONE {
                d.set(r as usize, c, root_of_unity(p as u64, self.modulus as u64));
            }
        }
        d
    }

    /// Exchange relation between `self` and `other`.
    pub fn exchange(&self, other: &Self) -> Exchange {
        let ab = self.mul(other);
        let ba = other.mul(self);
        exchange_of_products(&ab, &ba)
    }

    /// Conjugates a dense matrix: `self · x · self*`.
    pub fn conjugate_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        assert_eq!(n, x.dim(), "conjugation dimension");
        let vals: Vec<Complex64> = self
            .phases
            .iter()
            .map(|&p| root_of_unity(p as u64, self.modulus as u64))
            .collect();
        let mut out = DenseMatrix::zeros(n);
        for j in 0..n {
            let rj = self.rows[j];
            if rj == NONE {
                continue;
            }
            for i in 0..n {
                let ri = self.rows[i];
                if ri == NONE {
                    continue;
                }
                // (g x g*)[ri, rj] = g[ri,i] x[i,j] conj(g[rj,j])
                out.set(ri as usize, rj as usize, vals[i] * x.get(i, j) * vals[j].conj());
            }
        }
        out
    }
}

pub(crate) fn exchange_of_products(ab: &MonomialMatrix, ba: &MonomialMatrix) -> Exchange {
    let (za, zb) = (ab.is_zero(), ba.is_zero());
    if za && zb {
        return Exchange::BothZero;
    }
    if za || zb || ab.rows != ba.rows {
        return Exchange::NonScalar;
    }
    let m = ab.modulus.lcm(&ba.modulus);
    let (fa, fb) = (m / ab.modulus, m / ba.modulus);
    let mut diff: Option<u32> = None;
    for c in 0..ab.dim() {
        if ab.rows[c] == NONE {
            continue;
        }
        let d = (ab.phases[c] * fa + m - ba.phases[c] * fb) % m;
        match diff {
            None => diff = Some(d),
            Some(x) if x != d => return Exchange::NonScalar,
            _ => {}
        }
    }
    Exchange::Phase(Phase::new(diff.unwrap_or(0) as i64, m))
}

/// `clock(m)`: diagonal `1, γ, …, γ^{m−1}` with `γ = exp(2πi/m)`.
pub fn clock(m: usize) -> MonomialMatrix {
    MonomialMatrix::diagonal((0..m).map(|k| Some(Phase::new(k as i64, m as u32))))
}

/// `shift(m)`: the cyclic permutation `e_k ↦ e_{k+1 mod m}`.
pub fn shift(m: usize) -> MonomialMatrix {
    MonomialMatrix::from_columns((0..m).map(|c| Some(((c + 1) % m, Phase::ONE))).collect())
        .expect("cycle is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_eq(a: &DenseMatrix, b: &DenseMatrix) -> bool {
        a.approx_eq(b, 1e-12)
    }

    #[test]
    fn identity_is_neutral() {
        let x = clock(3).mul(&shift(3));
        assert_eq!(MonomialMatrix::identity(3).mul(&x), x);
        assert_eq!(x.mul(&MonomialMatrix::identity(3)), x);
    }

    #[test]
    fn clock_shift_anticommute_for_two() {
        let (p, q) = (clock(2), shift(2));
        assert_eq!(p.mul(&q), q.mul(&p).scale(Phase::root(2)));
        assert_eq!(p.exchange(&q), Exchange::Phase(Phase::root(2)));
        let sum = p.mul(&q).to_dense().add(&q.mul(&p).to_dense());
        assert!(sum.max_abs() < 1e-15);
    }

    #[test]
    fn clock_shift_weyl_relation() {
        for m in 1..7 {
            let (p, q) = (clock(m), shift(m));
            assert_eq!(p.mul(&q), q.mul(&p).scale(Phase::root(m as u32)));
            assert!(p.pow(m as u64).is_identity());
            assert!(q.pow(m as u64).is_identity());
        }
        assert!(!clock(4).pow(2).is_identity());
        assert_eq!(clock(4).order(), Some(4));
    }

    #[test]
    fn tensor_matches_kronecker() {
        let a = clock(2);
        let b = shift(2);
        let t = a.tensor(&b);
        assert!(dense_eq(&t.to_dense(), &a.to_dense().kron(&b.to_dense())));
        // phases {1, -1}, pair swap
        let (rows, phases) = t.raw_parts();
        assert_eq!(rows, vec![Some(1), Some(0), Some(3), Some(2)]);
        assert_eq!(phases.iter().filter(|&&p| p != 0).count(), 2);
        assert!(MonomialMatrix::identity(2)
            .tensor(&MonomialMatrix::identity(2))
            .is_identity());
    }

    #[test]
    fn traces() {
        assert!((clock(3).normalized_trace()).norm() < 1e-15);
        assert_eq!(MonomialMatrix::identity(5).normalized_trace(), Complex64::new(1.0, 0.0));
        let s = MonomialMatrix::diagonal([None, Some(Phase::ONE), None, Some(Phase::ONE)]);
        assert_eq!(s.normalized_trace(), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn adjoint_and_partial_products() {
        let s = MonomialMatrix::diagonal([None, Some(Phase::ONE), None, Some(Phase::ONE)]);
        let v = MonomialMatrix::from_columns(vec![
            Some((0, Phase::ONE)),
            Some((3, Phase::ONE)),
            Some((2, Phase::ONE)),
            Some((1, Phase::ONE)),
        ])
        .unwrap();
        let r = s.mul(&v).mul(&s);
        assert_eq!(r.mul(&r), s);
        assert_eq!(r.adjoint().mul(&r), s);
        assert_eq!(r.order(), Some(2));
    }

    #[test]
    fn conjugation_agrees_with_dense() {
        let g = clock(3).tensor(&shift(2));
        let mut x = DenseMatrix::zeros(6);
        for i in 0..6 {
            for j in 0..6 {
                x.set(i, j, Complex64::new(i as f64 - 0.5 * j as f64, (i * j) as f64 * 0.1));
            }
        }
        let gd = g.to_dense();
        let expect = gd.mul(&x).mul(&gd.adjoint());
        assert!(g.conjugate_dense(&x).approx_eq(&expect, 1e-12));
    }

    #[test]
    fn repeated_row_rejected() {
        let cols = vec![Some((0, Phase::ONE)), Some((0, Phase::ONE))];
        assert!(MonomialMatrix::from_columns(cols).is_err());
    }
}

//! The inductive tower `M_1 ⊂ M_2 ⊂ ⋯ ⊂ M_K = ⊗^K M_d` and its generator shift.

mod relations;
mod serial;
mod shift;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, Error, Result};
use crate::linalg::MonomialMatrix;
use crate::presentation::{in_s1, in_s2, in_s3, validate_spec, AlgebraSpec, DerivedDims};
use crate::weyl::{build_base, BaseAlgebra, Family};

pub use relations::{
    audit_relations, check_covariance, check_index_ratio, check_tensor_copies, check_word_span, check_phi_trace,
    check_relations, predict, Prediction, RelationAudit, PairVerdict,
};
pub use serial::{GeneratorRecord, TowerFile};
pub use shift::{check_shift_definition, pauli_shift_family, tower_r_stream, ShiftReport};

/// Default bound on the ambient dimension `d^K`.
pub const DEFAULT_CAPACITY: u128 = 1 << 16;

/// Symbolic handle for a tower generator, optionally raised to a power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorRef {
    pub family: Family,
    /// Summand index, ignored for `r`.
    pub summand: usize,
    pub level: usize,
    pub power: i64,
}

impl GeneratorRef {
    pub fn new(family: Family, summand: usize, level: usize) -> Self {
        GeneratorRef {
            family,
            summand: if family == Family::R { 0 } else { summand },
            level,
            power: 1,
        }
    }

    pub fn r(level: usize) -> Self {
        Self::new(Family::R, 0, level)
    }

    pub fn pow(mut self, power: i64) -> Self {
        self.power = power;
        self
    }

    fn key(&self) -> (Family, usize, usize) {
        (self.family, self.summand, self.level)
    }
}

impl fmt::Display for GeneratorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.family == Family::R {
            write!(f, "r_{}", self.level)?;
        } else {
            write!(f, "({}{})_{}", self.family.label(), self.summand + 1, self.level)?;
        }
        if self.power != 1 {
            write!(f, "^{}", self.power)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    spec: AlgebraSpec,
    base: BaseAlgebra,
    depth: usize,
    gens: BTreeMap<(Family, usize, usize), MonomialMatrix>,
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.depth == other.depth && self.gens == other.gens
    }
}

pub fn build_tower(spec: &AlgebraSpec, depth: usize) -> Result<Tower> {
    build_tower_with_capacity(spec, depth, DEFAULT_CAPACITY)
}

pub fn ambient_dim(d: usize, depth: usize) -> u128 {
    (d as u128).checked_pow(depth as u32).unwrap_or(u128::MAX)
}

pub fn build_tower_with_capacity(spec: &AlgebraSpec, depth: usize, limit: u128) -> Result<Tower> {
    if depth == 0 {
        return Err(Error::InvalidParams("tower depth must be at least 1".into()));
    }
    let dims = validate_spec(spec)?;
    let needed = ambient_dim(dims.d, depth);
    if needed > limit {
        return Err(capacity("ambient dimension d^K", needed, limit));
    }
    let base = build_base(&dims);
    let mut tower = Tower {
        spec: spec.reduced(),
        base,
        depth,
        gens: BTreeMap::new(),
    };
    for level in 1..=depth {
        for j in 0..dims.n() {
            for f in Family::BLOCK {
                let g = GeneratorRef::new(f, j, level);
                let m = tower.full_from_slots(&tower.slot_factors(&g), level);
                tower.gens.insert(g.key(), m);
            }
        }
        let g = GeneratorRef::r(level);
        let m = tower.full_from_slots(&tower.slot_factors(&g), level);
        tower.gens.insert(g.key(), m);
    }
    Ok(tower)
}

impl Tower {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn dims(&self) -> &DerivedDims {
        &self.base.dims
    }

    pub fn base(&self) -> &BaseAlgebra {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn d(&self) -> usize {
        self.base.dims.d
    }

    pub fn n(&self) -> usize {
        self.base.dims.n()
    }

    pub fn ambient_dim(&self) -> usize {
        self.d().pow(self.depth as u32)
    }

    /// Global phase modulus `lcm(n, a_j, d_j)`.
    pub fn modulus(&self) -> u32 {
        self.base.dims.modulus()
    }

    /// Per-slot factors of a level-`L` generator (slots `1..=L`, leftmost first).
    pub fn slot_factors(&self, g: &GeneratorRef) -> Vec<MonomialMatrix> {
        let b = &self.base;
        let level = g.level;
        let j = g.summand;
        let id = MonomialMatrix::identity(b.d());
        let mut out = Vec::with_capacity(level);
        for slot in 1..level {
            let t = level - slot;
            let f = match g.family {
                Family::P | Family::Q | Family::MultP => id.clone(),
                Family::MultQ if in_s2(t) => b.padded(Family::MultQ, j),
                Family::MultQ if in_s3(t) => b.padded(Family::MultP, j),
                Family::MultQ => id.clone(),
                Family::R if in_s1(t) => b.w.clone(),
                Family::R => id.clone(),
            };
            out.push(f);
        }
        out.push(b.generator(g.family, j).clone());
        out
    }

    /// `f_1 ⊗ ⋯ ⊗ f_L ⊗ 1` in the ambient algebra.
    pub fn full_from_slots(&self, slots: &[MonomialMatrix], level: usize) -> MonomialMatrix {
        let mut acc = slots[0].clone();
        for f in &slots[1..] {
            acc = acc.tensor(f);
        }
        acc.tensor_identity_right(self.d().pow((self.depth - level) as u32))
    }

    /// Lifts an element of `M_k` (dimension `d^k`) into the ambient algebra.
    pub fn embed(&self, x: &MonomialMatrix) -> MonomialMatrix {
        let k = x.dim();
        assert_eq!(self.ambient_dim() % k, 0, "embedding dimension");
        x.tensor_identity_right(self.ambient_dim() / k)
    }

    fn check_ref(&self, g: &GeneratorRef) -> Result<()> {
        if g.level == 0 || g.level > self.depth {
            return Err(Error::LevelOverflow {
                level: g.level,
                depth: self.depth,
            });
        }
        if g.family != Family::R && g.summand >= self.n() {
            return Err(Error::UnknownGenerator(g.to_string()));
        }
        Ok(())
    }

    /// The generator matrix (power 1).
    pub fn generator(&self, family: Family, summand: usize, level: usize) -> Result<&MonomialMatrix> {
        let g = GeneratorRef::new(family, summand, level);
        self.check_ref(&g)?;
        Ok(&self.gens[&g.key()])
    }

    pub fn resolve(&self, g: &GeneratorRef) -> Result<MonomialMatrix> {
        self.check_ref(g)?;
        let m = &self.gens[&g.key()];
        Ok(if g.power == 1 { m.clone() } else { m.pow_signed(g.power) })
    }

    /// All generators with power 1, ordered by level, family, summand.
    pub fn generator_refs(&self) -> Vec<GeneratorRef> {
        let mut out = Vec::new();
        for level in 1..=self.depth {
            for f in Family::BLOCK {
                for j in 0..self.n() {
                    out.push(GeneratorRef::new(f, j, level));
                }
            }
            out.push(GeneratorRef::r(level));
        }
        out
    }

    pub fn level_refs(&self, level: usize) -> Vec<GeneratorRef> {
        self.generator_refs().into_iter().filter(|g| g.level == level).collect()
    }

    pub fn product(&self, word: &[GeneratorRef]) -> Result<MonomialMatrix> {
        let mut acc = MonomialMatrix::identity(self.ambient_dim());
        for g in word {
            acc = acc.mul(&self.resolve(g)?);
        }
        Ok(acc)
    }

    /// Random word of `len` generators from levels `1..=max_level` with powers in `1..order`.
    pub fn sample_word<R: Rng>(&self, rng: &mut R, len: usize, max_level: usize) -> Vec<GeneratorRef> {
        let refs: Vec<GeneratorRef> = self.generator_refs().into_iter().filter(|g| g.level <= max_level).collect();
        (0..len)
            .map(|_| {
                let g = refs[rng.gen_range(0..refs.len())];
                let order = match g.family {
                    Family::P | Family::Q => self.dims().sizes[g.summand],
                    Family::MultP | Family::MultQ => self.dims().mult[g.summand],
                    Family::R => self.n(),
                } as i64;
                g.pow(rng.gen_range(1..=order.max(1)))
            })
            .collect()
    }

    /// Spanning words `b₁ r^m b₂` of the level-`level` copy of `M_d`, in the ambient algebra.
    pub fn level_words(&self, level: usize) -> Result<Vec<MonomialMatrix>> {
        let gen = |f: Family, j: usize| self.generator(f, j, level);
        let mut basis = Vec::with_capacity(self.dims().dim_b());
        for j in 0..self.n() {
            let (a, m) = (self.dims().sizes[j] as u64, self.dims().mult[j] as u64);
            let block = gen(Family::P, j)?.pow(a);
            for al in 0..a {
                for be in 0..a {
                    let left = block.mul(&gen(Family::P, j)?.pow(al)).mul(&gen(Family::Q, j)?.pow(be));
                    for ga in 0..m {
                        for de in 0..m {
                            basis.push(left.mul(&gen(Family::MultP, j)?.pow(ga)).mul(&gen(Family::MultQ, j)?.pow(de)));
                        }
                    }
                }
            }
        }
        let mut out = basis.clone();
        let r = gen(Family::R, 0)?;
        for m in 1..self.n() as u64 {
            let rm = r.pow(m);
            for b1 in &basis {
                let left = b1.mul(&rm);
                if left.is_zero() {
                    continue;
                }
                for b2 in &basis {
                    let x = left.mul(b2);
                    if !x.is_zero() {
                        out.push(x);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> TowerFile {
        TowerFile::from_tower(self)
    }
}

/// `Φ` on a single handle: same family, summand and power, one level up.
pub fn phi_image(g: &GeneratorRef, depth: usize) -> Result<GeneratorRef> {
    if g.level >= depth {
        return Err(Error::LevelOverflow { level: g.level, depth });
    }
    Ok(GeneratorRef { level: g.level + 1, ..*g })
}

/// `Φ` extended multiplicatively to a word.
pub fn phi_apply(word: &[GeneratorRef], tower: &Tower) -> Result<MonomialMatrix> {
    let shifted = word.iter().map(|g| phi_image(g, tower.depth())).collect::<Result<Vec<_>>>()?;
    tower.product(&shifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs1(k: usize) -> Tower {
        build_tower(&AlgebraSpec::cs1(), k).unwrap()
    }

    #[test]
    fn depth_one_matches_base() {
        let t = cs1(1);
        let b = t.base().clone();
        assert_eq!(t.generator(Family::R, 0, 1).unwrap(), &b.r);
        assert_eq!(t.generator(Family::MultQ, 1, 1).unwrap(), &b.mult_q[1]);
    }

    #[test]
    fn level_two_tails() {
        let t = cs1(2);
        let b = t.base();
        assert_eq!(t.generator(Family::R, 0, 2).unwrap(), &b.w.tensor(&b.r));
        let q2 = b.padded(Family::MultQ, 0).tensor(&b.mult_q[0]);
        assert_eq!(t.generator(Family::MultQ, 0, 2).unwrap(), &q2);
        assert_eq!(
            t.generator(Family::R, 0, 1).unwrap(),
            &b.r.tensor(&MonomialMatrix::identity(4))
        );
    }

    #[test]
    fn level_three_r_tail() {
        let t = cs1(3);
        let b = t.base();
        let id = MonomialMatrix::identity(4);
        assert_eq!(t.generator(Family::R, 0, 3).unwrap(), &id.tensor(&b.w).tensor(&b.r));
    }

    #[test]
    fn capacity_refused() {
        let err = build_tower(&AlgebraSpec::cs1(), 9).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
        assert!(build_tower(&AlgebraSpec::new([(1, 1, 1)]), 5).is_ok());
    }

    #[test]
    fn phi_shifts_levels() {
        let t = cs1(3);
        assert_eq!(phi_image(&GeneratorRef::r(1), 3).unwrap(), GeneratorRef::r(2));
        let q = GeneratorRef::new(Family::Q, 0, 2);
        assert_eq!(phi_image(&q, 3).unwrap().level, 3);
        assert!(phi_image(&GeneratorRef::new(Family::MultQ, 1, 3), 3).is_err());
        assert!(phi_apply(&[], &t).unwrap().is_identity());
        assert_eq!(&phi_apply(&[GeneratorRef::r(1)], &t).unwrap(), t.generator(Family::R, 0, 2).unwrap());
    }
}

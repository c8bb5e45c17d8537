//! Input algebra specifications, derived dimensions and the triangular shift sets.

use std::fmt;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Phase;

/// Largest admissible `d = c₁⋯c_n`.
pub const MAX_D: u64 = 1 << 20;

/// One direct summand `M_a` carrying trace weight `b/c` on each minimal projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl Summand {
    pub fn new(a: u64, b: u64, c: u64) -> Self {
        Summand { a, b, c }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub summands: Vec<Summand>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    ZeroEntry { summand: usize, field: char },
    /// `defect` is the exact value of `Σ (b/c)·a − 1`.
    SumNotOne { sum: String, defect: String },
    NonIntegralMultiplicity { summand: usize },
    TooLarge { d: String, limit: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "no summands"),
            Violation::ZeroEntry { summand, field } => {
                write!(f, "ZeroEntry: summand {summand} has {field} = 0")
            }
            Violation::SumNotOne { sum, defect } => {
                write!(f, "SumNotOne: Σ (b/c)·a = {sum} (defect {defect})")
            }
            Violation::NonIntegralMultiplicity { summand } => {
                write!(f, "NonIntegralMultiplicity: d·b/c is not an integer for summand {summand}")
            }
            Violation::TooLarge { d, limit } => write!(f, "d = {d} exceeds {limit}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid spec: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),

    #[error("malformed spec file at line {line}, column {column}: {message}")]
    MalformedFile {
        line: usize,
        column: usize,
        message: String,
    },
}

impl SpecError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            SpecError::Invalid(v) => v,
            SpecError::MalformedFile { .. } => &[],
        }
    }

    /// True when the only problem is an oversized `d`.
    pub fn is_capacity(&self) -> bool {
        matches!(self, SpecError::Invalid(v) if v.iter().all(|x| matches!(x, Violation::TooLarge { .. })))
    }
}

/// Everything the constructions need, derived from a validated spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedDims {
    pub d: usize,
    /// Block sizes `a_i`.
    pub sizes: Vec<usize>,
    /// Multiplicities `d_i = d·b_i/c_i`.
    pub mult: Vec<usize>,
    /// First global coordinate of each block.
    pub offsets: Vec<usize>,
    /// `exp(2πi/n)`.
    pub gamma: Phase,
    /// `exp(2πi/a_i)`.
    pub gamma_i: Vec<Phase>,
    /// `exp(2πi/d_i)`.
    pub rho_i: Vec<Phase>,
}

impl DerivedDims {
    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    /// `Σ a_i²`, the dimension of the algebra `⊕ M_{a_i}`.
    pub fn dim_a(&self) -> usize {
        self.sizes.iter().map(|a| a * a).sum()
    }

    /// `Σ (a_i d_i)²`.
    pub fn dim_b(&self) -> usize {
        self.sizes.iter().zip(&self.mult).map(|(a, m)| (a * m) * (a * m)).sum()
    }

    /// Global coordinate of `(a-coordinate x, multiplicity coordinate y)` in block `i`.
    pub fn coord(&self, i: usize, x: usize, y: usize) -> usize {
        self.offsets[i] + x * self.mult[i] + y
    }

    /// Last coordinate of block `i`.
    pub fn last_coord(&self, i: usize) -> usize {
        self.offsets[i] + self.sizes[i] * self.mult[i] - 1
    }

    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.sizes[i] * self.mult[i]
    }

    /// Least common multiple of `n`, the `a_i` and the `d_i`: every base phase lives over it.
    pub fn modulus(&self) -> u32 {
        let mut m = self.n() as u64;
        for (&a, &k) in self.sizes.iter().zip(&self.mult) {
            m = m.lcm(&(a as u64)).lcm(&(k as u64));
        }
        m as u32
    }
}

impl AlgebraSpec {
    pub fn new(summands: impl IntoIterator<Item = (u64, u64, u64)>) -> Self {
        AlgebraSpec {
            summands: summands.into_iter().map(|(a, b, c)| Summand::new(a, b, c)).collect(),
        }
    }

    /// `[(1,1,2),(1,1,2)]`: two one-dimensional summands of weight 1/2.
    pub fn cs1() -> Self {
        Self::new([(1, 1, 2), (1, 1, 2)])
    }

    /// `[(2,1,4),(1,1,2)]`.
    pub fn cs2() -> Self {
        Self::new([(2, 1, 4), (1, 1, 2)])
    }

    pub fn n(&self) -> usize {
        self.summands.len()
    }

    /// Same spec with every `b/c` in lowest terms.
    pub fn reduced(&self) -> Self {
        AlgebraSpec {
            summands: self
                .summands
                .iter()
                .map(|s| {
                    let g = s.b.gcd(&s.c).max(1);
                    Summand::new(s.a, s.b / g, s.c / g)
                })
                .collect(),
        }
    }

    /// Canonical JSON bytes, used for digests.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

pub fn validate_spec(raw: &AlgebraSpec) -> Result<DerivedDims, SpecError> {
    let mut violations = Vec::new();
    if raw.summands.is_empty() {
        return Err(SpecError::Invalid(vec![Violation::Empty]));
    }
    for (i, s) in raw.summands.iter().enumerate() {
        for (field, v) in [('a', s.a), ('b', s.b), ('c', s.c)] {
            if v == 0 {
                violations.push(Violation::ZeroEntry { summand: i, field });
            }
        }
    }
    if !violations.is_empty() {
        return Err(SpecError::Invalid(violations));
    }
    let spec = raw.reduced();
    let sum = spec.summands.iter().fold(BigRational::zero(), |acc, s| {
        acc + BigRational::new(BigInt::from(s.b), BigInt::from(s.c)) * BigInt::from(s.a)
    });
    if !sum.is_one() {
        let defect = &sum - BigRational::one();
        violations.push(Violation::SumNotOne {
            sum: sum.to_string(),
            defect: defect.to_string(),
        });
    }
    let d_big = spec.summands.iter().fold(BigUint::one(), |acc, s| acc * s.c);
    for (i, s) in spec.summands.iter().enumerate() {
        if !(&d_big * s.b % s.c).is_zero() {
            violations.push(Violation::NonIntegralMultiplicity { summand: i });
        }
    }
    let d = match d_big.to_u64() {
        Some(d) if d <= MAX_D => d,
        _ => {
            violations.push(Violation::TooLarge {
                d: d_big.to_string(),
                limit: MAX_D,
            });
            0
        }
    };
    if !violations.is_empty() {
        return Err(SpecError::Invalid(violations));
    }
    let sizes: Vec<usize> = spec.summands.iter().map(|s| s.a as usize).collect();
    let mult: Vec<usize> = spec.summands.iter().map(|s| (d * s.b / s.c) as usize).collect();
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for (a, m) in sizes.iter().zip(&mult) {
        offsets.push(acc);
        acc += a * m;
    }
    debug_assert_eq!(acc as u64, d);
    let n = sizes.len() as u32;
    Ok(DerivedDims {
        d: d as usize,
        gamma: Phase::root(n),
        gamma_i: sizes.iter().map(|&a| Phase::root(a as u32)).collect(),
        rho_i: mult.iter().map(|&m| Phase::root(m as u32)).collect(),
        sizes,
        mult,
        offsets,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftSet {
    S1,
    S2,
    S3,
}

/// `i` with `t = i(i+1)/2`, if `t` is triangular.
pub fn triangular_index(t: u64) -> Option<u64> {
    if t == 0 {
        return None;
    }
    let disc = 8 * t + 1;
    let r = disc.sqrt();
    (r * r == disc).then(|| (r - 1) / 2)
}

pub fn shift_set_member(set: ShiftSet, t: u64) -> bool {
    match (set, triangular_index(t)) {
        (_, None) => false,
        (ShiftSet::S1, Some(_)) => true,
        (ShiftSet::S2, Some(i)) => i % 3 == 1,
        (ShiftSet::S3, Some(i)) => i % 3 == 2,
    }
}

pub fn in_s1(t: usize) -> bool {
    shift_set_member(ShiftSet::S1, t as u64)
}

pub fn in_s2(t: usize) -> bool {
    shift_set_member(ShiftSet::S2, t as u64)
}

pub fn in_s3(t: usize) -> bool {
    shift_set_member(ShiftSet::S3, t as u64)
}

/// Bits `0..len` of the stream whose bit `t` marks `t ∈ S₁`.
pub fn stream_prefix(len: usize) -> Vec<u8> {
    (0..len).map(|t| u8::from(t > 0 && in_s1(t))).collect()
}

/// Raw file form; fields are checked by hand so diagnostics can name them.
#[derive(Deserialize)]
struct RawSpec {
    summands: Vec<RawSummand>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSummand {
    a: u64,
    b: u64,
    c: u64,
}

pub fn parse_spec_str(text: &str) -> Result<AlgebraSpec, SpecError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| SpecError::MalformedFile {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let spec = AlgebraSpec {
        summands: raw.summands.into_iter().map(|s| Summand::new(s.a, s.b, s.c)).collect(),
    };
    let zeros: Vec<Violation> = spec
        .summands
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            [('a', s.a), ('b', s.b), ('c', s.c)]
                .into_iter()
                .filter(|(_, v)| *v == 0)
                .map(move |(field, _)| Violation::ZeroEntry { summand: i, field })
        })
        .collect();
    if !zeros.is_empty() {
        return Err(SpecError::Invalid(zeros));
    }
    Ok(spec.reduced())
}

pub fn parse_spec_file(path: impl AsRef<Path>) -> crate::Result<AlgebraSpec> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_spec_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cs1_and_cs2() {
        let d1 = validate_spec(&AlgebraSpec::cs1()).unwrap();
        assert_eq!((d1.d, d1.mult.clone()), (4, vec![2, 2]));
        let d2 = validate_spec(&AlgebraSpec::cs2()).unwrap();
        assert_eq!((d2.d, d2.mult.clone()), (8, vec![2, 4]));
        assert_eq!(d2.offsets, vec![0, 4]);
        assert_eq!(d2.dim_a(), 5);
    }

    #[test]
    fn sum_not_one_reports_defect() {
        let err = validate_spec(&AlgebraSpec::new([(1, 1, 3), (1, 1, 2)])).unwrap_err();
        match &err.violations()[0] {
            Violation::SumNotOne { sum, defect } => {
                assert_eq!(sum, "5/6");
                assert_eq!(defect, "-1/6");
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn all_violations_reported() {
        let err = validate_spec(&AlgebraSpec::new([(0, 1, 2), (1, 0, 0)])).unwrap_err();
        assert_eq!(err.violations().len(), 3);
    }

    #[test]
    fn oversized_d_rejected() {
        let spec = AlgebraSpec::new((0..21).map(|_| (1, 1, 2)).chain([(1, 0, 1)]));
        // b = 0 triggers ZeroEntry before anything else
        assert!(validate_spec(&spec).is_err());
        let big = AlgebraSpec::new([(1, 1, 1 << 21), (1, (1 << 21) - 1, 1 << 21)]);
        let err = validate_spec(&big).unwrap_err();
        assert!(err.is_capacity(), "{err}");
    }

    #[test]
    fn shift_sets() {
        assert!(shift_set_member(ShiftSet::S1, 10));
        assert!(!shift_set_member(ShiftSet::S1, 4));
        assert!(shift_set_member(ShiftSet::S2, 1));
        assert!(shift_set_member(ShiftSet::S3, 3));
        assert!(shift_set_member(ShiftSet::S1, 6));
        assert!(!shift_set_member(ShiftSet::S2, 6) && !shift_set_member(ShiftSet::S3, 6));
        let s2: Vec<u64> = (1..60).filter(|&t| shift_set_member(ShiftSet::S2, t)).collect();
        assert_eq!(s2, vec![1, 10, 28, 55]);
        let s3: Vec<u64> = (1..60).filter(|&t| shift_set_member(ShiftSet::S3, t)).collect();
        assert_eq!(s3, vec![3, 15, 36]);
    }

    #[test]
    fn stream() {
        assert_eq!(stream_prefix(7), vec![0, 1, 0, 1, 0, 0, 1]);
        assert_eq!(stream_prefix(1), vec![0]);
        let shown = "0101001000100001000001";
        let got: String = stream_prefix(22).iter().map(|b| char::from(b'0' + b)).collect();
        assert_eq!(got, shown);
    }

    #[test]
    fn parse_reduces_and_rejects_zero() {
        let s = parse_spec_str(r#"{"summands":[{"a":1,"b":3,"c":6},{"a":1,"b":1,"c":2}]}"#).unwrap();
        assert_eq!(s, AlgebraSpec::cs1());
        let err = parse_spec_str(r#"{"summands":[{"a":1,"b":1,"c":0}]}"#).unwrap_err();
        assert!(matches!(err.violations()[0], Violation::ZeroEntry { field: 'c', .. }));
        let err = parse_spec_str("{\"summands\": [\n{\"a\": 1, \"b\": 0.5}]}").unwrap_err();
        assert!(matches!(err, SpecError::MalformedFile { line: 2, .. }));
    }
}

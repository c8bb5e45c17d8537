//! Base-level generators inside `M_d`: clock/shift pairs for both tensor legs of
//! each block, the cycle through block corners and its compression.

use serde::{Deserialize, Serialize};

use crate::linalg::{monomial_span_rank, MonomialMatrix, Phase};
use crate::presentation::DerivedDims;
use crate::report::{Check, Report, Status};
use crate::DEFAULT_TOL;

pub use crate::linalg::{clock, shift};

/// The four generator families of the base algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Clock on the `M_{a_j}` leg.
    P,
    /// Shift on the `M_{a_j}` leg.
    Q,
    /// Clock on the multiplicity leg.
    MultP,
    /// Shift on the multiplicity leg.
    MultQ,
    /// The compressed cycle `r`.
    R,
}

impl Family {
    pub const BLOCK: [Family; 4] = [Family::P, Family::Q, Family::MultP, Family::MultQ];

    pub fn label(&self) -> &'static str {
        match self {
            Family::P => "p",
            Family::Q => "q",
            Family::MultP => "P",
            Family::MultQ => "Q",
            Family::R => "r",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "p" => Family::P,
            "q" => Family::Q,
            "P" | "mp" | "mult_p" => Family::MultP,
            "Q" | "mq" | "mult_q" => Family::MultQ,
            "r" => Family::R,
            _ => return None,
        })
    }

    /// Lies in the copy of `⊕ M_{a_j}`.
    pub fn in_a(&self) -> bool {
        matches!(self, Family::P | Family::Q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseAlgebra {
    pub dims: DerivedDims,
    pub p: Vec<MonomialMatrix>,
    pub q: Vec<MonomialMatrix>,
    pub mult_p: Vec<MonomialMatrix>,
    pub mult_q: Vec<MonomialMatrix>,
    /// Identity of block `j`, a projection.
    pub block_id: Vec<MonomialMatrix>,
    pub v: MonomialMatrix,
    pub s: MonomialMatrix,
    pub r: MonomialMatrix,
    pub w: MonomialMatrix,
}

fn block_map(dims: &DerivedDims, j: usize, f: impl Fn(usize, usize) -> (usize, usize, Phase)) -> MonomialMatrix {
    let mut cols = vec![None; dims.d];
    for x in 0..dims.sizes[j] {
        for y in 0..dims.mult[j] {
            let (x2, y2, ph) = f(x, y);
            cols[dims.coord(j, x, y)] = Some((dims.coord(j, x2, y2), ph));
        }
    }
    MonomialMatrix::from_columns(cols).expect("block map is injective")
}

pub fn build_base(dims: &DerivedDims) -> BaseAlgebra {
    let n = dims.n();
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    let mut mult_p = Vec::with_capacity(n);
    let mut mult_q = Vec::with_capacity(n);
    let mut block_id = Vec::with_capacity(n);
    for j in 0..n {
        let (a, m) = (dims.sizes[j], dims.mult[j]);
        p.push(block_map(dims, j, |x, y| (x, y, Phase::new(x as i64, a as u32))));
        q.push(block_map(dims, j, |x, y| ((x + 1) % a, y, Phase::ONE)));
        mult_p.push(block_map(dims, j, |x, y| (x, y, Phase::new(y as i64, m as u32))));
        mult_q.push(block_map(dims, j, |x, y| (x, (y + 1) % m, Phase::ONE)));
        block_id.push(block_map(dims, j, |x, y| (x, y, Phase::ONE)));
    }
    let corners: Vec<usize> = (0..n).map(|j| dims.last_coord(j)).collect();
    let mut v_cols: Vec<_> = (0..dims.d).map(|c| Some((c, Phase::ONE))).collect();
    for j in 0..n {
        v_cols[corners[j]] = Some((corners[(j + 1) % n], Phase::ONE));
    }
    let v = MonomialMatrix::from_columns(v_cols).expect("cycle");
    let s = MonomialMatrix::diagonal((0..dims.d).map(|c| corners.contains(&c).then_some(Phase::ONE)));
    let r = s.mul(&v).mul(&s);
    let mut w_diag = vec![Phase::ONE; dims.d];
    for j in 0..n {
        for c in dims.block_range(j) {
            w_diag[c] = Phase::new(j as i64, n as u32);
        }
    }
    let w = MonomialMatrix::diagonal(w_diag.into_iter().map(Some));
    BaseAlgebra {
        dims: dims.clone(),
        p,
        q,
        mult_p,
        mult_q,
        block_id,
        v,
        s,
        r,
        w,
    }
}

impl BaseAlgebra {
    pub fn d(&self) -> usize {
        self.dims.d
    }

    pub fn n(&self) -> usize {
        self.dims.n()
    }

    pub fn generator(&self, family: Family, j: usize) -> &MonomialMatrix {
        match family {
            Family::P => &self.p[j],
            Family::Q => &self.q[j],
            Family::MultP => &self.mult_p[j],
            Family::MultQ => &self.mult_q[j],
            Family::R => &self.r,
        }
    }

    /// `g + 1 − 1_j`: a block generator padded by the identity off block `j`.
    pub fn padded(&self, family: Family, j: usize) -> MonomialMatrix {
        let g = self.generator(family, j);
        let mut cols: Vec<_> = (0..self.d()).map(|c| Some((c, Phase::ONE))).collect();
        for c in self.dims.block_range(j) {
            cols[c] = g.column(c);
        }
        MonomialMatrix::from_columns(cols).expect("padding keeps injectivity")
    }

    /// `Σ_j g_j` over all blocks, a unitary.
    pub fn block_sum(&self, family: Family) -> MonomialMatrix {
        let mut cols: Vec<_> = vec![None; self.d()];
        for j in 0..self.n() {
            let g = self.generator(family, j);
            for c in self.dims.block_range(j) {
                cols[c] = g.column(c);
            }
        }
        MonomialMatrix::from_columns(cols).expect("blocks are disjoint")
    }

    /// All block generators, labelled.
    pub fn block_generators(&self) -> Vec<(Family, usize, &MonomialMatrix)> {
        let mut out = Vec::new();
        for j in 0..self.n() {
            for f in Family::BLOCK {
                out.push((f, j, self.generator(f, j)));
            }
        }
        out
    }

    /// Monomial basis `p^α q^β P^γ Q^δ` of each block, `Σ (a_j d_j)²` elements.
    pub fn b_basis(&self) -> Vec<MonomialMatrix> {
        let mut out = Vec::with_capacity(self.dims.dim_b());
        for j in 0..self.n() {
            let (a, m) = (self.dims.sizes[j] as u64, self.dims.mult[j] as u64);
            for al in 0..a {
                for be in 0..a {
                    let left = self.p[j].pow(al).mul(&self.q[j].pow(be));
                    for ga in 0..m {
                        for de in 0..m {
                            let right = self.mult_p[j].pow(ga).mul(&self.mult_q[j].pow(de));
                            out.push(self.block_id[j].mul(&left).mul(&right));
                        }
                    }
                }
            }
        }
        out
    }

    /// Monomial basis `p^α q^β` of the `⊕ M_{a_j}` copy, padded to `M_d`.
    pub fn a_basis(&self) -> Vec<MonomialMatrix> {
        let mut out = Vec::with_capacity(self.dims.dim_a());
        for j in 0..self.n() {
            let a = self.dims.sizes[j] as u64;
            for al in 0..a {
                for be in 0..a {
                    out.push(self.block_id[j].mul(&self.p[j].pow(al)).mul(&self.q[j].pow(be)));
                }
            }
        }
        out
    }

    /// Words `b₁ r^m b₂` for `m < n`, whose span is all of `M_d`.
    pub fn spanning_words(&self) -> Vec<MonomialMatrix> {
        let basis = self.b_basis();
        let mut out = basis.clone();
        for m in 1..self.n() as u64 {
            let rm = self.r.pow(m);
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
        out
    }
}

/// Words budget for the spanning check inside [`check_base_relations`].
pub const SPANNING_WORD_BUDGET: usize = 1 << 20;

fn eq_check(name: &str, anchor: &str, lhs: &MonomialMatrix, rhs: &MonomialMatrix) -> Check {
    let ok = lhs == rhs;
    Check::exact(name, anchor, ok, if ok { String::new() } else { "monomials differ".into() })
}

fn exchange_check(name: &str, anchor: &str, a: &MonomialMatrix, b: &MonomialMatrix, phase: Phase) -> Check {
    let ex = a.exchange(b);
    Check::exact(name, anchor, ex.satisfies(phase), format!("exchange {ex}, expected {phase}"))
}

pub fn check_base_relations(base: &BaseAlgebra) -> Report {
    let mut rep = Report::new();
    let d = base.d();
    let n = base.n();
    let one = MonomialMatrix::identity(d);
    let dims = &base.dims;
    for j in 0..n {
        let (a, m) = (dims.sizes[j] as u64, dims.mult[j] as u64);
        let pj = &base.block_id[j];
        rep.push(eq_check(&format!("p{j}^a = 1_{j}"), "p_j^{a_j} = block identity", &base.p[j].pow(a), pj));
        rep.push(eq_check(&format!("q{j}^a = 1_{j}"), "q_j^{a_j} = block identity", &base.q[j].pow(a), pj));
        rep.push(eq_check(&format!("P{j}^d = 1_{j}"), "P_j^{d_j} = block identity", &base.mult_p[j].pow(m), pj));
        rep.push(eq_check(&format!("Q{j}^d = 1_{j}"), "Q_j^{d_j} = block identity", &base.mult_q[j].pow(m), pj));
        rep.push(exchange_check(&format!("p{j}q{j}"), "p_j q_j = γ_j q_j p_j", &base.p[j], &base.q[j], dims.gamma_i[j]));
        rep.push(exchange_check(
            &format!("P{j}Q{j}"),
            "P_j Q_j = ρ_j Q_j P_j",
            &base.mult_p[j],
            &base.mult_q[j],
            dims.rho_i[j],
        ));
        for f in Family::BLOCK {
            for g in Family::BLOCK {
                if f.in_a() != g.in_a() {
                    let ok = base.generator(f, j).exchange(base.generator(g, j)).commutes();
                    rep.push(Check::exact(
                        format!("[{}{j}, {}{j}] = 0", f.label(), g.label()),
                        "A commutes with A' ∩ B",
                        ok,
                        "",
                    ));
                }
            }
        }
        for k in 0..n {
            if k != j {
                let ok = base.q[j].mul(&base.mult_q[k]).is_zero() && base.p[j].mul(&base.p[k]).is_zero();
                rep.push(Check::exact(format!("block {j}·block {k} = 0"), "distinct blocks are orthogonal", ok, ""));
            }
        }
    }
    rep.push(eq_check("v^n = 1", "v^n = 1", &base.v.pow(n as u64), &one));
    let one_minus_s = MonomialMatrix::diagonal(base.s.columns().map(|e| if e.is_some() { None } else { Some(Phase::ONE) }));
    let mut v_cols: Vec<_> = one_minus_s.columns().collect();
    for (c, e) in base.r.columns().enumerate() {
        if e.is_some() {
            v_cols[c] = e;
        }
    }
    let recomposed = MonomialMatrix::from_columns(v_cols).expect("disjoint supports");
    rep.push(eq_check("v = 1 - s + r", "v = 1 − s + r", &base.v, &recomposed));
    rep.push(eq_check("r^n = s", "r^n = s", &base.r.pow(n as u64), &base.s));
    rep.push(eq_check("r*r = s", "r* r = s", &base.r.adjoint().mul(&base.r), &base.s));
    rep.push(eq_check("rr* = s", "r r* = s", &base.r.mul(&base.r.adjoint()), &base.s));
    rep.push(Check::exact("[s, v] = 0", "[s, v] = 0", base.s.exchange(&base.v).commutes(), ""));
    rep.push(Check::exact("[s, r] = 0", "[s, r] = 0", base.s.exchange(&base.r).commutes(), ""));
    let s_ones = base.s.trace_phase_counts()[0];
    rep.push(Check::exact("s has n ones", "s diagonal projection of rank n", s_ones as usize == n, format!("{s_ones} ones")));
    rep.push(eq_check("w^n = 1", "w^n = 1", &base.w.pow(n as u64), &one));
    let central = base
        .block_generators()
        .iter()
        .all(|(_, _, g)| base.w.exchange(g).commutes());
    rep.push(Check::exact("w central in B", "Ad w acts trivially on B", central, ""));
    if n > 1 {
        let lhs = base.w.mul(&base.r).mul(&base.w.adjoint());
        rep.push(eq_check("Ad w(r) = γr", "Ad w (r) = γ r", &lhs, &base.r.scale(dims.gamma)));
    } else {
        rep.push(Check::new("Ad w(r) = γr", "Ad w (r) = γ r", Status::Pass, 0.0, "n = 1: γ = 1, skipped"));
    }
    let compressed: Vec<MonomialMatrix> = base
        .block_generators()
        .iter()
        .map(|(_, _, g)| base.s.mul(g).mul(&base.s))
        .collect();
    let abelian = compressed
        .iter()
        .all(|x| compressed.iter().all(|y| x.exchange(y).commutes()));
    rep.push(Check::exact("sBs abelian", "s B s is abelian", abelian, ""));
    let sbs: Vec<MonomialMatrix> = base
        .b_basis()
        .iter()
        .map(|b| base.s.mul(b).mul(&base.s))
        .filter(|x| !x.is_zero())
        .collect();
    let base_rank = monomial_span_rank(&sbs, DEFAULT_TOL).unwrap_or(usize::MAX);
    let mut invariant = true;
    for x in &compressed {
        let y = base.v.mul(x).mul(&base.v.adjoint());
        let mut fam = sbs.clone();
        fam.push(y);
        invariant &= monomial_span_rank(&fam, DEFAULT_TOL).unwrap_or(0) == base_rank;
    }
    rep.push(Check::exact("Ad v(sBs) ⊂ sBs", "Ad v sends s B s onto itself", invariant, format!("dim sBs = {base_rank}")));
    let dim_b = dims.dim_b();
    let b_rank = monomial_span_rank(&base.b_basis(), DEFAULT_TOL).unwrap_or(0);
    rep.push(Check::exact(
        "dim B",
        "dim B = Σ (a_j d_j)²",
        b_rank == dim_b,
        format!("rank {b_rank}, expected {dim_b}"),
    ));
    rep.push(check_corner_span(base));
    rep
}

/// Span of `B + B r B + ⋯ + B r^{n−1} B` against `d²`.
pub fn check_corner_span(base: &BaseAlgebra) -> Check {
    let d = base.d();
    let words = base.dims.dim_b().pow(2) * base.n().saturating_sub(1) + base.dims.dim_b();
    if words > SPANNING_WORD_BUDGET {
        return Check::new(
            "span B r^m B",
            "B + B r B + ⋯ + B r^{n−1} B = M_d",
            Status::Inconclusive,
            f64::NAN,
            format!("{words} words exceed budget {SPANNING_WORD_BUDGET}"),
        );
    }
    match monomial_span_rank(&base.spanning_words(), DEFAULT_TOL) {
        Ok(rank) => Check::new(
            "span B r^m B",
            "B + B r B + ⋯ + B r^{n−1} B = M_d",
            Status::from_bool(rank == d * d),
            (d * d).abs_diff(rank) as f64,
            format!("rank {rank}, d² = {}", d * d),
        ),
        Err(e) => Check::new("span B r^m B", "B + B r B + ⋯ + B r^{n−1} B = M_d", Status::Inconclusive, f64::NAN, e.to_string()),
    }
}

/// Dimension of the span of the spanning words.
pub fn spanning_rank(base: &BaseAlgebra) -> crate::Result<usize> {
    monomial_span_rank(&base.spanning_words(), DEFAULT_TOL)
}

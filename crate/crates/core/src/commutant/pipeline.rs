use num_complex::Complex64;
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::algebra::{averaging_expectation, conditional_expectation, SubalgebraBasis};
use super::monomial::monomial_commutant_with_capacity;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Exchange, MonomialMatrix, MonomialSum};
use crate::presentation::{in_s1, in_s2, in_s3, AlgebraSpec};
use crate::report::{Check, Report, Status};
use crate::tower::{build_tower_with_capacity, GeneratorRef, Tower};
use crate::weyl::{BaseAlgebra, Family};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Kills nonzero `r`-powers in one slot.
    R,
    /// Kills the multiplicity-clock part of one block in one slot.
    MultQ,
    /// Kills the multiplicity-shift part of one block in one slot.
    MultP,
}

/// One averaging `x ↦ (1/m) Σ T^j x T^{−j}` with `T` the tail of a level-`level` generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingStep {
    pub kind: StepKind,
    pub slot: usize,
    pub level: usize,
    pub summand: Option<usize>,
    pub order: u64,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub element: DenseMatrix,
    pub steps: Vec<AveragingStep>,
    /// `‖y − P y‖₂` with `P` the projection onto `⊗^k A ⊗ 1`.
    pub distance: f64,
    pub report: Report,
}

/// Smallest level `L` in `k+1..=limit` with `L − slot ∈ hit` and `L − m ∉ avoid` for the other active slots.
pub fn select_level(
    k: usize,
    slot: usize,
    limit: usize,
    hit: impl Fn(usize) -> bool,
    avoid: impl Fn(usize) -> bool,
) -> Option<usize> {
    (k + 1..=limit).find(|&l| hit(l - slot) && (1..=k).filter(|&m| m != slot).all(|m| !avoid(l - m)))
}

/// `T ⊗ 1` where `T` is the part of the generator on slots before its own.
pub fn tail_unitary(tower: &Tower, g: &GeneratorRef) -> MonomialMatrix {
    let mut slots = tower.slot_factors(g);
    let last = slots.len() - 1;
    slots[last] = MonomialMatrix::identity(tower.d());
    tower.full_from_slots(&slots, g.level)
}

/// Monomial basis of `⊗_{m ≤ k} A_m`, orthogonal under the trace.
pub fn tensor_a_basis(tower: &Tower, k: usize) -> Vec<MonomialMatrix> {
    let a = tower.base().a_basis();
    let mut acc: Vec<MonomialMatrix> = vec![MonomialMatrix::identity(1)];
    for _ in 0..k {
        acc = acc.iter().flat_map(|x| a.iter().map(move |y| x.tensor(y))).collect();
    }
    acc.into_iter().map(|x| tower.embed(&x)).collect()
}

/// `τ(b* y)` for a monomial `b`.
pub fn monomial_inner(y: &DenseMatrix, b: &MonomialMatrix) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (c, e) in b.columns().enumerate() {
        if let Some((r, p)) = e {
            s += p.to_complex().conj() * y.get(r, c);
        }
    }
    s / y.dim() as f64
}

/// Projection onto the span of a trace-orthogonal monomial family.
pub fn project_monomials(y: &DenseMatrix, basis: &[MonomialMatrix]) -> DenseMatrix {
    let n = y.dim();
    let mut out = DenseMatrix::zeros(n);
    for b in basis {
        let norm = b.nnz() as f64 / n as f64;
        let coef = monomial_inner(y, b) / norm;
        for (c, e) in b.columns().enumerate() {
            if let Some((r, p)) = e {
                out.set(r, c, out.get(r, c) + coef * p.to_complex());
            }
        }
    }
    out
}

/// The level-`L` projection `1 ⊗ ⋯ ⊗ s ⊗ 1`.
pub fn s_at_level(tower: &Tower, level: usize) -> MonomialMatrix {
    let id = MonomialMatrix::identity(tower.d());
    let mut slots = vec![id; level];
    slots[level - 1] = tower.base().s.clone();
    tower.full_from_slots(&slots, level)
}

fn slot_pattern_check(tower: &Tower, step: &AveragingStep, k: usize) -> Check {
    let b = tower.base();
    let g = match step.kind {
        StepKind::R => GeneratorRef::r(step.level),
        _ => GeneratorRef::new(Family::MultQ, step.summand.unwrap_or(0), step.level),
    };
    let slots = tower.slot_factors(&g);
    let id = MonomialMatrix::identity(tower.d());
    let others_trivial = (1..=k).filter(|&m| m != step.slot).all(|m| slots[m - 1] == id);
    let factor = &slots[step.slot - 1];
    let (target, want) = match step.kind {
        StepKind::R => (&b.r, b.dims.gamma),
        StepKind::MultQ => {
            let j = step.summand.unwrap_or(0);
            (&b.mult_p[j], b.dims.rho_i[j].inv())
        }
        StepKind::MultP => {
            let j = step.summand.unwrap_or(0);
            (&b.mult_q[j], b.dims.rho_i[j])
        }
    };
    let ex = factor.exchange(target);
    let ok = others_trivial && ex == Exchange::Phase(want);
    Check::exact(
        format!("averaging: {:?} step, slot {} via level {}", step.kind, step.slot, step.level),
        "tail acts on the slot with the required phase and trivially on other active slots",
        ok,
        format!("exchange {ex}, expected {want}, others trivial {others_trivial}"),
    )
}

/// Averages `x ∈ M_k ⊗ 1` over tails of higher-level generators until only `⊗^k A` survives.
///
/// Levels are chosen per slot as the smallest available ones whose tail hits that slot
/// alone; every choice is verified in the report.
pub fn averaging_pipeline(tower: &Tower, k: usize, x: &DenseMatrix, depth_budget: usize, tol: f64) -> Result<PipelineOutcome> {
    let n_amb = tower.ambient_dim();
    if x.dim() != n_amb {
        return Err(Error::DimensionMismatch(x.dim(), n_amb));
    }
    if k == 0 || k >= tower.depth() {
        return Err(Error::LevelOverflow { level: k, depth: tower.depth() });
    }
    let limit = depth_budget.min(tower.depth());
    let dims = tower.dims().clone();
    let n = dims.n();
    let mut steps = Vec::new();
    let mut report = Report::new();
    let mut y = x.clone();

    let need = |what: String| Error::DepthBudget { what, budget: limit };
    if n > 1 {
        for slot in 1..=k {
            let level = select_level(k, slot, limit, in_s1, in_s1).ok_or_else(|| need(format!("r-step level for slot {slot}")))?;
            let step = AveragingStep {
                kind: StepKind::R,
                slot,
                level,
                summand: None,
                order: n as u64,
            };
            report.push(slot_pattern_check(tower, &step, k));
            let t = tail_unitary(tower, &GeneratorRef::r(level));
            let before = y.clone();
            y = averaging_expectation(&y, &t, n as u64)?;
            if slot == 1 {
                let s_l = s_at_level(tower, level);
                let diff = before.sub(&y);
                let lhs = diff.mul(&s_l.to_dense()).two_norm();
                let rhs = (n as f64 / dims.d as f64).sqrt() * diff.two_norm();
                report.push(Check::within(
                    "averaging: norm identity after the r-step",
                    "|(x - y) s_L|_2 = sqrt(n/d) |x - y|_2",
                    (lhs - rhs).abs(),
                    tol * rhs.max(1.0),
                    format!("lhs {lhs:.6e}, rhs {rhs:.6e}"),
                ));
            }
            steps.push(step);
        }
    }
    let mult_hit = |t: usize| in_s2(t) || in_s3(t);
    for (kind, hit) in [(StepKind::MultQ, in_s2 as fn(usize) -> bool), (StepKind::MultP, in_s3 as fn(usize) -> bool)] {
        for slot in 1..=k {
            let level = select_level(k, slot, limit, hit, mult_hit)
                .ok_or_else(|| need(format!("{kind:?}-step level for slot {slot}")))?;
            for j in 0..n {
                if dims.mult[j] == 1 {
                    continue;
                }
                let step = AveragingStep {
                    kind,
                    slot,
                    level,
                    summand: Some(j),
                    order: dims.mult[j] as u64,
                };
                report.push(slot_pattern_check(tower, &step, k));
                let t = tail_unitary(tower, &GeneratorRef::new(Family::MultQ, j, level));
                y = averaging_expectation(&y, &t, step.order)?;
                steps.push(step);
            }
        }
    }

    let basis = tensor_a_basis(tower, k);
    let py = project_monomials(&y, &basis);
    let distance = y.sub(&py).two_norm();
    report.push(Check::within(
        "averaging: output lies in the tensor power of A",
        "y in span(A_1 ... A_k)",
        distance,
        tol,
        format!("{} steps", steps.len()),
    ));
    let oracle = project_monomials(x, &basis);
    report.push(Check::within(
        "averaging: output equals the trace-orthogonal expectation",
        "y = E(x)",
        y.sub(&oracle).two_norm(),
        tol,
        "",
    ));
    Ok(PipelineOutcome {
        element: y,
        steps,
        distance,
        report,
    })
}

/// Averaging over `Σ_j Q_j` and then `Σ_j P_j` against the trace-orthogonal expectation onto `A`, on a basis of `B`.
pub fn check_slot_averaging(base: &BaseAlgebra, tol: f64) -> Result<Report> {
    let d = base.d();
    let a = SubalgebraBasis::from_monomials(d, &base.a_basis(), 1e-12);
    let u = base.block_sum(Family::MultQ);
    let u2 = base.block_sum(Family::MultP);
    let (ou, ou2) = (u.order().unwrap_or(0), u2.order().unwrap_or(0));
    let lcm = base.dims.mult.iter().fold(1u64, |m, &x| m.lcm(&(x as u64)));
    let mut worst: f64 = 0.0;
    for b in base.b_basis() {
        let x = b.to_dense();
        let avg = averaging_expectation(&averaging_expectation(&x, &u, ou)?, &u2, ou2)?;
        worst = worst.max(avg.sub(&conditional_expectation(&x, &a)).max_abs());
    }
    let mut report = Report::new();
    report.push(Check::exact(
        "averaging: block-sum unitaries have order lcm(d_j)",
        "order(sum_j Q_j) = lcm(d_j)",
        ou == lcm && ou2 == lcm,
        format!("orders {ou}, {ou2}; lcm {lcm}"),
    ));
    report.push(Check::within(
        "averaging: one-slot averages equal E_A on B",
        "Ad-average over sum Q_j then sum P_j = E_A",
        worst,
        tol,
        format!("{} basis elements of B", base.dims.dim_b()),
    ));
    Ok(report)
}

/// The `r`-degree of `x` at `slot`: the exponent `e` with `W x W* = γ^e x`, `W` = `w` in that slot.
pub fn r_degree(tower: &Tower, x: &MonomialMatrix, slot: usize) -> Option<i64> {
    let id = MonomialMatrix::identity(tower.d());
    let mut slots = vec![id; slot];
    slots[slot - 1] = tower.base().w.clone();
    let w = tower.full_from_slots(&slots, slot);
    let gamma = tower.dims().gamma;
    match w.exchange(x) {
        Exchange::Phase(p) => (0..tower.n() as i64).find(|&e| gamma.pow(e) == p),
        Exchange::BothZero => Some(0),
        Exchange::NonScalar => None,
    }
}

/// Exact checks behind the `r`-step on sampled words of levels `≤ k`:
/// `r_L x r_L* = γ^e x s_L` and the tail average annihilates words of nonzero degree.
pub fn check_r_step(tower: &Tower, k: usize, samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    let dims = tower.dims();
    let (n, d) = (dims.n(), dims.d);
    let s = &tower.base().s;
    let counts = s.trace_phase_counts();
    let fixed: u64 = counts.iter().sum();
    report.push(Check::exact(
        "averaging: tau(s) = n/d",
        "tau(s_L) = n/d",
        fixed == n as u64 && counts[0] == fixed && s.nnz() == n,
        format!("{fixed}/{d} vs {n}/{d}"),
    ));
    if n == 1 {
        report.push(Check::new("averaging: r-step", "r_L x r_L* = gamma^e x s_L", Status::Inconclusive, 0.0, "n = 1, no r-powers"));
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: Vec<MonomialMatrix> = Vec::new();
    for i in 1..=k {
        for e in 1..n as i64 {
            words.push(tower.resolve(&GeneratorRef::r(i).pow(e))?);
        }
    }
    while words.len() < samples {
        let w = tower.sample_word(&mut rng, 1 + words.len() % 5, k);
        words.push(tower.product(&w)?);
    }
    let (mut checked, mut killed, mut kept, mut bad) = (0usize, 0usize, 0usize, Vec::new());
    let limit = tower.depth();
    for (idx, x) in words.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for slot in 1..=k {
            let Some(level) = select_level(k, slot, limit, in_s1, in_s1) else {
                return Err(Error::DepthBudget {
                    what: format!("r-step level for slot {slot}"),
                    budget: limit,
                });
            };
            let Some(e) = r_degree(tower, x, slot) else {
                bad.push(format!("word {idx}: no r-degree at slot {slot}"));
                continue;
            };
            let rl = tower.resolve(&GeneratorRef::r(level))?;
            let lhs = rl.mul(x).mul(&rl.adjoint());
            let rhs = x.mul(&s_at_level(tower, level)).scale(dims.gamma.pow(e));
            checked += 1;
            if lhs != rhs {
                bad.push(format!("word {idx}, slot {slot}: r_L x r_L* != gamma^{e} x s_L"));
            }
            let t = tail_unitary(tower, &GeneratorRef::r(level));
            let avg = MonomialSum::from_monomial(x.clone()).average(&t, n as u64);
            if e == 0 {
                kept += 1;
                let same = avg.len() == 1 && avg.to_dense().approx_eq(&x.to_dense(), 1e-12);
                if !same {
                    bad.push(format!("word {idx}, slot {slot}: degree-0 word changed"));
                }
            } else {
                killed += 1;
                if !avg.is_empty() {
                    bad.push(format!("word {idx}, slot {slot}: degree {e} word survived"));
                }
            }
        }
    }
    report.push(Check::exact(
        "averaging: r-step annihilates nonzero r-powers exactly",
        "r_L x r_L* = gamma^e x s_L; average over the tail kills e != 0",
        bad.is_empty() && killed > 0,
        if bad.is_empty() {
            format!("{checked} (word, slot) pairs: {killed} annihilated, {kept} fixed")
        } else {
            bad.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    ));
    Ok(report)
}

/// Dimension of the commutant of levels `k+1..=K` inside `M_{d^K}` for each `K` in `depths`,
/// with a containment check of the level-`≤ k` copies of `A`.
pub fn truncated_relative_commutant(spec: &AlgebraSpec, k: usize, depths: &[usize], capacity: u128) -> Result<Vec<(usize, usize, bool)>> {
    let mut out = Vec::new();
    for &depth in depths {
        if depth <= k {
            return Err(Error::LevelOverflow { level: k, depth });
        }
        let tower = build_tower_with_capacity(spec, depth, capacity)?;
        let gens: Vec<MonomialMatrix> = tower
            .generator_refs()
            .iter()
            .filter(|g| g.level > k)
            .map(|g| tower.resolve(g))
            .collect::<Result<_>>()?;
        let c = monomial_commutant_with_capacity(&gens, capacity * capacity)?;
        let contained = tensor_a_basis(&tower, k).iter().all(|b| c.contains(b));
        out.push((depth, c.dim(), contained));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::validate_spec;
    use crate::tower::build_tower;
    use crate::weyl::build_base;

    #[test]
    fn slot_averaging_matches_expectation() {
        for spec in [AlgebraSpec::cs1(), AlgebraSpec::cs2()] {
            let base = build_base(&validate_spec(&spec).unwrap());
            let rep = check_slot_averaging(&base, 1e-9).unwrap();
            assert!(rep.all_pass(), "{}", rep.to_text());
        }
    }

    #[test]
    fn pipeline_on_cs1() {
        let t = build_tower(&AlgebraSpec::cs1(), 4).unwrap();
        let a = t.generator(Family::P, 0, 1).unwrap().to_dense();
        let out = averaging_pipeline(&t, 1, &a, 4, 1e-9).unwrap();
        assert!(out.report.all_pass(), "{}", out.report.to_text());
        assert!(out.element.approx_eq(&a, 1e-12));
        let q = t.generator(Family::MultQ, 0, 1).unwrap().to_dense();
        let out = averaging_pipeline(&t, 1, &q, 4, 1e-9).unwrap();
        assert!(out.element.max_abs() < 1e-12);
        let r = t.generator(Family::R, 0, 1).unwrap().to_dense();
        let out = averaging_pipeline(&t, 1, &r, 4, 1e-9).unwrap();
        assert!(out.element.max_abs() < 1e-12);
        assert!(matches!(averaging_pipeline(&t, 1, &a, 3, 1e-9), Err(Error::DepthBudget { .. })));
    }

    #[test]
    fn r_step_exact() {
        let t = build_tower(&AlgebraSpec::cs1(), 3).unwrap();
        let rep = check_r_step(&t, 1, 50, 7).unwrap();
        assert!(rep.all_pass(), "{}", rep.to_text());
    }

    #[test]
    fn relative_commutant_contains_a() {
        let dims = truncated_relative_commutant(&AlgebraSpec::cs1(), 1, &[2, 3], 1 << 16).unwrap();
        for (_, dim, contained) in &dims {
            assert!(contained);
            assert!(*dim >= 2);
        }
    }
}

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::commutant::{averaging_expectation, conditional_expectation, SubalgebraBasis};
use crate::error::{Error, Result};
use crate::linalg::MonomialMatrix;
use crate::report::{Check, Report};
use crate::tower::{GeneratorRef, Tower};
use crate::weyl::Family;

/// Per-slot factors of a word of levels `≤ k`, so that the word is `⊗ slots ⊗ 1`.
fn word_slots(tower: &Tower, word: &[GeneratorRef], k: usize) -> Vec<MonomialMatrix> {
    let mut slots = vec![MonomialMatrix::identity(tower.d()); k];
    for g in word {
        for (i, f) in tower.slot_factors(g).iter().enumerate() {
            slots[i] = slots[i].mul(&f.pow_signed(g.power));
        }
    }
    slots
}

struct Collapse {
    trace: Complex64,
    collapsed_trace: Complex64,
    /// Some slot has no degree-zero part.
    vanishes: bool,
    /// Every slot factor already lies in `A` and is left unchanged.
    fixes_a: Option<bool>,
}

fn collapse_word(tower: &Tower, word: &[GeneratorRef], k: usize, a: &SubalgebraBasis, tol: f64) -> Result<Collapse> {
    let slots = word_slots(tower, word, k);
    let x = tower.product(word)?;
    if tower.full_from_slots(&slots, k) != x {
        return Err(Error::InvalidParams(format!("word of levels above {k} does not factor over the first {k} slots")));
    }
    let w = &tower.base().w;
    let mut collapsed_trace = Complex64::new(1.0, 0.0);
    let mut vanishes = false;
    let mut unchanged = true;
    for f in &slots {
        let dense = f.to_dense();
        let degree_zero = averaging_expectation(&dense, w, tower.n() as u64)?;
        let image = conditional_expectation(&degree_zero, a);
        vanishes |= image.max_abs() <= tol;
        unchanged &= image.approx_eq(&dense, tol);
        collapsed_trace *= image.normalized_trace();
    }
    let in_a = word.iter().all(|g| g.family.in_a());
    Ok(Collapse {
        trace: x.normalized_trace(),
        collapsed_trace,
        vanishes,
        fixes_a: in_a.then_some(unchanged),
    })
}

/// `τ(x) = Π τ(E_A(x_i⁰))` over the slot factors `x_i` of sampled words `x` of levels `≤ k`,
/// where `x_i⁰` keeps the `r`-degree-zero part of the slot.
pub fn trace_collapse_check(tower: &Tower, k: usize, samples: usize, seed: u64) -> Result<Report> {
    if k == 0 || k + 1 > tower.depth() {
        return Err(Error::LevelOverflow { level: k + 1, depth: tower.depth() });
    }
    let tol = 1e-9;
    let a = SubalgebraBasis::from_monomials(tower.d(), &tower.base().a_basis(), tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words: Vec<Vec<GeneratorRef>> = vec![
        vec![GeneratorRef::r(1)],
        vec![GeneratorRef::new(Family::MultQ, 0, 1), GeneratorRef::new(Family::P, 0, 2.min(k))],
        vec![GeneratorRef::new(Family::P, 0, 1), GeneratorRef::new(Family::Q, tower.n() - 1, k)],
    ];
    words.extend((0..samples).map(|_| tower.sample_word(&mut rng, 4, k)));

    let mut report = Report::new();
    let mut worst: f64 = 0.0;
    let mut zero_mismatch = Vec::new();
    let mut a_moved = Vec::new();
    for (idx, word) in words.iter().enumerate() {
        let c = collapse_word(tower, word, k, &a, tol)?;
        worst = worst.max((c.trace - c.collapsed_trace).norm());
        if c.vanishes && c.trace.norm() > tol {
            zero_mismatch.push(idx);
        }
        if c.fixes_a == Some(false) {
            a_moved.push(idx);
        }
    }
    let r1 = collapse_word(tower, &words[0], k, &a, tol)?;
    report.push(Check::exact(
        "collapse: r_1 collapses to zero",
        "tau(r_1) = 0",
        r1.vanishes && r1.trace.norm() <= tol,
        format!("tau = {:.3e}", r1.trace.norm()),
    ));
    report.push(Check::within(
        "collapse: trace equals the trace of the collapsed word",
        "tau(x) = tau(sum over zero r-powers of E_A slot images)",
        worst,
        tol,
        format!("{} words of levels <= {k}", words.len()),
    ));
    report.push(Check::exact(
        "collapse: vanishing collapse means vanishing trace",
        "dropped summands carry no trace",
        zero_mismatch.is_empty(),
        format!("{zero_mismatch:?}"),
    ));
    report.push(Check::exact(
        "collapse: A-words are fixed",
        "collapse is the identity on the A span",
        a_moved.is_empty(),
        format!("{a_moved:?}"),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::AlgebraSpec;
    use crate::tower::build_tower;

    #[test]
    fn collapse_cs1_and_cs2() {
        for spec in [AlgebraSpec::cs1(), AlgebraSpec::cs2()] {
            let t = build_tower(&spec, 3).unwrap();
            let rep = trace_collapse_check(&t, 2, 40, 3).unwrap();
            assert!(rep.all_pass(), "{}", rep.to_text());
        }
    }

    #[test]
    fn mult_shift_times_clock_has_zero_trace() {
        let t = build_tower(&AlgebraSpec::cs1(), 3).unwrap();
        let a = SubalgebraBasis::from_monomials(t.d(), &t.base().a_basis(), 1e-9);
        let word = [GeneratorRef::new(Family::MultQ, 0, 1), GeneratorRef::new(Family::P, 0, 2)];
        let c = collapse_word(&t, &word, 2, &a, 1e-9).unwrap();
        assert!(c.trace.norm() < 1e-12);
        assert!(c.collapsed_trace.norm() < 1e-12);
        assert!(c.vanishes);
    }

    #[test]
    fn depth_is_checked() {
        let t = build_tower(&AlgebraSpec::cs1(), 2).unwrap();
        assert!(matches!(trace_collapse_check(&t, 2, 1, 0), Err(Error::LevelOverflow { .. })));
    }
}

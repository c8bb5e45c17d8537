use serde::{Deserialize, Serialize};

use super::Tower;
use crate::error::{Error, Result};
use crate::linalg::{clock, shift, Exchange, MonomialMatrix, Phase};
use crate::presentation::in_s1;
use crate::report::{Check, Report, Status};
use crate::weyl::Family;

/// Default bound on the number of `(Q, S)` words examined for the witness search.
pub const DEFAULT_WORD_BUDGET: usize = 1 << 14;

/// Outcome of [`check_shift_definition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    /// `{k ≥ 1 : Ψ^k(u)·u = γ·u·Ψ^k(u)}` within the available depth.
    pub stream: Vec<usize>,
    pub words_checked: usize,
    /// Words for which no translate exchanges with a nontrivial scalar.
    pub unwitnessed: Vec<String>,
    pub report: Report,
}

fn word_label(q: &[usize], s: &[u64]) -> String {
    let parts: Vec<String> = q.iter().zip(s).map(|(i, j)| format!("u{i}^{j}")).collect();
    parts.join("·")
}

type QsWord = (Vec<usize>, Vec<u64>);

/// Enumerates `(Q, S)`: strictly increasing `Q ⊂ [0, span)` of size `1..=max_len`,
/// exponents in `1..n`.
fn qs_words(span: usize, n: u64, max_len: usize, budget: usize) -> (Vec<QsWord>, bool) {
    let mut out = Vec::new();
    let mut truncated = false;
    let mut stack: Vec<(Vec<usize>, Vec<u64>)> = vec![(vec![], vec![])];
    while let Some((q, s)) = stack.pop() {
        if !q.is_empty() {
            if out.len() >= budget {
                truncated = true;
                break;
            }
            out.push((q.clone(), s.clone()));
        }
        if q.len() == max_len {
            continue;
        }
        let start = q.last().map_or(0, |&i| i + 1);
        for i in (start..span).rev() {
            for j in (1..n).rev() {
                let mut q2 = q.clone();
                let mut s2 = s.clone();
                q2.push(i);
                s2.push(j);
                stack.push((q2, s2));
            }
        }
    }
    (out, truncated)
}

/// Checks the finite-depth shift axioms on `unitaries[k] = Ψ^k(u)`, `k = 0..=depth`,
/// with `n` the order of `gamma`: `u^n = 1`, the commute-or-γ-commute rule, and a
/// nontrivial exchange witness for every `(Q, S)` word. Generation is not checked.
pub fn check_shift_definition(unitaries: &[MonomialMatrix], gamma: Phase, depth: usize) -> Result<ShiftReport> {
    check_shift_definition_with(unitaries, gamma, depth, 3, DEFAULT_WORD_BUDGET)
}

pub fn check_shift_definition_with(
    unitaries: &[MonomialMatrix],
    gamma: Phase,
    depth: usize,
    max_word_len: usize,
    word_budget: usize,
) -> Result<ShiftReport> {
    if unitaries.len() < depth + 1 {
        return Err(Error::InvalidParams(format!(
            "need {} translates for depth {depth}, got {}",
            depth + 1,
            unitaries.len()
        )));
    }
    let dim = unitaries[0].dim();
    for (k, u) in unitaries.iter().enumerate() {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch(u.dim(), dim));
        }
        if !u.is_unitary() {
            return Err(Error::NonUnitary(format!("translate {k} has {} nonzero columns of {dim}", u.nnz())));
        }
    }
    let n = gamma.order() as u64;
    let fam = &unitaries[..=depth];
    let mut report = Report::new();

    let order = fam[0].order().unwrap_or(0);
    report.push(Check::exact(
        "shift: u^n = 1",
        "u^n = 1",
        order > 0 && n.is_multiple_of(order),
        format!("order {order}, n = {n}"),
    ));

    let mut stream = Vec::new();
    let mut bad = Vec::new();
    for k in 1..=depth {
        match fam[k].exchange(&fam[0]) {
            Exchange::Phase(p) if p.is_one() => {}
            Exchange::Phase(p) if p == gamma => stream.push(k),
            other => bad.push(format!("k={k}: {other}")),
        }
    }
    report.push(Check::exact(
        "shift: translates commute or gamma-commute",
        "Psi^k(u) u = u Psi^k(u) or gamma u Psi^k(u)",
        bad.is_empty(),
        if bad.is_empty() { format!("S = {stream:?}") } else { bad.join("; ") },
    ));

    let mut drift = Vec::new();
    for l in 1..=depth {
        for m in 1..l {
            if fam[l].exchange(&fam[m]) != fam[l - m].exchange(&fam[0]) {
                drift.push(format!("({l},{m})"));
            }
        }
    }
    report.push(Check::exact(
        "shift: exchanges depend only on the offset",
        "Psi^l(u) Psi^m(u) exchange = Psi^(l-m)(u) u exchange",
        drift.is_empty(),
        drift.join(" "),
    ));

    let (words, truncated) = qs_words(depth, n, max_word_len, word_budget);
    let mut unwitnessed = Vec::new();
    for (q, s) in &words {
        let mut w = MonomialMatrix::identity(dim);
        for (&i, &j) in q.iter().zip(s) {
            w = w.mul(&fam[i].pow(j));
        }
        let witnessed = fam.iter().any(|u| matches!(u.exchange(&w), Exchange::Phase(p) if !p.is_one()));
        if !witnessed {
            unwitnessed.push(word_label(q, s));
        }
    }
    let status = if unwitnessed.is_empty() { Status::Pass } else { Status::Inconclusive };
    let mut detail = format!("{} words, {} without a nontrivial exchange", words.len(), unwitnessed.len());
    if truncated {
        detail.push_str(", word budget reached");
    }
    if let Some(first) = unwitnessed.first() {
        detail.push_str(&format!(", e.g. {first}"));
    }
    report.push(Check::new(
        "shift: every word has a nontrivial exchange",
        "Psi^k(u) u(Q,S) = lambda u(Q,S) Psi^k(u), lambda != 1",
        status,
        unwitnessed.len() as f64,
        detail,
    ));

    Ok(ShiftReport {
        stream,
        words_checked: words.len(),
        unwitnessed,
        report,
    })
}

/// `u_k = X_k · Π_{t ∈ S₁, t ≤ k} Z_{k−t}` on `depth + 1` qubits, `k = 0..=depth`.
pub fn pauli_shift_family(depth: usize) -> Vec<MonomialMatrix> {
    let (x, z, id) = (shift(2), clock(2), MonomialMatrix::identity(2));
    (0..=depth)
        .map(|k| {
            let mut acc: Option<MonomialMatrix> = None;
            for q in 0..=depth {
                let f = if q == k {
                    x.clone()
                } else if q < k && in_s1(k - q) {
                    z.clone()
                } else {
                    id.clone()
                };
                acc = Some(match acc {
                    None => f,
                    Some(a) => a.tensor(&f),
                });
            }
            acc.expect("at least one qubit")
        })
        .collect()
}

/// Exchange stream of the tower's `r_k` against `r_1`, with the offset rule checked on every pair.
pub fn tower_r_stream(tower: &Tower) -> (Vec<usize>, Report) {
    let gamma = tower.dims().gamma;
    let r = |k: usize| tower.generator(Family::R, 0, k).expect("level in range");
    let stream: Vec<usize> = (2..=tower.depth())
        .filter(|&k| r(k).exchange(r(1)) == Exchange::Phase(gamma))
        .map(|k| k - 1)
        .collect();
    let mut report = Report::new();
    let mut bad = Vec::new();
    for l in 2..=tower.depth() {
        for m in 1..l {
            let want = if in_s1(l - m) { gamma } else { Phase::ONE };
            if !r(l).exchange(r(m)).satisfies(want) {
                bad.push(format!("(r_{l}, r_{m})"));
            }
        }
    }
    report.push(Check::exact(
        "shift: r_l r_m = gamma r_m r_l exactly when l-m in S1",
        "r_l r_m = gamma^[l-m in S1] r_m r_l",
        bad.is_empty(),
        if bad.is_empty() { format!("S prefix {stream:?}") } else { bad.join(" ") },
    ));
    (stream, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::AlgebraSpec;
    use crate::tower::build_tower;

    #[test]
    fn pauli_family_stream() {
        let fam = pauli_shift_family(3);
        let rep = check_shift_definition(&fam, Phase::new(1, 2), 3).unwrap();
        assert_eq!(rep.stream, vec![1, 3]);
        assert_eq!(rep.report.count(Status::Fail), 0, "{}", rep.report.to_text());
        // u0·u2 needs the translate u5 as a witness
        assert_eq!(rep.unwitnessed, vec!["u0^1·u2^1".to_string()]);
        let fam = pauli_shift_family(10);
        let rep = check_shift_definition_with(&fam, Phase::new(1, 2), 10, 2, 1 << 12).unwrap();
        assert_eq!(rep.stream, vec![1, 3, 6, 10]);
    }

    #[test]
    fn partial_isometry_rejected() {
        let t = build_tower(&AlgebraSpec::cs1(), 2).unwrap();
        let fam: Vec<_> = (1..=2).map(|k| t.generator(Family::R, 0, k).unwrap().clone()).collect();
        assert!(matches!(check_shift_definition(&fam, Phase::new(1, 2), 1), Err(Error::NonUnitary(_))));
    }

    #[test]
    fn commuting_diagonals_unwitnessed() {
        let z = clock(2);
        let fam = vec![z.tensor(&z), z.tensor(&MonomialMatrix::identity(2)), MonomialMatrix::identity(2).tensor(&z)];
        let rep = check_shift_definition(&fam, Phase::new(1, 2), 2).unwrap();
        assert!(rep.stream.is_empty());
        assert_eq!(rep.unwitnessed.len(), rep.words_checked);
        assert_eq!(rep.report.status(), Status::Inconclusive);
    }

    #[test]
    fn tower_stream_cs1() {
        let t = build_tower(&AlgebraSpec::cs1(), 4).unwrap();
        let (s, rep) = tower_r_stream(&t);
        assert_eq!(s, vec![1, 3]);
        assert!(rep.all_pass());
    }
}

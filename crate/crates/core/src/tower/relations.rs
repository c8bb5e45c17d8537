use std::collections::HashSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_tower, phi_image, GeneratorRef, Tower};
use crate::error::Result;
use crate::linalg::{monomial_span_rank, Exchange, MonomialMatrix, MonomialSum, Phase};
use crate::presentation::{in_s1, in_s2, in_s3};
use crate::report::{Check, Report, Status};
use crate::weyl::Family;
use crate::DEFAULT_TOL;

/// What the relation table asserts for `g·h` versus `h·g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "phase", rename_all = "snake_case")]
pub enum Prediction {
    Commute,
    Phase(Phase),
    NoClaim,
}

impl Prediction {
    fn phase_or_commute(p: Phase) -> Prediction {
        if p.is_one() {
            Prediction::Commute
        } else {
            Prediction::Phase(p)
        }
    }

    /// `None` when nothing is claimed.
    pub fn holds(&self, actual: Exchange) -> Option<bool> {
        match self {
            Prediction::Commute => Some(actual.commutes()),
            Prediction::Phase(p) => Some(actual.satisfies(*p)),
            Prediction::NoClaim => None,
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Commute => write!(f, "commute"),
            Prediction::Phase(p) => write!(f, "{p}"),
            Prediction::NoClaim => write!(f, "no claim"),
        }
    }
}

/// Table entry for the exchange `g·h = φ·h·g` with `level(g) ≥ level(h)`,
/// together with the identity it comes from. With `guarded`, the twisted
/// relations between multiplicity shifts only apply when `l > m²`.
pub fn predict(tower: &Tower, g: &GeneratorRef, h: &GeneratorRef, guarded: bool) -> (Prediction, &'static str) {
    use Family::*;
    let dims = tower.dims();
    let (l, m) = (g.level, h.level);
    debug_assert!(l >= m);
    if l == m {
        return match (g.family, h.family) {
            (R, R) => (Prediction::Commute, "r_l r_l = r_l r_l"),
            (R, _) | (_, R) => (Prediction::NoClaim, "r_l with B_l: no relation stated"),
            _ if g.summand != h.summand => (Prediction::Commute, "distinct blocks are orthogonal"),
            (P, Q) => (Prediction::phase_or_commute(dims.gamma_i[g.summand]), "p_j q_j = γ_j q_j p_j"),
            (Q, P) => (Prediction::phase_or_commute(dims.gamma_i[g.summand].inv()), "p_j q_j = γ_j q_j p_j"),
            (MultP, MultQ) => (Prediction::phase_or_commute(dims.rho_i[g.summand]), "P_j Q_j = ρ_j Q_j P_j"),
            (MultQ, MultP) => (Prediction::phase_or_commute(dims.rho_i[g.summand].inv()), "P_j Q_j = ρ_j Q_j P_j"),
            _ => (Prediction::Commute, "A commutes with A' ∩ B"),
        };
    }
    let t = l - m;
    let guard_ok = !guarded || l > m * m;
    match (g.family, h.family) {
        (R, R) if in_s1(t) => (Prediction::phase_or_commute(dims.gamma), "r_l r_m = γ r_m r_l if l−m ∈ S₁"),
        (R, R) => (Prediction::Commute, "r_l r_m = r_m r_l if l−m ∉ S₁"),
        (R, _) => (Prediction::Commute, "[r_l, B_m] = 0 for m < l"),
        (_, R) => (Prediction::NoClaim, "B_l with r_m: no relation stated"),
        (P | Q, _) => (Prediction::Commute, "A_l commutes with B_m"),
        (MultP, _) => (Prediction::Commute, "[P_l, P_m] = [P_l, Q_m] = 0"),
        (MultQ, P | Q) => (Prediction::Commute, "A' ∩ B commutes with A"),
        (MultQ, MultP) if !guard_ok => (Prediction::NoClaim, "Q_l P_m: guard l > m² not met"),
        (MultQ, MultP) if in_s2(t) && g.summand == h.summand => (
            Prediction::phase_or_commute(dims.rho_i[h.summand].inv()),
            "Q_l P_m = ρ^{−δ} P_m Q_l if l−m ∈ S₂",
        ),
        (MultQ, MultP) => (Prediction::Commute, "Q_l P_m = P_m Q_l if l−m ∉ S₂ or i ≠ j"),
        (MultQ, MultQ) if !guard_ok => (Prediction::NoClaim, "Q_l Q_m: guard l > m² not met"),
        (MultQ, MultQ) if in_s3(t) && g.summand == h.summand => (
            Prediction::phase_or_commute(dims.rho_i[h.summand]),
            "Q_l Q_m = ρ^{δ} Q_m Q_l if l−m ∈ S₃",
        ),
        (MultQ, MultQ) => (Prediction::Commute, "Q_l Q_m = Q_m Q_l if l−m ∉ S₃ or i ≠ j"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub left: String,
    pub right: String,
    pub actual: Exchange,
    pub unguarded: Prediction,
    pub guarded: Prediction,
    pub anchor: String,
    pub unguarded_holds: Option<bool>,
    pub guarded_holds: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RelationAudit {
    pub depth: usize,
    pub pairs: Vec<PairVerdict>,
}

impl RelationAudit {
    pub fn unguarded_failures(&self) -> Vec<&PairVerdict> {
        self.pairs.iter().filter(|p| p.unguarded_holds == Some(false)).collect()
    }

    pub fn guarded_failures(&self) -> Vec<&PairVerdict> {
        self.pairs.iter().filter(|p| p.guarded_holds == Some(false)).collect()
    }

    /// Pairs where the two readings of the table reach different verdicts.
    pub fn discrepancies(&self) -> Vec<&PairVerdict> {
        self.pairs.iter().filter(|p| p.unguarded_holds != p.guarded_holds).collect()
    }

    pub fn find(&self, left: &str, right: &str) -> Option<&PairVerdict> {
        self.pairs.iter().find(|p| p.left == left && p.right == right)
    }

    pub fn to_report(&self, per_pair: bool) -> Report {
        let mut rep = Report::new();
        let describe = |ps: &[&PairVerdict]| {
            ps.iter()
                .take(12)
                .map(|p| format!("{}·{}: {} vs {}", p.left, p.right, p.actual, p.unguarded))
                .collect::<Vec<_>>()
                .join("; ")
        };
        let bad = self.unguarded_failures();
        let claimed = self.pairs.iter().filter(|p| p.unguarded_holds.is_some()).count();
        rep.push(Check::new(
            format!("relation table K={} (unguarded)", self.depth),
            "exchange phases of all generator pairs",
            Status::from_bool(bad.is_empty()),
            bad.len() as f64,
            format!("{} of {claimed} claims fail{}{}", bad.len(), if bad.is_empty() { "" } else { ": " }, describe(&bad)),
        ));
        let gbad = self.guarded_failures();
        let gclaimed = self.pairs.iter().filter(|p| p.guarded_holds.is_some()).count();
        rep.push(Check::new(
            format!("relation table K={} (guarded l > m²)", self.depth),
            "exchange phases with the l > m² guard",
            Status::from_bool(gbad.is_empty()),
            gbad.len() as f64,
            format!("{} of {gclaimed} claims fail{}{}", gbad.len(), if gbad.is_empty() { "" } else { ": " }, describe(&gbad)),
        ));
        let disc = self.discrepancies();
        let listing = disc
            .iter()
            .map(|p| {
                let v = |x: Option<bool>| match x {
                    Some(true) => "holds",
                    Some(false) => "fails",
                    None => "no claim",
                };
                format!("{}·{} unguarded {} / guarded {}", p.left, p.right, v(p.unguarded_holds), v(p.guarded_holds))
            })
            .collect::<Vec<_>>()
            .join("; ");
        rep.push(Check::new(
            format!("guard discrepancies K={}", self.depth),
            "guarded vs unguarded reading",
            if disc.is_empty() { Status::Pass } else { Status::Inconclusive },
            disc.len() as f64,
            if disc.is_empty() { "none".to_string() } else { listing },
        ));
        if per_pair {
            for p in &self.pairs {
                let status = match p.unguarded_holds {
                    Some(ok) => Status::from_bool(ok),
                    None => Status::Inconclusive,
                };
                rep.push(Check::new(
                    format!("{}·{}", p.left, p.right),
                    p.anchor.clone(),
                    status,
                    if status == Status::Fail { 1.0 } else { 0.0 },
                    format!("actual {}, table {}, guarded {}", p.actual, p.unguarded, p.guarded),
                ));
            }
        }
        rep
    }
}

/// Exchange of every unordered generator pair, with both table readings.
pub fn audit_relations(tower: &Tower) -> RelationAudit {
    let refs = tower.generator_refs();
    let mut pairs_idx = Vec::new();
    for (a, g) in refs.iter().enumerate() {
        for (b, h) in refs.iter().enumerate() {
            if g.level > h.level || (g.level == h.level && a > b) {
                pairs_idx.push((*g, *h));
            }
        }
    }
    let pairs = pairs_idx
        .par_iter()
        .map(|(g, h)| {
            let gm = tower.resolve(g).expect("generator in range");
            let hm = tower.resolve(h).expect("generator in range");
            let actual = gm.exchange(&hm);
            let (unguarded, anchor) = predict(tower, g, h, false);
            let (guarded, _) = predict(tower, g, h, true);
            PairVerdict {
                left: g.to_string(),
                right: h.to_string(),
                actual,
                unguarded,
                guarded,
                anchor: anchor.to_string(),
                unguarded_holds: unguarded.holds(actual),
                guarded_holds: guarded.holds(actual),
            }
        })
        .collect();
    RelationAudit {
        depth: tower.depth(),
        pairs,
    }
}

/// Relation audit plus the base identities of every level copy.
pub fn check_relations(tower: &Tower) -> Report {
    audit_relations(tower).to_report(true)
}

fn a_copy_basis(tower: &Tower, level: usize) -> Result<Vec<MonomialMatrix>> {
    let mut out = Vec::new();
    for j in 0..tower.n() {
        let a = tower.dims().sizes[j] as u64;
        let p = tower.generator(Family::P, j, level)?;
        let q = tower.generator(Family::Q, j, level)?;
        let block = p.pow(a);
        for al in 0..a {
            for be in 0..a {
                out.push(block.mul(&p.pow(al)).mul(&q.pow(be)));
            }
        }
    }
    Ok(out)
}

/// The copies `A_1, …, A_k` commute, have the right dimension and generate `⊗^k A`.
pub fn check_tensor_copies(tower: &Tower, k: usize) -> Result<Report> {
    let mut rep = Report::new();
    if k == 0 || k >= tower.depth() {
        return Err(crate::Error::LevelOverflow {
            level: k,
            depth: tower.depth(),
        });
    }
    let dim_a = tower.dims().dim_a();
    let bases = (1..=k).map(|m| a_copy_basis(tower, m)).collect::<Result<Vec<_>>>()?;
    for (m, b) in bases.iter().enumerate() {
        let rank = monomial_span_rank(b, DEFAULT_TOL)?;
        rep.push(Check::exact(
            format!("dim A_{}", m + 1),
            "dim A = Σ a_j²",
            rank == dim_a,
            format!("rank {rank}, expected {dim_a}"),
        ));
    }
    let mut commute = true;
    let mut bad = Vec::new();
    for m in 1..=k {
        for m2 in m + 1..=k {
            for j in 0..tower.n() {
                for i in 0..tower.n() {
                    for f in [Family::P, Family::Q] {
                        for f2 in [Family::P, Family::Q] {
                            let x = tower.generator(f, j, m)?;
                            let y = tower.generator(f2, i, m2)?;
                            if !x.exchange(y).commutes() {
                                commute = false;
                                bad.push(format!("{}{}_{m}·{}{}_{m2}", f.label(), j + 1, f2.label(), i + 1));
                            }
                        }
                    }
                }
            }
        }
    }
    rep.push(Check::exact("A copies commute", "[A_1, Φ^i(A_1)] = 0", commute, bad.join(", ")));
    let mut joint = vec![MonomialMatrix::identity(tower.ambient_dim())];
    for b in &bases {
        joint = joint.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect();
    }
    let joint_rank = monomial_span_rank(&joint, DEFAULT_TOL)?;
    let expected = dim_a.pow(k as u32);
    rep.push(Check::exact(
        format!("dim A_1 ⋯ A_{k}"),
        "⊗^k A embeds",
        joint_rank == expected,
        format!("rank {joint_rank}, expected {expected}"),
    ));
    let mut worst = 0usize;
    for m in 0..k {
        for m2 in m + 1..k {
            let mut both = bases[m].clone();
            both.extend(bases[m2].iter().cloned());
            let sum = monomial_span_rank(&both, DEFAULT_TOL)?;
            let inter = 2 * dim_a - sum;
            worst = worst.max(inter.abs_diff(1));
            rep.push(Check::within(
                format!("dim A_{} ∩ A_{}", m + 1, m2 + 1),
                "A_m ∩ A_l = ℂ",
                inter.abs_diff(1) as f64,
                0.0,
                format!("intersection dimension {inter}"),
            ));
        }
    }
    Ok(rep)
}

/// `true` when `m = x ⊗ 1_block` for some `x`.
pub(crate) fn acts_trivially_right(m: &MonomialMatrix, block: usize) -> bool {
    if block == 1 {
        return true;
    }
    let (rows, phases) = m.raw_parts();
    for hi in 0..m.dim() / block {
        let c0 = hi * block;
        for lo in 0..block {
            let c = c0 + lo;
            match (rows[c0], rows[c]) {
                (None, None) => {}
                (Some(r0), Some(r)) => {
                    let r0 = r0 as usize;
                    if !r0.is_multiple_of(block) || r as usize != r0 + lo || phases[c] != phases[c0] {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

fn dedupe_up_to_phase(words: Vec<MonomialMatrix>) -> Vec<MonomialMatrix> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for w in words {
        let s = MonomialSum::from_monomial(w);
        let Some((_, norm)) = s.terms().first() else { continue };
        let mut norm = norm.clone();
        norm.reduce_modulus();
        if seen.insert(norm.clone()) {
            out.push(norm);
        }
    }
    out
}

/// Exchange factorizations `g_j h_i = m g_j` with `m ∈ M_i`, and the span of ordered words.
pub fn check_word_span(tower: &Tower, k: usize) -> Result<Report> {
    let mut rep = Report::new();
    let d = tower.d();
    let big = tower.ambient_dim();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for j in 2..=k.min(tower.depth()) {
        for g in tower.level_refs(j) {
            let slots = tower.slot_factors(&g);
            let mut tail = MonomialMatrix::identity(1);
            for f in &slots[..j - 1] {
                tail = tail.tensor(f);
            }
            let tail = tail.tensor_identity_right(big / d.pow((j - 1) as u32));
            let tail_adj = tail.adjoint();
            let gm = tower.resolve(&g)?;
            for i in 1..j {
                for h in tower.level_refs(i) {
                    let hm = tower.resolve(&h)?;
                    let m = tail.mul(&hm).mul(&tail_adj);
                    let ok = gm.mul(&hm) == m.mul(&gm) && acts_trivially_right(&m, big / d.pow(i as u32));
                    checked += 1;
                    if !ok {
                        failures.push(format!("{g}·{h}"));
                    }
                }
            }
        }
    }
    rep.push(Check::exact(
        format!("exchange factorization k={k}"),
        "B_j · B_i ⊂ M_i · B_j and B_j · r_i ⊂ M_i · B_j",
        failures.is_empty(),
        format!("{checked} pairs, {} failures {}", failures.len(), failures.join(", ")),
    ));
    if k >= 2 && tower.depth() >= 2 {
        let q2 = tower.resolve(&GeneratorRef::new(Family::MultQ, 0, 2))?;
        let p1 = tower.resolve(&GeneratorRef::new(Family::MultP, 0, 1))?;
        let rho = tower.dims().rho_i[0];
        let ok = q2.mul(&p1) == p1.scale(rho.inv()).mul(&q2);
        rep.push(Check::exact("(Q1)_2 (P1)_1", "Ad(Q + 1 − 1_j)(P) = ρ^{−1} P", ok, ""));
    }
    let words_tower = build_tower(tower.spec(), k)?;
    let mut words = vec![MonomialMatrix::identity(words_tower.ambient_dim())];
    for level in 1..=k {
        let lw = dedupe_up_to_phase(words_tower.level_words(level)?);
        words = dedupe_up_to_phase(words.iter().flat_map(|x| lw.iter().map(move |y| x.mul(y))).collect());
    }
    let rank = monomial_span_rank(&words, DEFAULT_TOL)?;
    let expected = d.pow(2 * k as u32);
    rep.push(Check::new(
        format!("span of words k={k}"),
        "M_k = span x_1 x_2 ⋯ x_k",
        Status::from_bool(rank == expected),
        expected.abs_diff(rank) as f64,
        format!("rank {rank} of {} words, d^(2k) = {expected}", words.len()),
    ));
    Ok(rep)
}

/// Exchange of every pair `(g, h)` below the top level equals that of `(Φg, Φh)`.
pub fn check_covariance(tower: &Tower) -> Report {
    let refs: Vec<GeneratorRef> = tower.generator_refs().into_iter().filter(|g| g.level < tower.depth()).collect();
    let mut pairs = Vec::new();
    for g in &refs {
        for h in &refs {
            if g.level > h.level || (g.level == h.level && g > h) {
                pairs.push((*g, *h));
            }
        }
    }
    let bad: Vec<String> = pairs
        .par_iter()
        .filter_map(|(g, h)| {
            let e0 = tower.resolve(g).ok()?.exchange(&tower.resolve(h).ok()?);
            let (g1, h1) = (phi_image(g, tower.depth()).ok()?, phi_image(h, tower.depth()).ok()?);
            let e1 = tower.resolve(&g1).ok()?.exchange(&tower.resolve(&h1).ok()?);
            (e0 != e1).then(|| format!("{g}·{h}: {e0} but {g1}·{h1}: {e1}"))
        })
        .collect();
    let mut rep = Report::new();
    rep.push(Check::new(
        format!("Φ covariance K={}", tower.depth()),
        "Φ preserves exchange phases",
        Status::from_bool(bad.is_empty()),
        bad.len() as f64,
        format!("{} pairs, {} mismatches {}", pairs.len(), bad.len(), bad.iter().take(12).cloned().collect::<Vec<_>>().join("; ")),
    ));
    rep
}

/// `τ(Φ(x)) = τ(x)` on random words from levels below the top.
pub fn check_phi_trace(tower: &Tower, samples: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_word = String::new();
    let top = tower.depth().saturating_sub(1).max(1);
    if tower.depth() < 2 {
        let mut rep = Report::new();
        rep.push(Check::new("τ∘Φ = τ", "τ ∘ Φ = τ", Status::Inconclusive, f64::NAN, "depth 1 tower has no room for Φ"));
        return Ok(rep);
    }
    for _ in 0..samples {
        let len = rand::Rng::gen_range(&mut rng, 1..=6);
        let word = tower.sample_word(&mut rng, len, top);
        let x = tower.product(&word)?;
        let y = super::phi_apply(&word, tower)?;
        let diff = (x.normalized_trace() - y.normalized_trace()).norm();
        if diff > worst {
            worst = diff;
            worst_word = word.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ");
        }
    }
    let mut rep = Report::new();
    rep.push(Check::within(
        format!("τ∘Φ = τ K={}", tower.depth()),
        "τ ∘ Φ = τ",
        worst,
        1e-10,
        format!("{samples} words, seed {seed:#x}{}", if worst_word.is_empty() { String::new() } else { format!(", worst {worst_word}") }),
    ));
    Ok(rep)
}

/// `dim span M_{k+1} / dim span Φ(M_k) = d²` for `k = 1..=k_max`.
pub fn check_index_ratio(tower: &Tower, k_max: usize) -> Result<Report> {
    let mut rep = Report::new();
    let d = tower.d();
    for k in 1..=k_max {
        let t = build_tower(tower.spec(), k + 1)?;
        let levels: Vec<Vec<MonomialMatrix>> = (1..=k + 1)
            .map(|l| t.level_words(l).map(dedupe_up_to_phase))
            .collect::<Result<_>>()?;
        let product = |range: std::ops::RangeInclusive<usize>| {
            let mut acc = vec![MonomialMatrix::identity(t.ambient_dim())];
            for l in range {
                acc = dedupe_up_to_phase(acc.iter().flat_map(|x| levels[l - 1].iter().map(move |y| x.mul(y))).collect());
            }
            acc
        };
        let full = monomial_span_rank(&product(1..=k + 1), DEFAULT_TOL)?;
        let image = monomial_span_rank(&product(2..=k + 1), DEFAULT_TOL)?;
        let ok = image > 0 && full == image * d * d;
        rep.push(Check::exact(
            format!("index ratio k={k}"),
            "[R : Φ(R)] = d²",
            ok,
            format!("dim M_{} = {full}, dim Φ(M_{k}) = {image}, ratio {}", k + 1, if image > 0 { full as f64 / image as f64 } else { f64::NAN }),
        ));
    }
    Ok(rep)
}

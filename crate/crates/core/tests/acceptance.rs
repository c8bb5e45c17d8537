//! One line per acceptance criterion. Run with `--nocapture` to see the table.
//!
//! Criteria listed in `RECORDED_RED` are known not to hold for the construction as
//! implemented; they are evaluated in full, printed as FAIL, and the test asserts that
//! they still fail in the recorded way so that any change in behaviour is noticed.

mod common;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sflab_core::commutant::{
    algebra_closure, averaging_pipeline, check_r_step, check_slot_averaging, commutant, commutant_of, tensor_a_basis,
    truncated_relative_commutant,
};
use sflab_core::linalg::{clock, shift, DenseMatrix, MonomialMatrix};
use sflab_core::presentation::{validate_spec, AlgebraSpec};
use sflab_core::report::Report;
use sflab_core::tl::{kappa_compute, kappa_compute_with, q14_element, tl_m4_model, tl_report, TLParams};
use sflab_core::tower::{
    audit_relations, build_tower, build_tower_with_capacity, check_covariance, check_index_ratio, check_phi_trace,
    check_tensor_copies, check_word_span, DEFAULT_CAPACITY,
};
use sflab_core::weyl::{build_base, check_base_relations, spanning_rank};
use sflab_core::Error;

const SEED: u64 = 0x5EED;
const RECORDED_RED: [u32; 2] = [4, 7];

struct Outcome {
    id: u32,
    pass: bool,
    elapsed: Duration,
    budget: Duration,
    detail: String,
}

fn run(id: u32, budget: Duration, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    Outcome {
        id,
        pass: ok && elapsed <= budget,
        elapsed,
        budget,
        detail,
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn failing(rep: &Report) -> String {
    rep.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect::<Vec<_>>().join("; ")
}

fn spec_arithmetic() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (spec, d, mult) in [(AlgebraSpec::cs1(), 4, vec![2, 2]), (AlgebraSpec::cs2(), 8, vec![2, 4])] {
        let dims = validate_spec(&spec).expect("valid");
        let sum: usize = dims.sizes.iter().zip(&dims.mult).map(|(a, m)| a * m).sum();
        ok &= dims.d == d && dims.mult == mult && sum == d;
        parts.push(format!("d={} mult={:?}", dims.d, dims.mult));
    }
    (ok, parts.join(", "))
}

fn base_identities() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    let mut ds = Vec::new();
    for _ in 0..10 {
        let spec = common::random_spec(&mut rng, 64);
        let dims = validate_spec(&spec).expect("sampler yields valid specs");
        ds.push(dims.d);
        let rep = check_base_relations(&build_base(&dims));
        if !rep.all_pass() {
            bad.push(format!("{spec:?}: {}", failing(&rep)));
        }
    }
    (bad.is_empty(), format!("d = {ds:?} {}", bad.join("; ")))
}

fn corner_span() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (spec, want) in [(AlgebraSpec::cs1(), 16), (AlgebraSpec::cs2(), 64)] {
        let rank = spanning_rank(&build_base(&validate_spec(&spec).expect("valid"))).expect("within budget");
        ok &= rank == want;
        parts.push(format!("rank {rank}/{want}"));
    }
    (ok, parts.join(", "))
}

fn relation_audit() -> (bool, String) {
    let tower = build_tower(&AlgebraSpec::cs1(), 4).expect("capacity");
    let audit = audit_relations(&tower);
    let fails = audit.unguarded_failures();
    let names: Vec<String> = fails.iter().map(|p| format!("{}·{}", p.left, p.right)).collect();
    (
        fails.is_empty(),
        format!(
            "{} pairs, {} mismatches {:?}, {} guarded-variant discrepancies, {} guarded mismatches",
            audit.pairs.len(),
            fails.len(),
            names,
            audit.discrepancies().len(),
            audit.guarded_failures().len()
        ),
    )
}

fn tensor_copies() -> (bool, String) {
    let tower = build_tower(&AlgebraSpec::cs1(), 4).expect("capacity");
    let rep = check_tensor_copies(&tower, 3).expect("levels in range");
    let joint = rep.find("dim A_1 ⋯ A_3").map(|c| c.detail.clone()).unwrap_or_default();
    (rep.all_pass(), format!("{joint} {}", failing(&rep)))
}

fn word_span() -> (bool, String) {
    let tower = build_tower(&AlgebraSpec::cs1(), 3).expect("capacity");
    let rep = check_word_span(&tower, 2).expect("levels in range");
    let span = rep.find("span of words k=2").map(|c| c.detail.clone()).unwrap_or_default();
    (rep.all_pass(), format!("{span} {}", failing(&rep)))
}

fn phi_consistency() -> (bool, String) {
    let t4 = build_tower(&AlgebraSpec::cs1(), 4).expect("capacity");
    let t3 = build_tower(&AlgebraSpec::cs1(), 3).expect("capacity");
    let cov4 = check_covariance(&t4);
    let cov3 = check_covariance(&t3);
    let trace = check_phi_trace(&t4, 1000, SEED).expect("sampling");
    let ratio = check_index_ratio(&t4, 2).expect("spans");
    let ok = cov4.all_pass() && trace.all_pass() && ratio.all_pass();
    let detail = format!(
        "covariance K=4: {}; K=3: {}; trace: {}; index ratio: {}",
        cov4.checks[0].detail,
        cov3.checks[0].status.as_str(),
        trace.status().as_str(),
        ratio.checks.iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join(", ")
    );
    (ok, detail)
}

fn slot_averaging() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in [AlgebraSpec::cs1(), AlgebraSpec::cs2()] {
        let rep = check_slot_averaging(&build_base(&validate_spec(&spec).expect("valid")), 1e-9).expect("orders");
        ok &= rep.all_pass();
        parts.push(rep.checks.iter().map(|c| format!("{:.1e}", c.residual)).collect::<Vec<_>>().join("/"));
    }
    (ok, format!("residuals {}", parts.join(", ")))
}

fn pipeline() -> (bool, String) {
    let tower = build_tower(&AlgebraSpec::cs1(), 4).expect("capacity");
    let r_step = check_r_step(&tower, 1, 200, SEED).expect("levels");
    let mut ok = r_step.all_pass();
    let mut moved = 0.0f64;
    for b in tensor_a_basis(&tower, 1) {
        let x = b.to_dense();
        let out = averaging_pipeline(&tower, 1, &x, 4, 1e-9).expect("budget suffices");
        ok &= out.report.all_pass();
        moved = moved.max(out.element.sub(&x).max_abs());
    }
    ok &= moved < 1e-9;
    let detail = r_step.checks.iter().map(|c| c.detail.clone()).collect::<Vec<_>>().join("; ");
    (ok, format!("{detail}; A-span inputs moved by {moved:.1e}"))
}

const LAMBDAS: [&str; 4] = ["1/5", "1/6", "2/9", "3/13"];

fn tl_m3() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for lam in LAMBDAS {
        let params: TLParams = lam.parse().expect("valid lambda");
        let (rep, _) = tl_report(params, 3, 16, SEED).expect("m = 3");
        ok &= rep.all_pass();
        let tau = rep.find("tl: tau(e3) = lambda").map(|c| c.detail.clone()).unwrap_or_default();
        parts.push(format!("{lam}: tau(e3)={tau}"));
    }
    (ok, parts.join(", "))
}

fn tl_m4() -> (bool, String) {
    let mut ok = true;
    for lam in LAMBDAS {
        let params: TLParams = lam.parse().expect("valid lambda");
        ok &= tl_m4_model(params).relation_report(1e-12).all_pass();
    }
    let params: TLParams = "1/5".parse().expect("valid lambda");
    let (rep, kappa) = tl_report(params, 4, 16, SEED).expect("m = 4");
    ok &= rep.all_pass();
    let Ok(k) = kappa_compute(params, 1e-9) else {
        return (false, "structure mismatch at 1/5".into());
    };
    ok &= kappa.is_some() && (k.alpha - 2.0 / 25.0).abs() < 1e-9 && k.kappa < 0.16;
    let mut scaled = q14_element(params).expect("blocks");
    scaled.x1.iter_mut().for_each(|z| *z *= 2.0);
    let negative = matches!(kappa_compute_with(params, &scaled, 1e-9), Err(Error::StructureMismatch { .. }));
    ok &= negative;
    (ok, format!("kappa(1/5) = {:.12}, alpha = {:.12}, mismatch control {}", k.kappa, k.alpha, negative))
}

fn commutant_oracles() -> (bool, String) {
    let id = MonomialMatrix::identity(2);
    let left = [clock(2).tensor(&id).to_dense(), shift(2).tensor(&id).to_dense()];
    let right = [id.tensor(&clock(2)).to_dense(), id.tensor(&shift(2)).to_dense()];
    let c = commutant(&algebra_closure(&left, 1e-9).expect("small"), 1e-9).expect("small");
    let target = algebra_closure(&right, 1e-9).expect("small");
    let mut ok = c.dim() == 4 && c.same_span(&target, 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut fixed = 0;
    for _ in 0..20 {
        let gens = common::random_block_generators(&mut rng);
        let alg = algebra_closure(&gens, 1e-9).expect("small");
        let once = commutant(&alg, 1e-9).expect("small");
        let twice = commutant(&once, 1e-9).expect("small");
        if twice.same_span(&alg, 1e-9) {
            fixed += 1;
        }
    }
    ok &= fixed == 20;
    (ok, format!("dim commutant(M2 x 1) = {}, double commutant fixed on {fixed}/20", c.dim()))
}

fn declared_substitutes(prior: &[Outcome]) -> (bool, String) {
    let ok = prior.iter().filter(|o| [5, 8, 9].contains(&o.id)).all(|o| o.pass);
    let dims = truncated_relative_commutant(&AlgebraSpec::cs1(), 1, &[2, 3, 4], DEFAULT_CAPACITY).expect("capacity");
    let seq: Vec<usize> = dims.iter().map(|(_, d, _)| *d).collect();
    let monotone = seq.windows(2).all(|w| w[1] <= w[0]);
    let contained = dims.iter().all(|(_, _, c)| *c);
    (
        ok,
        format!("substitutes 5/8/9 pass: {ok}; relative commutant dims K=2,3,4: {seq:?}, non-increasing {monotone}, contains A {contained} (reported)"),
    )
}

fn performance() -> (bool, String) {
    let start = Instant::now();
    let tower = build_tower(&AlgebraSpec::cs1(), 7).expect("16384 within capacity");
    let audit = audit_relations(&tower);
    let t = start.elapsed();
    let refuse_tower = matches!(
        build_tower_with_capacity(&AlgebraSpec::cs1(), 9, DEFAULT_CAPACITY),
        Err(Error::CapacityExceeded { .. })
    );
    let refuse_dense = matches!(
        commutant_of(&[DenseMatrix::identity(64)], 64, 1e-9),
        Err(Error::CapacityExceeded { .. })
    );
    let ok = t < secs(60) && refuse_tower && refuse_dense;
    (
        ok,
        format!("K=7 audit of {} pairs in {:.2}s; capacity refusals {refuse_tower}/{refuse_dense}", audit.pairs.len(), t.as_secs_f64()),
    )
}

#[test]
fn acceptance() {
    let mut out = vec![
        run(1, Duration::from_millis(1), spec_arithmetic),
        run(2, secs(1), base_identities),
        run(3, secs(5), corner_span),
        run(4, secs(10), relation_audit),
        run(5, secs(10), tensor_copies),
        run(6, secs(30), word_span),
        run(7, secs(30), phi_consistency),
        run(8, secs(5), slot_averaging),
        run(9, secs(30), pipeline),
        run(10, secs(1), tl_m3),
        run(11, secs(5), tl_m4),
        run(12, secs(10), commutant_oracles),
    ];
    let sub = run(13, secs(60), || declared_substitutes(&out));
    out.push(sub);
    out.push(run(14, secs(60), performance));

    for o in &out {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if RECORDED_RED.contains(&o.id) && !o.pass { " [recorded finding]" } else { "" };
        println!(
            "criterion {:>2}: {verdict}{note} ({:.3}s of {:.3}s) {}",
            o.id,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs_f64(),
            o.detail
        );
    }
    let unexpected: Vec<u32> = out.iter().filter(|o| o.pass == RECORDED_RED.contains(&o.id)).map(|o| o.id).collect();
    assert!(unexpected.is_empty(), "criteria deviating from the recorded outcome: {unexpected:?}");
}

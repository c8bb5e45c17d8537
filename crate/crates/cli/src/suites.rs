use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sflab_core::commutant::{averaging_pipeline, check_r_step, check_slot_averaging, tensor_a_basis};
use sflab_core::linalg::Phase;
use sflab_core::presentation::in_s1;
use sflab_core::report::{Check, Report, Status};
use sflab_core::tl::trace_collapse_check;
use sflab_core::tower::{
    check_covariance, check_index_ratio, check_phi_trace, check_relations, check_shift_definition, check_tensor_copies,
    check_word_span, pauli_shift_family, tower_r_stream, Tower,
};
use sflab_core::weyl::check_base_relations;
use sflab_core::{Error, Result};

use crate::args::Suite;
use crate::exit::{code_for, CAPACITY};

const TOL: f64 = 1e-9;

pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub capacity: u128,
}

#[derive(Default)]
pub struct SuiteOutcome {
    pub report: Report,
    pub capacity_hit: bool,
}

impl SuiteOutcome {
    fn absorb(&mut self, what: &str, result: Result<Report>) {
        match result {
            Ok(r) => self.report.extend(r),
            Err(e) => {
                let capacity = code_for(&e) == CAPACITY;
                self.capacity_hit |= capacity;
                let status = match e {
                    Error::LevelOverflow { .. } | Error::DepthBudget { .. } => Status::Inconclusive,
                    _ if capacity => Status::Inconclusive,
                    _ => Status::Fail,
                };
                self.report.push(Check::new(what, "not evaluated", status, f64::NAN, e.to_string()));
            }
        }
    }

    fn prefixed(mut self, suite: Suite) -> Self {
        let tag = format!("{}: ", suite.name());
        for c in &mut self.report.checks {
            if !c.name.starts_with(&tag) {
                c.name = format!("{tag}{}", c.name);
            }
        }
        self
    }
}

pub fn run(suite: Suite, tower: &Tower, s: &Settings) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    let depth = tower.depth();
    match suite {
        Suite::Relations => {
            out.report.extend(check_relations(tower));
            out.report.extend(check_covariance(tower));
            out.absorb("phi preserves the trace", check_phi_trace(tower, s.samples, s.seed));
            out.absorb("index ratio", index_ratio(tower, s.capacity));
        }
        Suite::Lemma1 => out.absorb("tensor copies of A", check_tensor_copies(tower, depth.saturating_sub(1))),
        Suite::Lemma2 => out.report.extend(check_base_relations(tower.base())),
        Suite::Lemma3 => {
            let k = (1..=depth).take_while(|&k| dense_fits(tower.d(), 2 * k, s.capacity)).last();
            match k {
                Some(k) => out.absorb("span of words", check_word_span(tower, k)),
                None => out.absorb("span of words", Err(capacity_error(tower.d(), s.capacity))),
            }
        }
        Suite::Shift => shift(tower, &mut out),
        Suite::Lemma5 => averaging(tower, s, &mut out),
        Suite::Collapse => {
            let k = 2.min(depth.saturating_sub(1));
            out.absorb("trace collapse", trace_collapse_check(tower, k, s.samples, s.seed));
        }
        Suite::All => {
            for one in Suite::EACH {
                let r = run(one, tower, s);
                out.report.extend(r.report);
                out.capacity_hit |= r.capacity_hit;
            }
            return out;
        }
    }
    out.prefixed(suite)
}

fn dense_fits(d: usize, power: usize, capacity: u128) -> bool {
    (d as u128).checked_pow(power as u32).is_some_and(|n| n <= capacity)
}

fn capacity_error(d: usize, capacity: u128) -> Error {
    Error::CapacityExceeded {
        what: "dense Gram size d^2".into(),
        needed: (d as u128) * (d as u128),
        limit: capacity,
    }
}

fn index_ratio(tower: &Tower, capacity: u128) -> Result<Report> {
    // the level-(k+1) word span lives in M_{d^(k+1)}
    let k_max = (1..tower.depth()).take_while(|&k| dense_fits(tower.d(), 2 * (k + 1), capacity)).last();
    match k_max {
        Some(k) => check_index_ratio(tower, k.min(2)),
        None if tower.depth() < 2 => Err(Error::LevelOverflow { level: 2, depth: tower.depth() }),
        None => Err(capacity_error(tower.d(), capacity)),
    }
}

fn shift(tower: &Tower, out: &mut SuiteOutcome) {
    let (stream, report) = tower_r_stream(tower);
    out.report.extend(report);
    out.report.push(Check::exact(
        "tower offsets with r_k r_1 = gamma r_1 r_k",
        "offsets lie in S1",
        stream.iter().all(|&t| in_s1(t)),
        format!("{stream:?}"),
    ));
    let depth = tower.depth();
    match check_shift_definition(&pauli_shift_family(depth), Phase::new(1, 2), depth) {
        Ok(sr) => {
            let expected: Vec<usize> = (1..=depth).filter(|&t| in_s1(t)).collect();
            for mut c in sr.report.checks {
                c.name = format!("reference family: {}", c.name.trim_start_matches("shift: "));
                out.report.push(c);
            }
            out.report.push(Check::exact(
                "reference family: S prefix",
                "S(Psi; u) = S1 up to the depth",
                sr.stream == expected,
                format!("S prefix {:?}", sr.stream),
            ));
        }
        Err(e) => out.absorb("reference family", Err(e)),
    }
}

fn averaging(tower: &Tower, s: &Settings, out: &mut SuiteOutcome) {
    out.absorb("slot averaging", check_slot_averaging(tower.base(), TOL));
    out.absorb("r-step", check_r_step(tower, 1, s.samples, s.seed));
    if !dense_fits(tower.ambient_dim(), 2, s.capacity) {
        out.absorb("averaging pipeline", Err(capacity_error(tower.ambient_dim(), s.capacity)));
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut inputs: Vec<(String, _)> = tensor_a_basis(tower, 1)
        .into_iter()
        .enumerate()
        .map(|(i, b)| (format!("A basis {i}"), b.to_dense()))
        .collect();
    let a_count = inputs.len();
    for i in 0..s.samples.min(8) {
        let word = tower.sample_word(&mut rng, 3, 1);
        match tower.product(&word) {
            Ok(m) => inputs.push((format!("level-1 word {i}"), m.to_dense())),
            Err(e) => out.absorb("averaging pipeline", Err(e)),
        }
    }
    let mut moved: f64 = 0.0;
    let mut worst_distance: f64 = 0.0;
    let (mut ran, mut ran_a) = (0usize, 0usize);
    for (idx, (label, x)) in inputs.iter().enumerate() {
        match averaging_pipeline(tower, 1, x, tower.depth(), TOL) {
            Ok(o) => {
                ran += 1;
                worst_distance = worst_distance.max(o.distance);
                if idx < a_count {
                    ran_a += 1;
                    moved = moved.max(o.element.sub(x).max_abs());
                }
                for c in o.report.failures() {
                    out.report.push(Check::new(format!("pipeline on {label}: {}", c.name), c.anchor.clone(), c.status, c.residual, c.detail.clone()));
                }
            }
            Err(e) => out.absorb(&format!("pipeline on {label}"), Err(e)),
        }
    }
    if ran_a > 0 {
        out.report.push(Check::within(
            "pipeline fixes the A span",
            "E(x) = x for x in A",
            moved,
            TOL,
            format!("{ran_a} basis elements"),
        ));
    }
    if ran > 0 {
        out.report.push(Check::within(
            "pipeline output lies in A",
            "averaged words land in the tensor copy of A",
            worst_distance,
            TOL,
            format!("{ran} of {} inputs", inputs.len()),
        ));
    }
}

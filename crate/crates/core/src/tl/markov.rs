use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BlockModel;
use crate::linalg::DenseMatrix;
use crate::report::{Check, Report};

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovWeights {
    pub weights: Vec<f64>,
    /// Rank of the defining linear system; 3 means the solution is unique.
    pub rank: usize,
}

/// Solves `t₁ = t₂`, `(1 − 2λ) t₁ = λ t₃`, `t₁ + t₂ + t₃ = 1`.
pub fn markov_weights_m3(lambda: f64) -> MarkovWeights {
    let sys = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, 1.0 - 2.0 * lambda, 0.0, -lambda, 1.0, 1.0, 1.0]);
    let rhs = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
    let sv = sys.clone().singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|&&s| s > top * 1e-12).count();
    let weights = sys.lu().solve(&rhs).map(|v| v.iter().copied().collect()).unwrap_or_default();
    MarkovWeights { weights, rank }
}

fn random_c<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random combination of the identity and words of length ≤ 3 in `gens`.
fn random_in_algebra<R: Rng>(rng: &mut R, n: usize, gens: &[&DenseMatrix]) -> DenseMatrix {
    let mut out = DenseMatrix::identity(n).scale(random_c(rng));
    for _ in 0..4 {
        let len = rng.gen_range(1..=3);
        let mut w = DenseMatrix::identity(n);
        for _ in 0..len {
            w = w.mul(gens[rng.gen_range(0..gens.len())]);
        }
        out.axpy(random_c(rng), &w);
    }
    out
}

/// Scalar diagonal plus random entries at the model's off-diagonal block positions.
fn random_q_form<R: Rng>(rng: &mut R, model: &BlockModel) -> DenseMatrix {
    let mut x = DenseMatrix::identity(model.coords()).scale(random_c(rng));
    for group in &model.q_form {
        let z = random_c(rng);
        for &(i, j) in group {
            x.set(i, j, z);
        }
    }
    x
}

/// `τ(e_i x) = λ τ(x)` for `x = 1`, for `x` in the algebra of the projections on either
/// side of `e_i`, and for block-form elements; on the three-coordinate model also the
/// corner identities `τ(x₁) = τ(x₂)`, `(1 − 2λ) τ(x₁) = λ τ(x₃)`, `τ(x₁) = λ τ(x)`.
pub fn markov_property_check(model: &BlockModel, samples: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new();
    let l = model.lambda;
    let n = model.coords();
    let tol = 1e-9;
    let defect = |e: &DenseMatrix, x: &DenseMatrix| (model.trace(&e.mul(x)) - model.trace(x) * l).norm();

    let total: f64 = model.weights.iter().sum();
    report.push(Check::within("tl: weights are normalized", "tau(1) = 1", (total - 1.0).abs(), tol, ""));

    for i in model.indices() {
        let e = model.e(i).expect("in range");
        let one = DenseMatrix::identity(n);
        report.push(Check::within(
            format!("tl: Markov at x = 1 for e{i}"),
            "tau(e_i) = lambda",
            defect(e, &one),
            tol,
            "",
        ));
        for (side, range) in [("below", model.first_index..i), ("above", i + 1..model.indices().end)] {
            let gens: Vec<&DenseMatrix> = range.clone().filter_map(|j| model.e(j)).collect();
            if gens.is_empty() {
                continue;
            }
            let worst = (0..samples)
                .map(|_| defect(e, &random_in_algebra(&mut rng, n, &gens)))
                .fold(0.0, f64::max);
            report.push(Check::within(
                format!("tl: Markov for e{i} against the projections {side}"),
                "tau(e_i x) = lambda tau(x)",
                worst,
                tol,
                format!("{samples} samples from alg{{e{}..e{}}}", range.start, range.end - 1),
            ));
        }
        let worst = (0..samples).map(|_| defect(e, &random_q_form(&mut rng, model))).fold(0.0, f64::max);
        report.push(Check::within(
            format!("tl: Markov for e{i} on block-form elements"),
            "tau(e_i x) = lambda tau(x)",
            worst,
            tol,
            format!("{samples} samples"),
        ));
    }

    if n == 3 {
        let mut worst: f64 = 0.0;
        for _ in 0..samples.max(1) {
            let x = random_q_form(&mut rng, model);
            let corner = |c: usize| x.get(c, c) * model.weights[c];
            let (t1, t2, t3) = (corner(0), corner(1), corner(2));
            worst = worst
                .max((t1 - t2).norm())
                .max((t1 * (1.0 - 2.0 * l) - t3 * l).norm())
                .max((t1 - model.trace(&x) * l).norm());
        }
        report.push(Check::within(
            "tl: corner trace identities",
            "tau(x1) = tau(x2), (1 - 2 lambda) tau(x1) = lambda tau(x3), tau(x1) = lambda tau(x)",
            worst,
            tol,
            "",
        ));
    }
    report
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{tl_m4_model, BlockModel, TLParams};
use crate::commutant::{conditional_expectation, SubalgebraBasis};
use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, DenseMatrix};
use crate::presentation::{validate_spec, AlgebraSpec};
use crate::report::{Check, Report};
use crate::weyl::{build_base, Family};

/// Diagonal blocks `x₁ … x₄` of the first-slot factor of `(𝔮₁)₄`.
#[derive(Clone, Debug, PartialEq)]
pub struct Q14Element {
    pub x1: Vec<Complex64>,
    pub x2: Vec<Complex64>,
    pub x3: Vec<Complex64>,
    pub x4: Vec<Complex64>,
}

fn multiplicities(params: TLParams) -> Result<[usize; 4]> {
    let (p, q) = (params.p() as i64, params.q() as i64);
    let sizes = [p * p, p * q - p * p, p * q - p * p, q * q - 3 * p * q + p * p];
    if let Some(bad) = sizes.iter().find(|&&m| m <= 0) {
        return Err(Error::InvalidParams(format!("block multiplicity {bad} is not positive")));
    }
    Ok(sizes.map(|m| m as usize))
}

/// `x₁ = diag(ρ⁰ … ρ^{p²−1})`, `x₂ = diag(ρ^{p²} … ρ^{pq−1})`, `x₃ = x₄ = 1`, `ρ = exp(2πi/pq)`.
pub fn q14_element(params: TLParams) -> Result<Q14Element> {
    let [m1, m2, m3, m4] = multiplicities(params)?;
    let d1 = params.p() * params.q();
    let rho = |j: usize| root_of_unity(j as u64, d1);
    Ok(Q14Element {
        x1: (0..m1).map(rho).collect(),
        x2: (m1..m1 + m2).map(rho).collect(),
        x3: vec![Complex64::new(1.0, 0.0); m3],
        x4: vec![Complex64::new(1.0, 0.0); m4],
    })
}

impl Q14Element {
    /// All blocks equal to the identity.
    pub fn identity(params: TLParams) -> Result<Q14Element> {
        let [m1, m2, m3, m4] = multiplicities(params)?;
        let one = Complex64::new(1.0, 0.0);
        Ok(Q14Element {
            x1: vec![one; m1],
            x2: vec![one; m2],
            x3: vec![one; m3],
            x4: vec![one; m4],
        })
    }

    pub fn sizes(&self) -> [usize; 4] {
        [self.x1.len(), self.x2.len(), self.x3.len(), self.x4.len()]
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        [&self.x1, &self.x2, &self.x3, &self.x4].iter().all(|b| b.iter().all(|z| (z.norm() - 1.0).abs() <= tol))
    }

    /// `diag(x₁, x₁, x₂, x₂, x₃, x₄)` over the six coordinate blocks of the model.
    pub fn to_dense(&self, model: &BlockModel) -> Result<DenseMatrix> {
        let blocks = [&self.x1, &self.x1, &self.x2, &self.x2, &self.x3, &self.x4];
        for (c, b) in blocks.iter().enumerate() {
            if model.block_sizes.get(c).copied() != Some(b.len() as u64) {
                return Err(Error::DimensionMismatch(b.len(), model.block_sizes.get(c).copied().unwrap_or(0) as usize));
            }
        }
        let diag: Vec<Complex64> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
        Ok(DenseMatrix::diagonal(&diag))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaOutcome {
    pub lambda: f64,
    pub kappa: f64,
    /// Coefficient of `e₄`.
    pub alpha: f64,
    /// Coefficient of `1 − e₄`, read on the `M₂` part.
    pub beta: f64,
    /// Coefficient of `1 − e₄`, read on the scalar part.
    pub beta_scalar: f64,
    /// `τ(𝔮₁ 𝔮₁*)` from the last slot.
    pub slot_factor: f64,
    /// Largest departure from `2λ² e₄ + β (1 − e₄)`.
    pub deviation: f64,
    /// `λ(1 − λ)`.
    pub bound: f64,
    pub report: Report,
}

/// Units of `M₂ ⊗ 1 ⊕ ℂ` in the expanded six-block model: `E_ab` over coordinate
/// pairs `(0,1)` and `(2,3)`, then the projection onto coordinates `4, 5`.
fn a14_units(model: &BlockModel) -> Vec<DenseMatrix> {
    let off = model.offsets();
    let n = model.total_dim();
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(5);
    for a in 0..2 {
        for b in 0..2 {
            let mut m = DenseMatrix::zeros(n);
            for base in [0, 2] {
                for t in 0..model.block_sizes[base] as usize {
                    m.set(off[base + a] + t, off[base + b] + t, one);
                }
            }
            out.push(m);
        }
    }
    let mut rest = DenseMatrix::zeros(n);
    for i in off[4]..n {
        rest.set(i, i, one);
    }
    out.push(rest);
    out
}

/// `τ(𝔮₁ 𝔮₁*)` in the base algebra `M₂ ⊗ M_{d₁} ⊕ M_{d₂}` with trace vector `(λ, 1 − 2λ)`.
fn last_slot_factor(params: TLParams) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    let dims = validate_spec(&AlgebraSpec::new([(2, p, q), (1, q - 2 * p, q)]))?;
    let base = build_base(&dims);
    let g = base.generator(Family::MultQ, 0);
    Ok(g.mul(&g.adjoint()).normalized_trace().re)
}

pub fn kappa_compute(params: TLParams, tol: f64) -> Result<KappaOutcome> {
    kappa_compute_with(params, &q14_element(params)?, tol)
}

/// `E_{A₁,₄}(e₂ 𝔮 e₂ 𝔮* e₂)` for the given first-slot blocks, split as `α e₄ + β (1 − e₄)`;
/// `κ = β/(2λ)`.
pub fn kappa_compute_with(params: TLParams, element: &Q14Element, tol: f64) -> Result<KappaOutcome> {
    let model = tl_m4_model(params);
    let lambda = model.lambda;
    let mut report = Report::new();
    let e2 = model.expand(model.e(2).expect("m = 4 model"));
    let e3 = model.expand(model.e(3).expect("m = 4 model"));
    let e4 = model.expand(model.e(4).expect("m = 4 model"));
    let dq = element.to_dense(&model)?;
    report.push(Check::exact(
        "tl: first-slot blocks of (q1)_4 are unitary",
        "x1..x4 diagonal phases",
        element.is_unitary(1e-12),
        format!("block sizes {:?}", element.sizes()),
    ));

    let units = a14_units(&model);
    let a14 = SubalgebraBasis::from_span(model.total_dim(), &units, tol);
    let inside = a14.contains(&e3, tol) && a14.contains(&e4, tol);
    report.push(Check::exact(
        "tl: e3 and e4 lie in the M2 + C block algebra",
        "A_(1,4) = M2 + C",
        inside && a14.dim() == 5,
        format!("dimension {}", a14.dim()),
    ));
    report.push(Check::within(
        "tl: the block algebra is closed under products",
        "A_(1,4) is an algebra",
        a14.closure_defect(),
        tol,
        "",
    ));

    let y = e2.mul(&dq).mul(&e2).mul(&dq.adjoint()).mul(&e2);
    let slot = last_slot_factor(params)?;
    report.push(Check::within(
        "tl: last-slot factor tau(q1 q1*) = 2 lambda",
        "tau(q1 q1*) = a1 d1 / d",
        (slot - 2.0 * lambda).abs(),
        tol,
        format!("{slot}"),
    ));
    let ey = conditional_expectation(&y, &a14).scale_real(slot);

    let coef = |u: &DenseMatrix| ey.inner(u) / u.inner(u);
    let c: Vec<Complex64> = units.iter().map(coef).collect();
    let alpha = c[0].re;
    let beta = c[3].re;
    let beta_scalar = c[4].re;
    let imag = c.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let off_diag = c[1].norm().max(c[2].norm());
    let form_dev = off_diag.max((beta - beta_scalar).abs()).max(imag);
    let alpha_dev = (alpha - 2.0 * lambda * lambda).abs();
    let deviation = form_dev.max(alpha_dev);
    if deviation > tol {
        return Err(Error::StructureMismatch {
            deviation,
            alpha,
            beta,
            matrix: ey.to_rows(),
        });
    }
    report.push(Check::within(
        "tl: expectation has the form alpha e4 + beta (1 - e4)",
        "E(e2 q e2 q* e2) = 2 lambda^2 e4 + 2 lambda kappa (1 - e4)",
        form_dev,
        tol,
        format!("off-diagonal {off_diag:.3e}, beta {beta} vs {beta_scalar}"),
    ));
    report.push(Check::within("tl: alpha = 2 lambda^2", "2 lambda^2 e4", alpha_dev, tol, format!("{alpha}")));
    let kappa = beta / (2.0 * lambda);
    let bound = lambda * (1.0 - lambda);
    report.push(Check::exact(
        "tl: 0 <= kappa < lambda (1 - lambda)",
        "kappa < lambda (1 - lambda)",
        (-tol..bound).contains(&kappa),
        format!("kappa {kappa}, bound {bound}"),
    ));
    Ok(KappaOutcome {
        lambda,
        kappa,
        alpha,
        beta,
        beta_scalar,
        slot_factor: slot,
        deviation,
        bound,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, q: u64) -> TLParams {
        TLParams::new(p, q).unwrap()
    }

    /// `Σ_{j=p²}^{pq−1} |a ρ^j + c|² / (q(q − p))`, `a = λ/(1−λ)`, `c = (1−2λ)/(1−λ)`.
    fn closed_form(p: u64, q: u64) -> f64 {
        let l = p as f64 / q as f64;
        let (a, c) = (l / (1.0 - l), (1.0 - 2.0 * l) / (1.0 - l));
        let d1 = (p * q) as f64;
        let sum: f64 = (p * p..p * q)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / d1;
                (a * t.cos() + c).powi(2) + (a * t.sin()).powi(2)
            })
            .sum();
        sum / (q * (q - p)) as f64
    }

    #[test]
    fn element_blocks() {
        let x = q14_element(params(1, 5)).unwrap();
        assert_eq!(x.sizes(), [1, 4, 4, 11]);
        assert_eq!(x.x1, vec![Complex64::new(1.0, 0.0)]);
        for (j, z) in x.x2.iter().enumerate() {
            assert!((z - root_of_unity(j as u64 + 1, 5)).norm() < 1e-15);
        }
        assert!(x.is_unitary(1e-15));
    }

    #[test]
    fn kappa_one_fifth() {
        let k = kappa_compute(params(1, 5), 1e-9).unwrap();
        assert!((k.alpha - 2.0 / 25.0).abs() < 1e-9);
        assert!((k.kappa - closed_form(1, 5)).abs() < 1e-12);
        assert!((k.kappa - 0.10625).abs() < 1e-12);
        assert!(k.kappa < 0.16);
        assert!(k.report.all_pass(), "{}", k.report.to_text());
    }

    #[test]
    fn kappa_grid_against_closed_form() {
        for (p, q) in [(1, 6), (2, 9), (3, 13)] {
            let k = kappa_compute(params(p, q), 1e-9).unwrap();
            assert!((k.kappa - closed_form(p, q)).abs() < 1e-10, "{p}/{q}: {} vs {}", k.kappa, closed_form(p, q));
            assert!(k.kappa >= 0.0 && k.kappa < k.bound);
        }
    }

    #[test]
    fn trivial_element_gives_lambda() {
        let pr = params(1, 5);
        let k = kappa_compute_with(pr, &Q14Element::identity(pr).unwrap(), 1e-9).unwrap();
        assert!((k.kappa - 0.2).abs() < 1e-12);
    }

    #[test]
    fn diagonal_phases_keep_the_form() {
        let pr = params(1, 5);
        let mut x = q14_element(pr).unwrap();
        x.x3.iter_mut().for_each(|z| *z = -*z);
        let k = kappa_compute_with(pr, &x, 1e-9).unwrap();
        assert!(k.deviation < 1e-12);
        assert!((k.kappa - 0.10625).abs() > 1e-3);
    }

    #[test]
    fn scaled_block_is_a_mismatch() {
        let pr = params(1, 5);
        let mut x = q14_element(pr).unwrap();
        x.x1.iter_mut().for_each(|z| *z *= 2.0);
        match kappa_compute_with(pr, &x, 1e-9) {
            Err(Error::StructureMismatch { deviation, matrix, .. }) => {
                assert!(deviation > 1e-3);
                assert_eq!(matrix.len(), 25);
            }
            other => panic!("expected a mismatch, got {other:?}"),
        }
    }
}

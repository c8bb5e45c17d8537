//! Finite Temperley-Lieb models, their Markov trace, and the κ expectation.

mod collapse;
mod kappa;
mod markov;
mod model;

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, Report};

pub use collapse::trace_collapse_check;
pub use kappa::{kappa_compute, kappa_compute_with, q14_element, KappaOutcome, Q14Element};
pub use markov::{markov_property_check, markov_weights_m3, MarkovWeights};
pub use model::{tl_m3_model, tl_m4_model, BlockModel};

/// `λ = p/q` in lowest terms with `q > 4p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct TLParams {
    p: u64,
    q: u64,
}

#[derive(Deserialize)]
struct RawParams {
    p: u64,
    q: u64,
}

impl TryFrom<RawParams> for TLParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        TLParams::new(raw.p, raw.q)
    }
}

impl TLParams {
    pub fn new(p: u64, q: u64) -> Result<TLParams> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParams(format!("lambda = {p}/{q} must be positive")));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if q <= 4 * p {
            return Err(Error::InvalidParams(format!(
                "lambda^-1 = {q}/{p} must lie in (4, ∞) ∩ ℚ"
            )));
        }
        Ok(TLParams { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.p, self.q)
    }
}

impl fmt::Display for TLParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for TLParams {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let r: Ratio<u64> = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("cannot parse lambda {s:?}; expected p/q")))?;
        TLParams::new(*r.numer(), *r.denom())
    }
}

/// Everything the `tl` command reports for one model size.
pub fn tl_report(params: TLParams, m: usize, samples: usize, seed: u64) -> Result<(Report, Option<KappaOutcome>)> {
    let lambda = params.lambda();
    let mut report = Report::new();
    match m {
        3 => {
            let model = tl_m3_model(params);
            report.extend(model.relation_report(1e-12));
            report.extend(markov_property_check(&model, samples, seed));
            let w = markov_weights_m3(lambda);
            report.push(Check::exact(
                "tl: Markov weights are the unique normalized solution",
                "tau(x1) = tau(x2), (1-2 lambda) tau(x1) = lambda tau(x3), sum = 1",
                w.rank == 3,
                format!("rank {}, weights {:?}", w.rank, w.weights),
            ));
            let dev = w.weights.iter().zip(&model.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            report.push(Check::within(
                "tl: solved weights match block multiplicities",
                "(lambda, lambda, 1 - 2 lambda)",
                dev,
                1e-12,
                format!("{:?}", model.weights),
            ));
            Ok((report, None))
        }
        4 => {
            let model = tl_m4_model(params);
            report.extend(model.relation_report(1e-12));
            report.extend(markov_property_check(&model, samples, seed));
            match kappa_compute(params, 1e-9) {
                Ok(k) => {
                    report.extend(k.report.clone());
                    Ok((report, Some(k)))
                }
                Err(Error::StructureMismatch { deviation, alpha, beta, .. }) => {
                    report.push(Check::within(
                        "tl: expectation has the form alpha e4 + beta (1 - e4)",
                        "E(e2 q e2 q* e2) = 2 lambda^2 e4 + 2 lambda kappa (1 - e4)",
                        deviation,
                        1e-9,
                        format!("alpha {alpha}, beta {beta}"),
                    ));
                    Ok((report, None))
                }
                Err(e) => Err(e),
            }
        }
        _ => Err(Error::InvalidParams(format!("model size m = {m} not available; use 3 or 4"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reduce_and_reject() {
        let p: TLParams = "2/10".parse().unwrap();
        assert_eq!((p.p(), p.q()), (1, 5));
        let err = "1/4".parse::<TLParams>().unwrap_err();
        assert!(err.to_string().contains("(4, ∞) ∩ ℚ"));
        assert!("0/5".parse::<TLParams>().is_err());
        assert!("x".parse::<TLParams>().is_err());
        assert!(serde_json::from_str::<TLParams>(r#"{"p":1,"q":3}"#).is_err());
        let ok: TLParams = serde_json::from_str(r#"{"p":3,"q":13}"#).unwrap();
        assert_eq!(ok.to_string(), "3/13");
    }

    #[test]
    fn reports_pass() {
        for lam in ["1/5", "1/6", "2/9", "3/13"] {
            let params: TLParams = lam.parse().unwrap();
            for m in [3, 4] {
                let (rep, k) = tl_report(params, m, 8, 0x5EED).unwrap();
                assert!(rep.all_pass(), "{lam} m={m}\n{}", rep.to_text());
                assert_eq!(k.is_some(), m == 4);
            }
        }
        assert!(tl_report("1/5".parse().unwrap(), 5, 1, 0).is_err());
    }
}

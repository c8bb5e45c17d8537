use std::fs;
use std::io::Write;
use std::path::Path;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use sflab_core::presentation::{parse_spec_file, validate_spec, AlgebraSpec, DerivedDims};
use sflab_core::report::{RunReport, Status};
use sflab_core::tl::{tl_report, TLParams};
use sflab_core::tower::{build_tower_with_capacity, TowerFile};
use sflab_core::Error;

use crate::args::{BuildArgs, CheckArgs, Format, Global, ReportArgs, TlArgs, ValidateArgs};
use crate::exit::{code_for_status, Failure, CAPACITY, FAIL, PASS};
use crate::suites::{self, Settings};

type Outcome = Result<u8, Failure>;

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn spec_digest(spec: &AlgebraSpec) -> String {
    digest(&spec.canonical_json())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::usage(e.to_string()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ValidateOutput {
    tool_version: &'static str,
    spec_digest: String,
    command: &'static str,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<DerivedDims>,
    violations: Vec<String>,
}

pub fn validate(args: &ValidateArgs) -> Outcome {
    let spec = match parse_spec_file(&args.spec) {
        Ok(spec) => spec,
        Err(Error::Spec(e)) if !e.violations().is_empty() => {
            eprintln!("{e}");
            let out = ValidateOutput {
                tool_version: env!("CARGO_PKG_VERSION"),
                spec_digest: digest(&read_text(&args.spec)?),
                command: "validate",
                status: Status::Fail,
                dims: None,
                violations: e.violations().iter().map(|v| v.to_string()).collect(),
            };
            print_json(&out)?;
            return Ok(FAIL);
        }
        Err(e) => return Err(Failure::usage(format!("{}: {e}", args.spec.display()))),
    };
    let mut out = ValidateOutput {
        tool_version: env!("CARGO_PKG_VERSION"),
        spec_digest: spec_digest(&spec),
        command: "validate",
        status: Status::Pass,
        dims: None,
        violations: vec![],
    };
    let code = match validate_spec(&spec) {
        Ok(dims) => {
            eprintln!("d = {}, mult = {:?}, sizes = {:?}", dims.d, dims.mult, dims.sizes);
            out.dims = Some(dims);
            PASS
        }
        Err(e) => {
            out.status = Status::Fail;
            out.violations = e.violations().iter().map(|v| v.to_string()).collect();
            eprintln!("{e}");
            if e.is_capacity() {
                CAPACITY
            } else {
                FAIL
            }
        }
    };
    print_json(&out)?;
    Ok(code)
}

pub fn build(args: &BuildArgs, g: &Global) -> Outcome {
    let spec = parse_spec_file(&args.spec).map_err(|e| Failure::usage(format!("{}: {e}", args.spec.display())))?;
    let tower = build_tower_with_capacity(&spec, args.levels, g.capacity)?;
    let text = tower.to_file().to_json();
    match &args.out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    eprintln!(
        "built depth {} over d = {}: ambient dim {}, {} generators",
        tower.depth(),
        tower.d(),
        tower.ambient_dim(),
        tower.generator_refs().len()
    );
    Ok(PASS)
}

pub fn check(args: &CheckArgs, g: &Global) -> Outcome {
    let text = read_text(&args.tower)?;
    let file = TowerFile::from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", args.tower.display())))?;
    let tower = file.to_tower(g.capacity)?;
    let settings = Settings {
        seed: g.seed,
        samples: g.samples,
        capacity: g.capacity,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.jobs.max(1))
        .build()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let outcomes: Vec<_> = pool.install(|| {
        args.suite
            .expand()
            .into_par_iter()
            .map(|s| suites::run(s, &tower, &settings))
            .collect()
    });
    let mut report = sflab_core::report::Report::new();
    let mut capacity_hit = false;
    for o in outcomes {
        report.extend(o.report);
        capacity_hit |= o.capacity_hit;
    }
    if args.table {
        eprint!("{}", report.to_text());
    } else {
        for c in report.failures() {
            eprintln!("fail  {}  [{}]", c.name, c.detail);
        }
    }
    eprintln!(
        "suite {}: {} pass, {} fail, {} inconclusive",
        args.suite.name(),
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Inconclusive)
    );
    let run = RunReport::new(format!("check --suite {}", args.suite.name()), spec_digest(tower.spec()), Some(g.seed), report);
    print_json(&run)?;
    if capacity_hit && run.status != Status::Fail {
        return Ok(CAPACITY);
    }
    Ok(code_for_status(run.status))
}

fn parse_lambda(text: &str) -> Result<TLParams, Failure> {
    let r: Ratio<u64> = text
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("cannot parse lambda {text:?}; expected p/q")))?;
    TLParams::new(*r.numer(), *r.denom()).map_err(|e| Failure::check(e.to_string()))
}

pub fn tl(args: &TlArgs, g: &Global) -> Outcome {
    let params = parse_lambda(&args.lambda)?;
    let (report, kappa) = match tl_report(params, args.m, g.samples.min(64), g.seed) {
        Ok(r) => r,
        Err(e @ Error::InvalidParams(_)) => return Err(Failure::usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let lambda = params.lambda();
    let mut data = json!({
        "lambda": params.to_string(),
        "m": args.m,
        "bound": lambda * (1.0 - lambda),
    });
    if let Some(k) = &kappa {
        data["kappa"] = json!(k.kappa);
        data["alpha"] = json!(k.alpha);
        data["beta"] = json!(k.beta);
        data["deviation"] = json!(k.deviation);
        eprintln!("kappa = {:.12}  (bound lambda(1 - lambda) = {:.12})", k.kappa, k.bound);
    }
    let model = match args.m {
        3 => sflab_core::tl::tl_m3_model(params),
        _ => sflab_core::tl::tl_m4_model(params),
    };
    data["weights"] = json!(model.weights);
    for c in report.failures() {
        eprintln!("fail  {}  [{}]", c.name, c.detail);
    }
    let mut run = RunReport::new(format!("tl --m {}", args.m), digest(&format!("lambda={params};m={}", args.m)), Some(g.seed), report);
    run.data = Some(data);
    eprintln!("tl {} m={}: {}", params, args.m, run.status.as_str());
    print_json(&run)?;
    Ok(code_for_status(run.status))
}

pub fn report(args: &ReportArgs) -> Outcome {
    let mut runs = Vec::with_capacity(args.merge.len());
    for path in &args.merge {
        let text = read_text(path)?;
        let run: RunReport = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: not a run report: {e}", path.display())))?;
        runs.push(run);
    }
    let merged = RunReport::merge(&runs);
    match args.format {
        Format::Json => print_json(&merged)?,
        Format::Text => {
            println!("command  {}", merged.command);
            println!("digest   {}", merged.spec_digest);
            println!("status   {}", merged.status.as_str());
            print!("{}", merged.report().to_text());
        }
    }
    Ok(code_for_status(merged.status))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(digest(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn lambda_errors() {
        assert_eq!(parse_lambda("x").unwrap_err().code, crate::exit::USAGE);
        let e = parse_lambda("1/4").unwrap_err();
        assert_eq!(e.code, FAIL);
        assert!(e.message.contains("(4, ∞) ∩ ℚ"));
        assert_eq!(parse_lambda("2/10").unwrap().to_string(), "1/5");
    }
}

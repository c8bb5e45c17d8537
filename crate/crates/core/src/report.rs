//! Check results and their aggregation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

/// One verified statement. `anchor` names the identity being tested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    /// `null` in JSON when not finite.
    #[serde(with = "residual_json")]
    pub residual: f64,
    pub detail: String,
}

mod residual_json {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, status: Status, residual: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            status,
            residual,
            detail: detail.into(),
        }
    }

    /// Exact check: residual is 0 on success and 1 otherwise.
    pub fn exact(name: impl Into<String>, anchor: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(name, anchor, Status::from_bool(ok), if ok { 0.0 } else { 1.0 }, detail)
    }

    /// Numeric check against a tolerance.
    pub fn within(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tol: f64, detail: impl Into<String>) -> Self {
        let ok = residual.is_finite() && residual <= tol;
        Self::new(name, anchor, Status::from_bool(ok), residual, detail)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Worst status over all checks; an empty report passes.
    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    /// Fixed-width table: status, name, residual, anchor, detail.
    pub fn to_text(&self) -> String {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:<w$} {:>10}  anchor", "status", "name", "residual");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<12} {:<w$} {:>10.3e}  {}{}",
                c.status.as_str(),
                c.name,
                c.residual,
                c.anchor,
                if c.detail.is_empty() { String::new() } else { format!("  [{}]", c.detail) }
            );
        }
        let _ = writeln!(
            out,
            "{} pass, {} fail, {} inconclusive",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Inconclusive)
        );
        out
    }
}

/// Report envelope written by the command-line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub tool_version: String,
    pub spec_digest: String,
    pub command: String,
    pub seed: Option<u64>,
    pub status: Status,
    pub checks: Vec<Check>,
    /// Command-specific results such as TL weights and κ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, spec_digest: impl Into<String>, seed: Option<u64>, report: Report) -> Self {
        RunReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            spec_digest: spec_digest.into(),
            command: command.into(),
            seed,
            status: report.status(),
            checks: report.checks,
            data: None,
        }
    }

    pub fn report(&self) -> Report {
        Report {
            checks: self.checks.clone(),
        }
    }

    /// Concatenates checks in argument order; digests and commands are joined when they differ.
    pub fn merge(reports: &[RunReport]) -> RunReport {
        let mut joined = Report::new();
        let mut digests: Vec<&str> = Vec::new();
        let mut commands: Vec<&str> = Vec::new();
        for r in reports {
            joined.extend(r.report());
            if !digests.contains(&r.spec_digest.as_str()) {
                digests.push(&r.spec_digest);
            }
            if !commands.contains(&r.command.as_str()) {
                commands.push(&r.command);
            }
        }
        let data: Vec<serde_json::Value> = reports.iter().filter_map(|r| r.data.clone()).collect();
        let seed = reports.first().and_then(|r| r.seed).filter(|s| reports.iter().all(|r| r.seed == Some(*s)));
        let mut merged = RunReport::new(format!("merge({})", commands.join(",")), digests.join(","), seed, joined);
        merged.data = (!data.is_empty()).then_some(serde_json::Value::Array(data));
        merged
    }
}

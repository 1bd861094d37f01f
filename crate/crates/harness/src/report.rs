//! Case records, suite summaries and their JSON / CSV forms.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use ou_brunn_core::GridFunction;
use serde::Serialize;

/// One checked relation `lhs ≤ rhs + slack` (strict when `strict`).
/// `margin = rhs + slack − lhs`; a case passes when the margin is
/// nonnegative (positive if strict). Unasserted cases are diagnostics and
/// always pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub id: String,
    pub experiment: String,
    pub check: String,
    pub relation: String,
    pub bodies: Vec<String>,
    pub t: Option<f64>,
    pub lambda_0: Option<f64>,
    pub lambda_1: Option<f64>,
    pub lambda_t: Option<f64>,
    /// `(1−t)λ₀ + tλ₁ − λ_t`, signed.
    pub deficit: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub strict: bool,
    pub margin: f64,
    pub asserted: bool,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    pub error: Option<String>,
}

impl CaseRecord {
    pub fn new(experiment: &str, check: &str, id: String, relation: &str) -> Self {
        Self {
            id,
            experiment: experiment.into(),
            check: check.into(),
            relation: relation.into(),
            bodies: Vec::new(),
            t: None,
            lambda_0: None,
            lambda_1: None,
            lambda_t: None,
            deficit: None,
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: 0.0,
            strict: false,
            margin: f64::NAN,
            asserted: true,
            pass: false,
            metrics: BTreeMap::new(),
            error: None,
        }
    }

    pub fn bodies(mut self, names: &[&str]) -> Self {
        self.bodies = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn metric(mut self, key: &str, v: f64) -> Self {
        self.metrics.insert(key.into(), v);
        self
    }

    pub fn diagnostic(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Fills in the relation and settles `margin` and `pass`.
    pub fn check(mut self, lhs: f64, rhs: f64, slack: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.slack = slack;
        self.margin = rhs + slack - lhs;
        let holds = if self.strict { self.margin > 0.0 } else { self.margin >= 0.0 };
        self.pass = !self.asserted || holds;
        self
    }

    pub fn failed(mut self, err: impl std::fmt::Display) -> Self {
        self.error = Some(err.to_string());
        self.pass = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub asserted: usize,
    pub failures: usize,
    pub errors: usize,
    /// Smallest margin over asserted cases.
    pub worst_margin: Option<f64>,
    pub worst_case: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub summary: Summary,
    pub cases: Vec<CaseRecord>,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, cases: Vec<CaseRecord>) -> Self {
        let mut summary = Summary { cases: cases.len(), asserted: 0, failures: 0, errors: 0, worst_margin: None, worst_case: None };
        for c in &cases {
            if c.error.is_some() {
                summary.errors += 1;
            } else if !c.pass {
                summary.failures += 1;
            }
            if c.asserted {
                summary.asserted += 1;
                if c.error.is_none() && summary.worst_margin.is_none_or(|m| c.margin < m) {
                    summary.worst_margin = Some(c.margin);
                    summary.worst_case = Some(c.id.clone());
                }
            }
        }
        Self { tool: "ou-brunn".into(), version: env!("CARGO_PKG_VERSION").into(), experiment: experiment.into(), seed, summary, cases }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// 0 when every assertion held, 1 on a failed assertion, 2 if a case
    /// could not be computed.
    pub fn exit_code(&self) -> u8 {
        if self.summary.errors > 0 {
            2
        } else if self.summary.failures > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    experiment: &'a str,
    check: &'a str,
    bodies: String,
    t: Option<f64>,
    lambda_0: Option<f64>,
    lambda_1: Option<f64>,
    lambda_t: Option<f64>,
    deficit: Option<f64>,
    lhs: f64,
    rhs: f64,
    slack: f64,
    margin: f64,
    asserted: bool,
    pass: bool,
    error: &'a str,
}

pub fn write_csv<W: io::Write>(cases: &[CaseRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cases {
        w.serialize(CsvRow {
            id: &c.id,
            experiment: &c.experiment,
            check: &c.check,
            bodies: c.bodies.join(";"),
            t: c.t,
            lambda_0: c.lambda_0,
            lambda_1: c.lambda_1,
            lambda_t: c.lambda_t,
            deficit: c.deficit,
            lhs: c.lhs,
            rhs: c.rhs,
            slack: c.slack,
            margin: c.margin,
            asserted: c.asserted,
            pass: c.pass,
            error: c.error.as_deref().unwrap_or(""),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// `x[, y], u` per interior node.
pub fn write_eigenfunction<W: io::Write>(u: &GridFunction, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let grid = u.grid();
    if grid.dim() == 1 {
        w.write_record(["x", "u"])?;
    } else {
        w.write_record(["x", "y", "u"])?;
    }
    for (k, v) in u.values().iter().enumerate() {
        let p = grid.point(k);
        if grid.dim() == 1 {
            w.serialize((p[0], v))?;
        } else {
            w.serialize((p[0], p[1], v))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `report.json`, `cases.csv` and one `eigenfunction_<name>.csv` per dump.
pub fn write_outputs(dir: &Path, report: &Report, dumps: &[(String, GridFunction)]) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report.to_json())?;
    write_csv(&report.cases, fs::File::create(dir.join("cases.csv"))?)?;
    for (name, u) in dumps {
        let safe: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
        write_eigenfunction(u, fs::File::create(dir.join(format!("eigenfunction_{safe}.csv")))?)?;
    }
    Ok(())
}

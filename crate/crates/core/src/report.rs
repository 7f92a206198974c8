//! Verification reports: typed check outcomes with optional exact witnesses,
//! rendered as text, JSON, or CSV with deterministic ordering.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Outcome of a single check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Not attempted, with the reason (size cap, unsupported input).
    Skipped(String),
}

/// Exact values backing a checked identity: both sides and, when one was
/// solved for, the connecting scalar.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub lhs: String,
    pub rhs: String,
    pub scalar: Option<String>,
}

/// One named check inside a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub status: Status,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn pass(id: impl Into<String>, description: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            description: description.into(),
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(id: impl Into<String>, description: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            description: description.into(),
            status: Status::Fail,
            witness: None,
        }
    }

    pub fn skipped(
        id: impl Into<String>,
        description: impl Into<String>,
        reason: impl Into<String>,
    ) -> Check {
        Check {
            id: id.into(),
            description: description.into(),
            status: Status::Skipped(reason.into()),
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Witness) -> Check {
        self.witness = Some(witness);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Per-module wall-clock timing attached to merged reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleTiming {
    pub module: String,
    pub seconds: f64,
}

/// A collection of checks with a title, merged and rendered as a unit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub timings: Vec<ModuleTiming>,
}

/// Flat serialized form of one check.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CheckRecord {
    check_id: String,
    description: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    lhs: Option<String>,
    rhs: Option<String>,
    scalar: Option<String>,
    pass: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct ReportRecord {
    title: String,
    summary: SummaryRecord,
    checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    timings: Vec<ModuleTiming>,
}

#[derive(Serialize, Deserialize)]
struct SummaryRecord {
    total: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> CheckRecord {
        let (status, reason, pass) = match &c.status {
            Status::Pass => ("pass".to_string(), None, Some(true)),
            Status::Fail => ("fail".to_string(), None, Some(false)),
            Status::Skipped(r) => ("skip".to_string(), Some(r.clone()), None),
        };
        CheckRecord {
            check_id: c.id.clone(),
            description: c.description.clone(),
            status,
            reason,
            lhs: c.witness.as_ref().map(|w| w.lhs.clone()),
            rhs: c.witness.as_ref().map(|w| w.rhs.clone()),
            scalar: c.witness.as_ref().and_then(|w| w.scalar.clone()),
            pass,
        }
    }
}

impl TryFrom<CheckRecord> for Check {
    type Error = Error;

    fn try_from(r: CheckRecord) -> Result<Check> {
        let status = match r.status.as_str() {
            "pass" => Status::Pass,
            "fail" => Status::Fail,
            "skip" => Status::Skipped(r.reason.clone().unwrap_or_default()),
            other => return Err(Error::Data(format!("unknown status {other}"))),
        };
        let witness = match (&r.lhs, &r.rhs) {
            (None, None) => None,
            _ => Some(Witness {
                lhs: r.lhs.unwrap_or_default(),
                rhs: r.rhs.unwrap_or_default(),
                scalar: r.scalar,
            }),
        };
        Ok(Check {
            id: r.check_id,
            description: r.description,
            status,
            witness,
        })
    }
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report {
            title: title.into(),
            checks: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Append another report's checks and timings.
    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.timings.extend(other.timings);
    }

    /// Stable order: checks by id, timings by module name.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
        self.timings.sort_by(|a, b| a.module.cmp(&b.module));
    }

    pub fn passed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Pass).count()
    }

    pub fn failed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn skipped_count(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| matches!(c.status, Status::Skipped(_)))
            .count()
    }

    /// True when nothing failed; skipped checks do not count against it.
    pub fn passed(&self) -> bool {
        self.failed_count() == 0
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n", self.title));
        for c in &self.checks {
            let tag = match &c.status {
                Status::Pass => "PASS".to_string(),
                Status::Fail => "FAIL".to_string(),
                Status::Skipped(reason) => format!("SKIP ({reason})"),
            };
            out.push_str(&format!("  [{tag}] {}: {}\n", c.id, c.description));
            if let (Status::Fail, Some(w)) = (&c.status, &c.witness) {
                out.push_str(&format!("    lhs    = {}\n", w.lhs));
                out.push_str(&format!("    rhs    = {}\n", w.rhs));
                if let Some(s) = &w.scalar {
                    out.push_str(&format!("    scalar = {s}\n"));
                }
            }
        }
        for t in &self.timings {
            out.push_str(&format!("  time {}: {:.3}s\n", t.module, t.seconds));
        }
        out.push_str(&format!(
            "  total {} | passed {} | failed {} | skipped {}\n",
            self.checks.len(),
            self.passed_count(),
            self.failed_count(),
            self.skipped_count()
        ));
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let rec = ReportRecord {
            title: self.title.clone(),
            summary: SummaryRecord {
                total: self.checks.len(),
                passed: self.passed_count(),
                failed: self.failed_count(),
                skipped: self.skipped_count(),
            },
            checks: self.checks.iter().map(CheckRecord::from).collect(),
            timings: self.timings.clone(),
        };
        serde_json::to_string_pretty(&rec).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Report> {
        let rec: ReportRecord =
            serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))?;
        let mut checks = Vec::with_capacity(rec.checks.len());
        for c in rec.checks {
            checks.push(Check::try_from(c)?);
        }
        Ok(Report {
            title: rec.title,
            checks,
            timings: rec.timings,
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["check_id", "status", "description", "lhs", "rhs", "scalar", "reason"])
            .map_err(|e| Error::Serde(e.to_string()))?;
        for c in &self.checks {
            let rec = CheckRecord::from(c);
            wtr.write_record([
                rec.check_id.as_str(),
                rec.status.as_str(),
                rec.description.as_str(),
                rec.lhs.as_deref().unwrap_or(""),
                rec.rhs.as_deref().unwrap_or(""),
                rec.scalar.as_deref().unwrap_or(""),
                rec.reason.as_deref().unwrap_or(""),
            ])
            .map_err(|e| Error::Serde(e.to_string()))?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Serde(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serde(e.to_string()))
    }
}

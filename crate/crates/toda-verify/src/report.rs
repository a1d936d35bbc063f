//! Check records, suite reports and the JSON document written for a run.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use toda_lump::SitePoint;

use crate::artifacts::Artifact;
use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// How the measured value is compared with the tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Below,
    AtMost,
    AtLeast,
    Equal,
}

impl Expect {
    fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Expect::Below => value < tol,
            Expect::AtMost => value <= tol,
            Expect::AtLeast => value >= tol,
            Expect::Equal => value == tol,
        }
    }

    /// Whether `a` is a worse observation than `b`.
    fn worse(self, a: f64, b: f64) -> bool {
        match self {
            Expect::Below | Expect::AtMost => a > b,
            Expect::AtLeast => a < b,
            Expect::Equal => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Location {
    None,
    Site { n: i64, x: f64, y: f64 },
    Frequency { xi: f64, y: f64 },
    Grid { half_width: f64, refine: usize },
}

impl From<SitePoint> for Location {
    fn from(p: SitePoint) -> Self {
        Location::Site { n: p.n, x: p.x, y: p.y }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// What the check verifies, in plain words.
    pub reference: String,
    pub status: Status,
    pub worst_residual: Option<f64>,
    pub tolerance: f64,
    pub expect: Expect,
    pub location: Location,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub elapsed_s: f64,
}

/// A check being evaluated: collects the worst observation and its location.
#[derive(Clone, Debug)]
pub struct Check {
    name: String,
    reference: String,
    tolerance: f64,
    expect: Expect,
    worst: Option<f64>,
    location: Location,
    detail: Option<String>,
    error: Option<String>,
    skipped: bool,
}

impl Check {
    pub fn new(name: &str, reference: &str, expect: Expect, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            reference: reference.into(),
            tolerance,
            expect,
            worst: None,
            location: Location::None,
            detail: None,
            error: None,
            skipped: false,
        }
    }

    pub fn below(name: &str, reference: &str, tolerance: f64) -> Self {
        Check::new(name, reference, Expect::Below, tolerance)
    }

    pub fn observe(&mut self, value: f64, at: impl Into<Location>) {
        let replace = match self.worst {
            None => true,
            Some(w) => value.is_nan() || (!w.is_nan() && self.expect.worse(value, w)),
        };
        if replace {
            self.worst = Some(value);
            self.location = at.into();
        }
    }

    /// Records a library error; the check fails.
    pub fn error(&mut self, e: impl std::fmt::Display) {
        if self.error.is_none() {
            self.error = Some(e.to_string());
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.detail = Some(s.into());
    }

    pub fn skip(&mut self, why: impl Into<String>) {
        self.skipped = true;
        self.detail = Some(why.into());
    }

    pub fn finish(self, elapsed: Duration) -> CheckRecord {
        let status = if self.skipped {
            Status::Skipped
        } else {
            match (self.worst, &self.error) {
                (Some(w), None) if !w.is_nan() && self.expect.holds(w, self.tolerance) => Status::Pass,
                _ => Status::Fail,
            }
        };
        let detail = match (self.error, self.detail) {
            (Some(e), Some(d)) => Some(format!("{e}; {d}")),
            (Some(e), None) => Some(e),
            (None, d) => d,
        };
        let detail = if status == Status::Fail && self.worst.is_none() && detail.is_none() {
            Some("no observations".into())
        } else {
            detail
        };
        CheckRecord {
            name: self.name,
            reference: self.reference,
            status,
            // a failed check without any observation still reports a residual
            worst_residual: match status {
                Status::Skipped => None,
                _ => Some(self.worst.unwrap_or(f64::NAN)),
            },
            tolerance: self.tolerance,
            expect: self.expect,
            location: self.location,
            detail,
            elapsed_s: elapsed.as_secs_f64(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    pub elapsed_s: f64,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

impl SuiteReport {
    pub fn new(suite: &str, checks: Vec<CheckRecord>, elapsed: Duration) -> Self {
        SuiteReport {
            suite: suite.into(),
            status: overall(checks.iter().map(|c| c.status)),
            checks,
            data: None,
            elapsed_s: elapsed.as_secs_f64(),
            artifacts: Vec::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn overall(it: impl Iterator<Item = Status>) -> Status {
    let mut s = Status::Pass;
    for st in it {
        if st == Status::Fail {
            s = Status::Fail;
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub tool: &'static str,
    pub version: &'static str,
    pub library: &'static str,
}

pub const VERSIONS: Versions = Versions {
    tool: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
    library: toda_lump::VERSION,
};

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub versions: Versions,
    /// Seconds since the Unix epoch when the report was assembled.
    pub created_unix: u64,
    pub config: RunConfig,
    pub status: Status,
    pub suites: Vec<SuiteReport>,
}

impl RunReport {
    pub fn new(config: RunConfig, suites: Vec<SuiteReport>) -> Self {
        RunReport {
            schema: SCHEMA,
            versions: VERSIONS,
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            config,
            status: overall(suites.iter().map(|s| s.status)),
            suites,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == name)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes the report next to `path` and renames it into place.
    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let text = self.to_json().map_err(std::io::Error::other)?;
        write_atomic(path, text.as_bytes())
    }

    /// One line per check and a closing line per suite.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            for c in &s.checks {
                let tag = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                let res = c.worst_residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
                out += &format!("{tag:<5}{:<34}{res:>11}  (tol {:.1e})\n", c.name, c.tolerance);
            }
            out += &format!("{}: {:?} in {:.2}s\n", s.suite, s.status, s.elapsed_s);
        }
        out
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

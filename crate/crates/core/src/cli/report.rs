use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Exit code for an error raised while running a command.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_) => EXIT_DEGENERATE,
        Error::NotClosed(_) | Error::Incompatible(_) | Error::NewtonFailed(_) | Error::Internal(_) => EXIT_CHECK,
        _ => EXIT_INPUT,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Failure means a numeric or symbolic check did not hold.
    Consistency,
    /// Failure means the Lagrangian is not regular.
    Regularity,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub kind: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn flag(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            kind: CheckKind::Consistency,
            value: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    /// Passes when `value ≤ tolerance`.
    pub fn bound(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            pass: value <= tolerance,
            kind: CheckKind::Consistency,
            value: Some(value),
            tolerance: Some(tolerance),
            detail: format!("{value:e} <= {tolerance:e}"),
        }
    }

    pub fn regularity(mut self) -> Self {
        self.kind = CheckKind::Regularity;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemDigest {
    pub n: u8,
    pub m: u8,
    pub r: usize,
    pub lagrangian: String,
    pub lepagean: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// One command's output. Everything except `timing` is a function of the
/// input file and flags.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub problem: Option<ProblemDigest>,
    pub tolerances: BTreeMap<String, f64>,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            problem: None,
            tolerances: BTreeMap::new(),
            results: Map::new(),
            checks: Vec::new(),
            error: None,
            exit_code: EXIT_OK,
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn put(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or_else(|e| Value::String(format!("<unserializable: {e}>")));
        self.results.insert(key.into(), v);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Exit code from the checks: 3 if a regularity check failed, else 2 if
    /// any check failed, else 0.
    pub fn settle(&mut self) {
        self.exit_code = if self.checks.iter().any(|c| !c.pass && c.kind == CheckKind::Regularity) {
            EXIT_DEGENERATE
        } else if self.checks.iter().any(|c| !c.pass) {
            EXIT_CHECK
        } else {
            EXIT_OK
        };
    }

    pub fn fail(&mut self, e: &Error) {
        self.error = Some(e.to_string());
        self.exit_code = exit_code_for(e);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(p) = &self.problem {
            let _ = writeln!(out, "problem: n={} m={} r={} L = {} ({})", p.n, p.m, p.r, p.lagrangian, p.lepagean);
        }
        for (k, v) in &self.results {
            let _ = writeln!(out, "{k}: {v}");
        }
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        let _ = writeln!(out, "exit code: {}", self.exit_code);
        out
    }
}

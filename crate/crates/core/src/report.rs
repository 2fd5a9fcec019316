//! Machine-readable report envelope shared by the CLI and the verification
//! harness. Maps are `BTreeMap`s so key order is stable.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::exactnum::format_rational;
use crate::Rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Self { name: name.into(), status, detail: None }
    }

    pub fn check(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, Status::from_bool(ok))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: serde_json::Value,
    pub verdicts: Vec<Verdict>,
    pub version: String,
}

impl ReportEnvelope {
    pub fn new(command: impl Into<String>, results: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            results,
            verdicts: Vec::new(),
            version: VERSION.to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.verdicts.push(v);
        self
    }

    pub fn verdicts(mut self, vs: impl IntoIterator<Item = Verdict>) -> Self {
        self.verdicts.extend(vs);
        self
    }

    /// True when no verdict failed. Undecided does not count as failure.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }
}

/// `None` becomes JSON `null`.
pub fn serialize_opt_rational<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

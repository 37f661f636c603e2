//! The versioned machine-readable report (`deform-forge-report/1`).
//!
//! Reports are plain data: ordered lists of facts and checks whose values
//! are JSON. Exact scalars are strings `a/b+c/d*i`; forms are objects from
//! monomial labels (`w12~3`) to scalars.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exterior::{Form, VectorForm};
use crate::scalar::Scalar;

pub const SCHEMA: &str = "deform-forge-report/1";

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, Hash, PartialOrd, Ord)]
pub enum Provenance {
    #[serde(rename = "[PAPER]")]
    Paper,
    #[serde(rename = "[DERIVED]")]
    Derived,
    #[serde(rename = "[EXTERNAL]")]
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Paper => "[PAPER]",
            Provenance::Derived => "[DERIVED]",
            Provenance::External => "[EXTERNAL]",
        })
    }
}

/// A computed or asserted value. Asserted expectations carry provenance.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Fact {
    pub key: String,
    pub value: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// An internal-consistency or expectation check.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub subject: String,
    pub config: BTreeMap<String, String>,
    pub facts: Vec<Fact>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, subject: &str) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            subject: subject.to_string(),
            config: BTreeMap::new(),
            facts: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn fact(&mut self, key: &str, value: Value) -> &mut Self {
        self.facts.push(Fact { key: key.to_string(), value, provenance: None });
        self
    }

    pub fn fact_with(&mut self, key: &str, value: Value, provenance: Provenance) -> &mut Self {
        self.facts.push(Fact { key: key.to_string(), value, provenance: Some(provenance) });
        self
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into(), provenance: None });
        self
    }

    pub fn check_with(
        &mut self,
        name: &str,
        passed: bool,
        detail: impl Into<String>,
        provenance: Provenance,
    ) -> &mut Self {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
            provenance: Some(provenance),
        });
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Pretty JSON with a trailing newline; deterministic for equal reports.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn parse(s: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// A form as a JSON object `{label: scalar}`.
pub fn form_json<S: Scalar>(f: &Form<S>) -> Value {
    let map: serde_json::Map<String, Value> =
        f.terms().map(|(m, c)| (m.label(), Value::String(c.to_string()))).collect();
    Value::Object(map)
}

/// A vector form as a JSON object `{slot: form}` over nonzero slots, where
/// slots are `d1..dn` (holomorphic) and `d~1..d~n`.
pub fn vector_json<S: Scalar>(v: &VectorForm<S>) -> Value {
    let n = v.n();
    let mut map = serde_json::Map::new();
    for (g, c) in v.comps().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let slot = if g < n { format!("d{}", g + 1) } else { format!("d~{}", g - n + 1) };
        map.insert(slot, form_json(c));
    }
    Value::Object(map)
}

pub fn scalar_json<S: Scalar>(c: &S) -> Value {
    json!(c.to_string())
}

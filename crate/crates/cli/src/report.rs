use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Outcome of one command. Every map is ordered, so the JSON rendering is
/// byte-stable; timing never enters the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdict: Verdict,
    pub counts: BTreeMap<String, u64>,
    pub witnesses: Vec<String>,
    pub details: BTreeMap<String, Value>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            verdict: Verdict::Pass,
            counts: BTreeMap::new(),
            witnesses: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn count(&mut self, key: &str, n: impl TryInto<u64>) -> &mut Self {
        self.counts.insert(key.to_string(), n.try_into().unwrap_or(u64::MAX));
        self
    }

    pub fn detail(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.details.insert(key.to_string(), v.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

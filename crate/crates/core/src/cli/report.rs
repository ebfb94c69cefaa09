use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::relalg::Relation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Produced,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds | Verdict::Produced => 0,
            Verdict::Fails => 1,
        }
    }

    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    fn word(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Produced => "produced",
        }
    }
}

/// A command result: the human lines and the JSON payload are filled from the
/// same data by each command.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub lines: Vec<String>,
    pub payload: Value,
    pub warnings: Vec<String>,
    pub artifact: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: Verdict) -> Self {
        Report {
            command: command.into(),
            verdict,
            lines: Vec::new(),
            payload: json!({}),
            warnings: Vec::new(),
            artifact: None,
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.payload[key] = value;
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        let _ = writeln!(out, "verdict: {}", self.verdict.word());
        for w in &self.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
        for l in &self.lines {
            let _ = writeln!(out, "  {l}");
        }
        out
    }

    pub fn json(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "verdict": self.verdict,
            "details": self.payload,
            "warnings": self.warnings,
        });
        if let Some(a) = &self.artifact {
            v["artifact"] = Value::String(a.clone());
        }
        v
    }

    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json()).expect("plain data");
        s.push('\n');
        s
    }
}

pub fn pairs_text(r: &Relation, arrow: &str) -> String {
    if r.is_empty() {
        return "none".into();
    }
    r.iter().map(|(a, b)| format!("{a} {arrow} {b}")).collect::<Vec<_>>().join(", ")
}

pub fn pairs_json(r: &Relation) -> Value {
    Value::Array(r.iter().map(|(a, b)| json!([a.as_str(), b.as_str()])).collect())
}

//! Textual specification language for interfaces and components, and the
//! JSON trace format.
//!
//! ```text
//! interface G {
//!   inputs: key, imm, ecu;
//!   outputs: can, deb;
//!   assume: key !-> imm, key !-> ecu;
//!   guarantee: key !-> can;
//!   property: key !-> can;
//! }
//! ```

mod lexer;
mod parser;
mod printer;
mod traces;

use std::fmt;

use crate::stateful::{StatefulComponent, StatefulInterface};
use crate::stateless::{StatelessComponent, StatelessInterface};

pub use parser::parse_spec;
pub use printer::serialize_spec;
pub use traces::{parse_traces, serialize_traces, TraceLoadError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, line, column, message: message.into() }
    }

    pub(crate) fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, line, column, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, sev, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Interface(StatelessInterface),
    Component(StatelessComponent),
    StatefulInterface(StatefulInterface),
    StatefulComponent(StatefulComponent),
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Interface(_) => "interface",
            Item::Component(_) => "component",
            Item::StatefulInterface(_) => "stateful interface",
            Item::StatefulComponent(_) => "stateful component",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub item: Item,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpecDocument {
    pub declarations: Vec<Declaration>,
}

impl SpecDocument {
    pub fn get(&self, name: &str) -> Option<&Item> {
        self.declarations.iter().find(|d| d.name == name).map(|d| &d.item)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.declarations.iter().map(|d| d.name.as_str())
    }

    pub fn push(&mut self, name: impl Into<String>, item: Item) {
        self.declarations.push(Declaration { name: name.into(), item });
    }
}

/// A parsed document and any warnings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub document: SpecDocument,
    pub warnings: Vec<Diagnostic>,
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypersem::{TraceError, TraceSet};
use crate::relalg::Var;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceFile {
    variables: Vec<String>,
    traces: Vec<Vec<BTreeMap<String, bool>>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceLoadError {
    #[error("{line}:{column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error(transparent)]
    Shape(#[from] TraceError),
}

/// Reads `{"variables": [..], "traces": [[{var: bool, ..}, ..], ..]}`.
pub fn parse_traces(text: &str) -> Result<TraceSet, TraceLoadError> {
    let file: TraceFile = serde_json::from_str(text).map_err(|e| TraceLoadError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut variables = std::collections::BTreeSet::new();
    for v in &file.variables {
        if !variables.insert(Var::new(v)) {
            return Err(TraceError::SameVariable(Var::new(v)).into());
        }
    }
    let traces = file
        .traces
        .into_iter()
        .map(|t| t.into_iter().map(|step| step.into_iter().map(|(k, v)| (Var::new(&k), v)).collect()).collect())
        .collect();
    Ok(TraceSet::new(variables, traces)?)
}

/// Writes every trace at the set's common length.
pub fn serialize_traces(set: &TraceSet) -> String {
    let file = TraceFile {
        variables: set.variables().iter().map(|v| v.as_str().to_string()).collect(),
        traces: (0..set.traces().len())
            .map(|i| {
                (0..set.len())
                    .map(|t| {
                        set.variables()
                            .iter()
                            .map(|v| (v.as_str().to_string(), set.value(i, t, v).expect("in range")))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data")
}

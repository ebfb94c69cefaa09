//! Brute-force membership of finite trace sets in the three set semantics of
//! the until-shaped no-flow property.
//!
//! A trace is a finite list of valuations whose last entry repeats forever.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::relalg::{Var, VarSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("variables must be pairwise distinct, `{0}` repeats")]
    SameVariable(Var),
    #[error("variable `{0}` is not part of the trace set")]
    UnknownVariable(Var),
    #[error("trace {trace} is empty")]
    EmptyTrace { trace: usize },
    #[error("trace {trace}, step {step}: missing variable `{var}`")]
    MissingVariable { trace: usize, step: usize, var: Var },
    #[error("trace {trace}, step {step}: unexpected variable `{var}`")]
    ExtraVariable { trace: usize, step: usize, var: Var },
}

/// A finite trace; valuations are stored in the order of the owning set's
/// variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    steps: Vec<Vec<bool>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn at(&self, t: usize, var: usize) -> bool {
        let step = t.min(self.steps.len() - 1);
        self.steps[step][var]
    }
}

/// Equal-length traces over a shared variable set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    variables: Vec<Var>,
    traces: Vec<Trace>,
    len: usize,
}

impl TraceSet {
    /// Shorter traces are padded by repeating their final valuation.
    pub fn new(variables: VarSet, traces: Vec<Vec<BTreeMap<Var, bool>>>) -> Result<Self, TraceError> {
        let variables: Vec<Var> = variables.into_iter().collect();
        let mut out = Vec::with_capacity(traces.len());
        for (i, trace) in traces.into_iter().enumerate() {
            if trace.is_empty() {
                return Err(TraceError::EmptyTrace { trace: i });
            }
            let mut steps = Vec::with_capacity(trace.len());
            for (t, valuation) in trace.into_iter().enumerate() {
                if let Some(extra) = valuation.keys().find(|v| !variables.contains(v)) {
                    return Err(TraceError::ExtraVariable { trace: i, step: t, var: extra.clone() });
                }
                let row = variables
                    .iter()
                    .map(|v| {
                        valuation
                            .get(v)
                            .copied()
                            .ok_or_else(|| TraceError::MissingVariable { trace: i, step: t, var: v.clone() })
                    })
                    .collect::<Result<Vec<bool>, _>>()?;
                steps.push(row);
            }
            out.push(Trace { steps });
        }
        let len = out.iter().map(Trace::len).max().unwrap_or(0);
        for trace in &mut out {
            let last = trace.steps.last().cloned().expect("non-empty");
            trace.steps.resize(len, last);
        }
        Ok(TraceSet { variables, traces: out, len })
    }

    pub fn variables(&self) -> &[Var] {
        &self.variables
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    /// Common prefix length `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Value of `var` in trace `trace` at time `t`, with a constant tail.
    pub fn value(&self, trace: usize, t: usize, var: &Var) -> Option<bool> {
        let idx = self.variables.iter().position(|v| v == var)?;
        Some(self.traces.get(trace)?.at(t, idx))
    }

    /// The same set with every trace extended by one copy of its final
    /// valuation.
    pub fn extended(&self) -> TraceSet {
        let mut next = self.clone();
        for trace in &mut next.traces {
            let last = trace.steps.last().cloned().expect("non-empty");
            trace.steps.push(last);
        }
        next.len += 1;
        next
    }

    fn index(&self, v: &Var) -> Result<usize, TraceError> {
        self.variables.iter().position(|w| w == v).ok_or_else(|| TraceError::UnknownVariable(v.clone()))
    }
}

/// Resolved variable positions for `x`, `y`, `z`.
#[derive(Clone, Copy, Debug)]
pub struct Probe {
    x: usize,
    y: usize,
    z: usize,
}

impl Probe {
    pub fn new(set: &TraceSet, x: &Var, y: &Var, z: &Var) -> Result<Self, TraceError> {
        if x == y || x == z {
            return Err(TraceError::SameVariable(x.clone()));
        }
        if y == z {
            return Err(TraceError::SameVariable(y.clone()));
        }
        Ok(Probe { x: set.index(x)?, y: set.index(y)?, z: set.index(z)? })
    }
}

/// `x` of `p1` and `y` of `p2` both agree with `p3` at time `t`.
pub fn noflow_at(p1: &Trace, p2: &Trace, p3: &Trace, t: usize, x: usize, y: usize) -> bool {
    x != y && p1.at(t, x) == p3.at(t, x) && p2.at(t, y) == p3.at(t, y)
}

/// `0 < t`, no flow from `x` to `y` before `t`, and from `x` to `z` from `t`
/// on. Times past `max(t, L)` behave like `max(t, L)`.
pub fn phi_u(t: usize, p1: &Trace, p2: &Trace, p3: &Trace, probe: Probe) -> bool {
    if t == 0 {
        return false;
    }
    let horizon = t.max(p1.len().max(p2.len()).max(p3.len()));
    (0..t).all(|s| noflow_at(p1, p2, p3, s, probe.x, probe.y))
        && (t..=horizon).all(|s| noflow_at(p1, p2, p3, s, probe.x, probe.z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Strong,
    Aware,
    Unstructured,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Strong => "strong",
            Semantics::Aware => "aware",
            Semantics::Unstructured => "unstructured",
        })
    }
}

/// A satisfying choice of `π₃` and `t` for the pair `(π₁, π₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Choice {
    pub pi1: usize,
    pub pi2: usize,
    pub pi3: usize,
    pub t: usize,
}

/// A pair `(π₁, π₂)` for which no `π₃` works; `t` is set when the time was
/// fixed by an outer quantifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub pi1: usize,
    pub pi2: usize,
    pub t: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemanticsVerdict {
    pub semantics: Semantics,
    pub member: bool,
    /// For members: one choice per `(π₁, π₂)`.
    pub witnesses: Vec<Choice>,
    /// For non-members: the failing pairs, one per candidate time where the
    /// time is chosen before `π₂`.
    pub counterexamples: Vec<Refutation>,
}

fn times(set: &TraceSet) -> std::ops::RangeInclusive<usize> {
    1..=set.len.max(1)
}

/// First `π₃` (by index) satisfying the formula at `t`.
fn third(set: &TraceSet, i: usize, j: usize, t: usize, probe: Probe) -> Option<usize> {
    let (p1, p2) = (&set.traces[i], &set.traces[j]);
    (0..set.traces.len()).find(|&k| phi_u(t, p1, p2, &set.traces[k], probe))
}

/// Choices for every `(π₁ = i, π₂)` at a fixed `t`, or the first failing `π₂`.
fn row_at(set: &TraceSet, i: usize, t: usize, probe: Probe) -> Result<Vec<Choice>, usize> {
    (0..set.traces.len())
        .map(|j| third(set, i, j, t, probe).map(|k| Choice { pi1: i, pi2: j, pi3: k, t }).ok_or(j))
        .collect()
}

/// `∃t ∀π₁ ∀π₂ ∃π₃`.
pub fn check_strong(set: &TraceSet, x: &Var, y: &Var, z: &Var) -> Result<SemanticsVerdict, TraceError> {
    let probe = Probe::new(set, x, y, z)?;
    let mut counterexamples = Vec::new();
    'time: for t in times(set) {
        let mut witnesses = Vec::new();
        for i in 0..set.traces.len() {
            match row_at(set, i, t, probe) {
                Ok(row) => witnesses.extend(row),
                Err(j) => {
                    counterexamples.push(Refutation { pi1: i, pi2: j, t: Some(t) });
                    continue 'time;
                }
            }
        }
        return Ok(SemanticsVerdict { semantics: Semantics::Strong, member: true, witnesses, counterexamples: vec![] });
    }
    Ok(SemanticsVerdict { semantics: Semantics::Strong, member: false, witnesses: vec![], counterexamples })
}

/// `∀π₁ ∃t ∀π₂ ∃π₃`.
pub fn check_aware(set: &TraceSet, x: &Var, y: &Var, z: &Var) -> Result<SemanticsVerdict, TraceError> {
    let probe = Probe::new(set, x, y, z)?;
    let mut witnesses = Vec::new();
    for i in 0..set.traces.len() {
        let mut failures = Vec::new();
        let found = times(set).find_map(|t| match row_at(set, i, t, probe) {
            Ok(row) => Some(row),
            Err(j) => {
                failures.push(Refutation { pi1: i, pi2: j, t: Some(t) });
                None
            }
        });
        match found {
            Some(row) => witnesses.extend(row),
            None => {
                return Ok(SemanticsVerdict {
                    semantics: Semantics::Aware,
                    member: false,
                    witnesses: vec![],
                    counterexamples: failures,
                })
            }
        }
    }
    Ok(SemanticsVerdict { semantics: Semantics::Aware, member: true, witnesses, counterexamples: vec![] })
}

/// `∀π₁ ∀π₂ ∃π₃ ∃t`.
pub fn check_unstructured(set: &TraceSet, x: &Var, y: &Var, z: &Var) -> Result<SemanticsVerdict, TraceError> {
    let probe = Probe::new(set, x, y, z)?;
    let n = set.traces.len();
    let mut witnesses = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let found = (0..n).find_map(|k| {
                times(set)
                    .find(|&t| phi_u(t, &set.traces[i], &set.traces[j], &set.traces[k], probe))
                    .map(|t| Choice { pi1: i, pi2: j, pi3: k, t })
            });
            match found {
                Some(c) => witnesses.push(c),
                None => {
                    return Ok(SemanticsVerdict {
                        semantics: Semantics::Unstructured,
                        member: false,
                        witnesses: vec![],
                        counterexamples: vec![Refutation { pi1: i, pi2: j, t: None }],
                    })
                }
            }
        }
    }
    Ok(SemanticsVerdict { semantics: Semantics::Unstructured, member: true, witnesses, counterexamples: vec![] })
}

pub fn check(set: &TraceSet, semantics: Semantics, x: &Var, y: &Var, z: &Var) -> Result<SemanticsVerdict, TraceError> {
    match semantics {
        Semantics::Strong => check_strong(set, x, y, z),
        Semantics::Aware => check_aware(set, x, y, z),
        Semantics::Unstructured => check_unstructured(set, x, y, z),
    }
}

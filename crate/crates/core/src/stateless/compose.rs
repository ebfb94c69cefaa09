//! Composition of stateless components and interfaces.

use crate::relalg::{alternating_paths, star, Pair, Relation, Var, VarSet};

use super::{derived_properties, InterfaceError, Signature, StatelessComponent, StatelessInterface};

/// Signature of a composite: outputs are unioned, and shared variables stop
/// being inputs.
pub fn signature_union(a: &Signature, b: &Signature) -> Signature {
    let outputs: VarSet = a.outputs().union(b.outputs()).cloned().collect();
    let inputs: VarSet = a.inputs().union(b.inputs()).filter(|v| !outputs.contains(*v)).cloned().collect();
    Signature { inputs, outputs }
}

fn overlap(a: &Signature, b: &Signature) -> Option<Var> {
    a.outputs().intersection(b.outputs()).next().cloned()
}

fn require_composable(a: &Signature, b: &Signature) -> Result<Signature, InterfaceError> {
    match overlap(a, b) {
        Some(v) => Err(InterfaceError::OutputsOverlap(v)),
        None => Ok(signature_union(a, b)),
    }
}

pub fn compose_components(f: &StatelessComponent, g: &StatelessComponent) -> Result<StatelessComponent, InterfaceError> {
    let sig = require_composable(&f.sig, &g.sig)?;
    compose_components_restricted(f, g, &sig.outputs.clone())
}

/// Composite flows restricted to pairs whose target lies in `targets`.
///
/// The result is generally not a flow relation, so it is returned without
/// that check.
pub fn compose_components_restricted(
    f: &StatelessComponent,
    g: &StatelessComponent,
    targets: &VarSet,
) -> Result<StatelessComponent, InterfaceError> {
    let sig = require_composable(&f.sig, &g.sig)?;
    let z = sig.all();
    let closed = star(&f.flows.union(&g.flows), &sig.outputs);
    let kept = closed.iter().filter(|(_, b)| targets.contains(b)).cloned();
    let flows = Relation::new(z, sig.outputs.clone(), kept).expect("closure stays inside Z×Y");
    Ok(StatelessComponent::raw(sig, flows))
}

pub fn composable(a: &StatelessInterface, b: &StatelessInterface) -> bool {
    overlap(&a.sig, &b.sig).is_none()
}

/// Flows the two implementations may jointly create, `¬G_{F,F'}`.
pub fn composite_flows(a: &StatelessInterface, b: &StatelessInterface) -> Result<Relation, InterfaceError> {
    let sig = require_composable(&a.sig, &b.sig)?;
    let flows = alternating_paths(&a.guarantee.complement(), &b.guarantee.complement(), &b.all(), a.outputs());
    Ok(flows.restrict(&sig.all(), &sig.outputs))
}

pub fn composite_guarantees(a: &StatelessInterface, b: &StatelessInterface) -> Result<Relation, InterfaceError> {
    let flows = composite_flows(a, b)?;
    Ok(flows.complement())
}

fn propagate(from: &StatelessInterface, to: &StatelessInterface, flows: &Relation, z: &VarSet) -> Vec<Pair> {
    let mut out = Vec::new();
    for s in from.inputs().intersection(to.outputs()) {
        let sources: Vec<&Var> = from.assumption.iter().filter(|(_, t)| t == s).map(|(a, _)| a).collect();
        if sources.is_empty() {
            continue;
        }
        for (w, t) in flows.iter() {
            if t != s || w == s || !z.contains(w) {
                continue;
            }
            for a in &sources {
                out.push(((*a).clone(), w.clone()));
            }
        }
    }
    out
}

/// Assumptions on shared variables pushed back to every variable that can
/// flow into them, in both directions.
pub fn propagated_assumptions(a: &StatelessInterface, b: &StatelessInterface) -> Result<Relation, InterfaceError> {
    let flows = composite_flows(a, b)?;
    let z = signature_union(&a.sig, &b.sig).all();
    let mut ps = propagate(a, b, &flows, &z);
    ps.extend(propagate(b, a, &flows, &z));
    Ok(Relation::new(z.clone(), z, ps).expect("propagated pairs stay in the composite"))
}

pub fn composite_assumptions(a: &StatelessInterface, b: &StatelessInterface) -> Result<Relation, InterfaceError> {
    let sig = require_composable(&a.sig, &b.sig)?;
    let hat = propagated_assumptions(a, b)?;
    Ok(a.assumption.union(&b.assumption).union(&hat).restrict(&sig.all(), &sig.inputs))
}

pub fn composite_properties(a: &StatelessInterface, b: &StatelessInterface) -> Result<Relation, InterfaceError> {
    let sig = require_composable(&a.sig, &b.sig)?;
    let z = sig.all();
    let derived = derived_properties(&composite_assumptions(a, b)?, &composite_guarantees(a, b)?, &z);
    Ok(a.property.union(&b.property).union(&derived).restrict(&z, &sig.outputs))
}

pub fn compose_interfaces(a: &StatelessInterface, b: &StatelessInterface) -> Result<StatelessInterface, InterfaceError> {
    let sig = require_composable(&a.sig, &b.sig)?;
    Ok(StatelessInterface::from_parts(
        sig,
        composite_assumptions(a, b)?,
        composite_guarantees(a, b)?,
        composite_properties(a, b)?,
    ))
}

/// Outcome of a compatibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    /// First shared output, when the operands are not composable.
    pub overlap: Option<Var>,
    /// Assumptions now targeting composite outputs that the composite does
    /// not guarantee.
    pub violations: Relation,
}

impl Compatibility {
    pub fn holds(&self) -> bool {
        self.overlap.is_none() && self.violations.is_empty()
    }
}

pub fn compatible(a: &StatelessInterface, b: &StatelessInterface) -> Compatibility {
    if let Some(v) = overlap(&a.sig, &b.sig) {
        return Compatibility { overlap: Some(v), violations: Relation::default() };
    }
    let sig = signature_union(&a.sig, &b.sig);
    let z = sig.all();
    let guarantees = composite_guarantees(a, b).expect("composable");
    let now_outputs = a.assumption.union(&b.assumption).restrict(&z, &sig.outputs);
    Compatibility { overlap: None, violations: now_outputs.difference(&guarantees) }
}

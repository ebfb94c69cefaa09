//! Refinement, shared refinement and repair suggestions.

use crate::relalg::{Pair, Relation};

use super::{is_well_formed, InterfaceError, Role, StatelessInterface, StepKind};

/// Outcome of `Fr ⪯ Fa`, listing what breaks each of the three inclusions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    /// Assumptions of the refined interface missing from the abstract one.
    pub extra_assumptions: Relation,
    /// Abstract guarantees the refined interface drops.
    pub missing_guarantees: Relation,
    /// Abstract properties the refined interface drops.
    pub missing_properties: Relation,
}

impl Refinement {
    pub fn holds(&self) -> bool {
        self.extra_assumptions.is_empty() && self.missing_guarantees.is_empty() && self.missing_properties.is_empty()
    }
}

pub fn refines(refined: &StatelessInterface, abstract_: &StatelessInterface) -> Result<Refinement, InterfaceError> {
    if refined.sig != abstract_.sig {
        return Err(InterfaceError::SignatureMismatch);
    }
    Ok(Refinement {
        extra_assumptions: refined.assumption.difference(&abstract_.assumption),
        missing_guarantees: abstract_.guarantee.difference(&refined.guarantee),
        missing_properties: abstract_.property.difference(&refined.property),
    })
}

fn guard_dropped(from: &StatelessInterface, other: &StatelessInterface) -> Vec<Pair> {
    let mut out = Vec::new();
    for (z, x) in from.assumption.iter() {
        if other.assumption.contains_pair(&(z.clone(), x.clone())) {
            continue;
        }
        for y in from.property.image(z) {
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

/// Guarantees that protect properties whose assumptions the other operand
/// drops, in both directions.
pub fn propagated_guarantees(a: &StatelessInterface, b: &StatelessInterface) -> Result<Relation, InterfaceError> {
    if a.sig != b.sig {
        return Err(InterfaceError::SignatureMismatch);
    }
    let mut ps = guard_dropped(a, b);
    ps.extend(guard_dropped(b, a));
    Ok(Relation::new(a.all(), a.outputs().clone(), ps).expect("guarded pairs target outputs"))
}

/// `F ⊓ F' = (X, Y, A ∩ A', G ∪ G' ∪ Ĝ, P ∪ P')`.
pub fn shared_refinement(a: &StatelessInterface, b: &StatelessInterface) -> Result<StatelessInterface, InterfaceError> {
    let hat = propagated_guarantees(a, b)?;
    Ok(StatelessInterface::from_parts(
        a.sig.clone(),
        a.assumption.intersection(&b.assumption),
        a.guarantee.union(&b.guarantee).union(&hat),
        a.property.union(&b.property),
    ))
}

/// One way to cut a witness path: add the edge to `A` (environment step) or
/// `G` (implementation step).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairCandidate {
    pub violation: Pair,
    pub role: Role,
    pub edge: Pair,
    pub interface: StatelessInterface,
}

pub fn suggest_repairs(iface: &StatelessInterface) -> Result<Vec<RepairCandidate>, InterfaceError> {
    let verdict = is_well_formed(iface);
    if verdict.holds() {
        return Err(InterfaceError::AlreadyWellFormed);
    }
    let mut out = Vec::new();
    for v in &verdict.violations {
        for (i, kind) in v.steps.iter().enumerate() {
            let edge = (v.path[i].clone(), v.path[i + 1].clone());
            let role = match kind {
                StepKind::Env => Role::Assumption,
                StepKind::Impl => Role::Guarantee,
            };
            out.push(RepairCandidate {
                violation: v.pair.clone(),
                role,
                interface: iface.with_added(role, edge.clone()),
                edge,
            });
        }
    }
    Ok(out)
}

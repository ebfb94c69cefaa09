//! Stateless components and interfaces.

mod compose;
mod refine;

use std::fmt;

use thiserror::Error;

use crate::relalg::{alternating_paths, alternating_witness, star, Pair, Relation, Step, Var, VarSet};

pub use compose::{
    compatible, compose_components, compose_components_restricted, compose_interfaces, composable,
    composite_assumptions, composite_flows, composite_guarantees, composite_properties,
    propagated_assumptions, signature_union, Compatibility,
};
pub use refine::{
    propagated_guarantees, refines, shared_refinement, suggest_repairs, Refinement, RepairCandidate,
};

/// Which relation of a component or interface a pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Assumption,
    Guarantee,
    Property,
    Flows,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Assumption => "assumption",
            Role::Guarantee => "guarantee",
            Role::Property => "property",
            Role::Flows => "flows",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterfaceError {
    #[error("variable `{0}` is declared both as input and output")]
    Overlap(Var),
    #[error("{role} pair {from} -> {to} is outside its allowed range")]
    OutOfRange { role: Role, from: Var, to: Var },
    #[error("flows are not a flow relation: {0}")]
    NotAFlowRelation(String),
    #[error("signatures do not match")]
    SignatureMismatch,
    #[error("outputs overlap on `{0}`")]
    OutputsOverlap(Var),
    #[error("interface is already well-formed")]
    AlreadyWellFormed,
}

/// Disjoint input and output variable sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    inputs: VarSet,
    outputs: VarSet,
}

impl Signature {
    pub fn new(inputs: VarSet, outputs: VarSet) -> Result<Self, InterfaceError> {
        if let Some(v) = inputs.intersection(&outputs).next() {
            return Err(InterfaceError::Overlap(v.clone()));
        }
        Ok(Signature { inputs, outputs })
    }

    pub fn inputs(&self) -> &VarSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &VarSet {
        &self.outputs
    }

    pub fn all(&self) -> VarSet {
        self.inputs.union(&self.outputs).cloned().collect()
    }

    /// Inputs and outputs swapped.
    pub fn reversed(&self) -> Signature {
        Signature { inputs: self.outputs.clone(), outputs: self.inputs.clone() }
    }
}

fn checked(role: Role, dom: &VarSet, cod: &VarSet, pairs: Vec<Pair>) -> Result<Relation, InterfaceError> {
    Relation::new(dom.clone(), cod.clone(), pairs).map_err(|e| match e {
        crate::relalg::RelationError::OutOfRange(from, to) => InterfaceError::OutOfRange { role, from, to },
    })
}

/// A component `(X, Y, M)` whose flows form a flow relation over `Z × Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatelessComponent {
    sig: Signature,
    flows: Relation,
}

impl StatelessComponent {
    /// With `normalize`, the flows are closed reflexively on the outputs and
    /// transitively; otherwise they must already be a flow relation.
    pub fn new<I>(inputs: VarSet, outputs: VarSet, flows: I, normalize: bool) -> Result<Self, InterfaceError>
    where
        I: IntoIterator<Item = Pair>,
    {
        let sig = Signature::new(inputs, outputs)?;
        let z = sig.all();
        let mut m = checked(Role::Flows, &z, &sig.outputs, flows.into_iter().collect())?;
        if normalize {
            m = star(&m, &sig.outputs).restrict(&z, &sig.outputs);
        } else {
            check_flow_relation(&m, &sig.outputs)?;
        }
        Ok(StatelessComponent { sig, flows: m })
    }

    /// Builds a component without the flow-relation check.
    pub(crate) fn raw(sig: Signature, flows: Relation) -> Self {
        StatelessComponent { sig, flows }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn inputs(&self) -> &VarSet {
        &self.sig.inputs
    }

    pub fn outputs(&self) -> &VarSet {
        &self.sig.outputs
    }

    pub fn flows(&self) -> &Relation {
        &self.flows
    }
}

fn check_flow_relation(m: &Relation, outputs: &VarSet) -> Result<(), InterfaceError> {
    if let Some(y) = outputs.iter().find(|y| !m.contains_pair(&((*y).clone(), (*y).clone()))) {
        return Err(InterfaceError::NotAFlowRelation(format!("missing reflexive pair {y} -> {y}")));
    }
    if let Some((a, b)) = m.compose(m).difference(m).iter().next() {
        return Err(InterfaceError::NotAFlowRelation(format!("missing transitive pair {a} -> {b}")));
    }
    Ok(())
}

/// Swaps inputs and outputs; the flows must be a flow relation for the
/// swapped signature.
pub fn invert_component(f: &StatelessComponent) -> Result<StatelessComponent, InterfaceError> {
    let sig = f.sig.reversed();
    let z = sig.all();
    let m = checked(Role::Flows, &z, &sig.outputs, f.flows.pairs().iter().cloned().collect())
        .map_err(|e| match e {
            InterfaceError::OutOfRange { from, to, .. } => {
                InterfaceError::NotAFlowRelation(format!("pair {from} -> {to} does not target an output"))
            }
            other => other,
        })?;
    check_flow_relation(&m, &sig.outputs)?;
    Ok(StatelessComponent { sig, flows: m })
}

/// An interface `(X, Y, A, G, P)` with `A ⊆ Z×X` and `G, P ⊆ Z×Y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatelessInterface {
    sig: Signature,
    assumption: Relation,
    guarantee: Relation,
    property: Relation,
}

impl StatelessInterface {
    pub fn new<A, G, P>(
        inputs: VarSet,
        outputs: VarSet,
        assumption: A,
        guarantee: G,
        property: P,
    ) -> Result<Self, InterfaceError>
    where
        A: IntoIterator<Item = Pair>,
        G: IntoIterator<Item = Pair>,
        P: IntoIterator<Item = Pair>,
    {
        let sig = Signature::new(inputs, outputs)?;
        let z = sig.all();
        let assumption = checked(Role::Assumption, &z, &sig.inputs, assumption.into_iter().collect())?;
        let guarantee = checked(Role::Guarantee, &z, &sig.outputs, guarantee.into_iter().collect())?;
        let property = checked(Role::Property, &z, &sig.outputs, property.into_iter().collect())?;
        Ok(StatelessInterface { sig, assumption, guarantee, property })
    }

    pub(crate) fn from_parts(sig: Signature, assumption: Relation, guarantee: Relation, property: Relation) -> Self {
        let z = sig.all();
        StatelessInterface {
            assumption: assumption.restrict(&z, &sig.inputs),
            guarantee: guarantee.restrict(&z, &sig.outputs),
            property: property.restrict(&z, &sig.outputs),
            sig,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn inputs(&self) -> &VarSet {
        &self.sig.inputs
    }

    pub fn outputs(&self) -> &VarSet {
        &self.sig.outputs
    }

    pub fn all(&self) -> VarSet {
        self.sig.all()
    }

    pub fn assumption(&self) -> &Relation {
        &self.assumption
    }

    pub fn guarantee(&self) -> &Relation {
        &self.guarantee
    }

    pub fn property(&self) -> &Relation {
        &self.property
    }

    pub fn relation(&self, role: Role) -> Option<&Relation> {
        match role {
            Role::Assumption => Some(&self.assumption),
            Role::Guarantee => Some(&self.guarantee),
            Role::Property => Some(&self.property),
            Role::Flows => None,
        }
    }

    /// Reflexive pairs of `A`, `G` and `P`.
    pub fn reflexive_pairs(&self) -> Vec<(Role, Var)> {
        [Role::Assumption, Role::Guarantee, Role::Property]
            .into_iter()
            .flat_map(|role| {
                self.relation(role)
                    .map(|r| r.reflexive_points())
                    .unwrap_or_default()
                    .into_iter()
                    .map(move |v| (role, v))
            })
            .collect()
    }

    pub(crate) fn with_added(&self, role: Role, pair: Pair) -> StatelessInterface {
        let mut next = self.clone();
        let target = match role {
            Role::Assumption => &mut next.assumption,
            Role::Guarantee => &mut next.guarantee,
            Role::Property => &mut next.property,
            Role::Flows => unreachable!("interfaces carry no flows"),
        };
        let mut ps = target.pairs().clone();
        ps.insert(pair);
        *target = Relation::new(target.domain().clone(), target.codomain().clone(), ps)
            .expect("added pair stays in range");
        next
    }
}

/// Outcome of a subset check, with the offending pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubsetCheck {
    pub offending: Relation,
}

impl SubsetCheck {
    pub fn holds(&self) -> bool {
        self.offending.is_empty()
    }
}

/// `f ⊨ F`: the flows avoid every guarantee.
pub fn implements(f: &StatelessComponent, iface: &StatelessInterface) -> Result<SubsetCheck, InterfaceError> {
    if f.sig != iface.sig {
        return Err(InterfaceError::SignatureMismatch);
    }
    Ok(SubsetCheck { offending: f.flows.intersection(&iface.guarantee) })
}

/// `e ⊨ F` for an environment with the reversed signature: its flows avoid
/// every assumption.
pub fn admissible_env(e: &StatelessComponent, iface: &StatelessInterface) -> Result<SubsetCheck, InterfaceError> {
    if e.sig != iface.sig.reversed() {
        return Err(InterfaceError::SignatureMismatch);
    }
    Ok(SubsetCheck { offending: e.flows.intersection(&iface.assumption) })
}

/// Pairs reachable by an environment/implementation alternation ending in an
/// implementation step.
pub fn reach_env_impl(iface: &StatelessInterface) -> Relation {
    alternating_paths(
        &iface.assumption.complement(),
        &iface.guarantee.complement(),
        &iface.all(),
        &VarSet::new(),
    )
}

/// Kind of a step on a well-formedness witness path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Env,
    Impl,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Env => "ENV",
            StepKind::Impl => "IMPL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: Pair,
    pub path: Vec<Var>,
    pub steps: Vec<StepKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WellFormedVerdict {
    /// Reflexive pairs found in `A`, `G` or `P`.
    pub reflexive: Vec<(Role, Var)>,
    pub violations: Vec<Violation>,
}

impl WellFormedVerdict {
    pub fn holds(&self) -> bool {
        self.reflexive.is_empty() && self.violations.is_empty()
    }
}

pub fn is_well_formed(iface: &StatelessInterface) -> WellFormedVerdict {
    let reach = reach_env_impl(iface);
    let not_a = iface.assumption.complement();
    let not_g = iface.guarantee.complement();
    let z = iface.all();
    let violations = reach
        .intersection(&iface.property)
        .iter()
        .map(|(a, b)| {
            let path = alternating_witness(&not_a, &not_g, &z, &VarSet::new(), a, b)
                .expect("reachable pair has a witness");
            Violation {
                pair: (a.clone(), b.clone()),
                path: path.vertices,
                steps: path
                    .steps
                    .into_iter()
                    .map(|s| match s {
                        Step::First => StepKind::Env,
                        Step::Second => StepKind::Impl,
                    })
                    .collect(),
            }
        })
        .collect();
    WellFormedVerdict { reflexive: iface.reflexive_pairs(), violations }
}

/// Guarantees that no admissible environment can defeat:
/// `G \ ((Id_Z ∪ ¬A) ∘ (¬G ∘ ¬A)* ∘ ¬G)`.
pub fn derived_properties(a: &Relation, g: &Relation, z: &VarSet) -> Relation {
    let reach = alternating_paths(&a.complement(), &g.complement(), z, &VarSet::new());
    g.difference(&reach)
}

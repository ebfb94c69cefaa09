//! State machines whose states carry stateless interfaces or components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::relalg::{Pair, Relation, Var};
use crate::stateless::{
    admissible_env, compatible, compose_components, compose_interfaces, implements, is_well_formed, refines,
    signature_union, Compatibility, InterfaceError, Role, Signature, StatelessComponent, StatelessInterface,
    WellFormedVerdict,
};

/// A state name. Product states are rendered `q⋈q'`, with nested products
/// parenthesized.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(Arc<str>);

impl StateId {
    pub fn new(name: &str) -> Self {
        StateId(Arc::from(name))
    }

    pub fn pair(left: &StateId, right: &StateId) -> Self {
        fn part(s: &StateId) -> String {
            if s.is_product() {
                format!("({})", s.0)
            } else {
                s.0.to_string()
            }
        }
        StateId(Arc::from(format!("{}⋈{}", part(left), part(right))))
    }

    pub fn is_product(&self) -> bool {
        self.0.contains('⋈')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId::new(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("unknown state `{0}`")]
    UnknownState(StateId),
    #[error("state `{0}` carries a payload whose signature differs from the machine's")]
    PayloadSignature(StateId),
    #[error("state `{state}`: {role} relates `{var}` to itself")]
    Reflexive { state: StateId, role: Role, var: Var },
    #[error("initial payloads are not compatible ({} offending assumption pairs)", .violations.len())]
    Incompatible { violations: Vec<Pair> },
    #[error(transparent)]
    Interface(#[from] InterfaceError),
}

/// Per-state data of a machine.
pub trait Payload: Clone {
    fn signature(&self) -> &Signature;
}

impl Payload for StatelessInterface {
    fn signature(&self) -> &Signature {
        StatelessInterface::signature(self)
    }
}

impl Payload for StatelessComponent {
    fn signature(&self) -> &Signature {
        StatelessComponent::signature(self)
    }
}

/// A finite machine over one signature with a payload on every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine<P> {
    sig: Signature,
    initial: StateId,
    transitions: BTreeMap<StateId, BTreeSet<StateId>>,
    labels: BTreeMap<StateId, P>,
}

pub type StatefulInterface = Machine<StatelessInterface>;
pub type StatefulComponent = Machine<StatelessComponent>;

impl<P: Payload> Machine<P> {
    fn assemble<T>(sig: Signature, initial: StateId, labels: BTreeMap<StateId, P>, transitions: T) -> Result<Self, MachineError>
    where
        T: IntoIterator<Item = (StateId, StateId)>,
    {
        if !labels.contains_key(&initial) {
            return Err(MachineError::UnknownState(initial));
        }
        if let Some((q, _)) = labels.iter().find(|(_, p)| p.signature() != &sig) {
            return Err(MachineError::PayloadSignature(q.clone()));
        }
        let mut delta: BTreeMap<StateId, BTreeSet<StateId>> =
            labels.keys().map(|q| (q.clone(), BTreeSet::new())).collect();
        for (from, to) in transitions {
            if !labels.contains_key(&to) {
                return Err(MachineError::UnknownState(to));
            }
            delta.get_mut(&from).ok_or(MachineError::UnknownState(from.clone()))?.insert(to);
        }
        Ok(Machine { sig, initial, transitions: delta, labels })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn initial(&self) -> &StateId {
        &self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = &StateId> {
        self.labels.keys()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn successors(&self, q: &StateId) -> Result<&BTreeSet<StateId>, MachineError> {
        self.transitions.get(q).ok_or_else(|| MachineError::UnknownState(q.clone()))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&StateId, &StateId)> {
        self.transitions.iter().flat_map(|(q, succ)| succ.iter().map(move |r| (q, r)))
    }

    /// The stateless payload of `q`.
    pub fn at(&self, q: &StateId) -> Result<&P, MachineError> {
        self.labels.get(q).ok_or_else(|| MachineError::UnknownState(q.clone()))
    }

    pub fn reachable(&self, from: &StateId) -> Result<BTreeSet<StateId>, MachineError> {
        self.at(from)?;
        let mut seen = BTreeSet::from([from.clone()]);
        let mut stack = vec![from.clone()];
        while let Some(q) = stack.pop() {
            for r in &self.transitions[&q] {
                if seen.insert(r.clone()) {
                    stack.push(r.clone());
                }
            }
        }
        Ok(seen)
    }
}

impl Machine<StatelessInterface> {
    /// Every state's `A`, `G` and `P` must be irreflexive.
    pub fn new<T>(
        sig: Signature,
        initial: StateId,
        labels: BTreeMap<StateId, StatelessInterface>,
        transitions: T,
    ) -> Result<Self, MachineError>
    where
        T: IntoIterator<Item = (StateId, StateId)>,
    {
        for (q, p) in &labels {
            if let Some((role, var)) = p.reflexive_pairs().into_iter().next() {
                return Err(MachineError::Reflexive { state: q.clone(), role, var });
            }
        }
        Self::assemble(sig, initial, labels, transitions)
    }
}

impl Machine<StatelessComponent> {
    pub fn new<T>(
        sig: Signature,
        initial: StateId,
        labels: BTreeMap<StateId, StatelessComponent>,
        transitions: T,
    ) -> Result<Self, MachineError>
    where
        T: IntoIterator<Item = (StateId, StateId)>,
    {
        Self::assemble(sig, initial, labels, transitions)
    }
}

pub fn stateless_at<P: Payload>(m: &Machine<P>, q: &StateId) -> Result<P, MachineError> {
    m.at(q).cloned()
}

pub fn reachable<P: Payload>(m: &Machine<P>, from: &StateId) -> Result<BTreeSet<StateId>, MachineError> {
    m.reachable(from)
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StatefulWellFormed {
    pub states: BTreeMap<StateId, WellFormedVerdict>,
    /// Unreachable states, not checked.
    pub skipped: BTreeSet<StateId>,
}

impl StatefulWellFormed {
    pub fn holds(&self) -> bool {
        self.states.values().all(WellFormedVerdict::holds)
    }
}

pub fn is_well_formed_stateful(m: &StatefulInterface) -> StatefulWellFormed {
    let reach = m.reachable(&m.initial).expect("initial state exists");
    let mut out = StatefulWellFormed::default();
    for (q, p) in &m.labels {
        if reach.contains(q) {
            out.states.insert(q.clone(), is_well_formed(p));
        } else {
            out.skipped.insert(q.clone());
        }
    }
    out
}

/// Result of a fixpoint check between two machines.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Simulation {
    pub holds: bool,
    /// Surviving pairs reachable from the initial pair by joint steps; empty
    /// when the check fails.
    pub witness: BTreeSet<(StateId, StateId)>,
}

type PairSet = BTreeSet<(StateId, StateId)>;

fn greatest_fixpoint<F>(mut h: PairSet, keep: F) -> PairSet
where
    F: Fn(&(StateId, StateId), &PairSet) -> bool,
{
    loop {
        let doomed: Vec<_> = h.iter().filter(|p| !keep(p, &h)).cloned().collect();
        if doomed.is_empty() {
            return h;
        }
        for p in doomed {
            h.remove(&p);
        }
    }
}

fn settle<L, R>(h: PairSet, start: (StateId, StateId), left: &Machine<L>, right: &Machine<R>) -> Simulation
where
    L: Payload,
    R: Payload,
{
    if !h.contains(&start) {
        return Simulation { holds: false, witness: BTreeSet::new() };
    }
    let mut seen = BTreeSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some((a, b)) = stack.pop() {
        for a2 in &left.transitions[&a] {
            for b2 in &right.transitions[&b] {
                let p = (a2.clone(), b2.clone());
                if h.contains(&p) && seen.insert(p.clone()) {
                    stack.push(p);
                }
            }
        }
    }
    Simulation { holds: true, witness: seen }
}

fn all_pairs<L, R>(left: &Machine<L>, right: &Machine<R>, base: impl Fn(&L, &R) -> bool) -> PairSet {
    let mut out = BTreeSet::new();
    for (a, la) in &left.labels {
        for (b, lb) in &right.labels {
            if base(la, lb) {
                out.insert((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// `f ⊨ F`: every component move is matched by an interface move.
pub fn implements_stateful(f: &StatefulComponent, iface: &StatefulInterface) -> Result<Simulation, MachineError> {
    if f.sig != iface.sig {
        return Err(InterfaceError::SignatureMismatch.into());
    }
    let h0 = all_pairs(f, iface, |c, i| implements(c, i).map(|r| r.holds()).unwrap_or(false));
    let h = greatest_fixpoint(h0, |(qf, q), h| {
        f.transitions[qf]
            .iter()
            .all(|qf2| iface.transitions[q].iter().any(|q2| h.contains(&(qf2.clone(), q2.clone()))))
    });
    Ok(settle(h, (f.initial.clone(), iface.initial.clone()), f, iface))
}

/// `e ⊨ F` for an environment machine with the reversed signature: every
/// interface move is matched by an environment move. Witness pairs are
/// `(interface state, environment state)`.
pub fn admissible_env_stateful(e: &StatefulComponent, iface: &StatefulInterface) -> Result<Simulation, MachineError> {
    if e.sig != iface.sig.reversed() {
        return Err(InterfaceError::SignatureMismatch.into());
    }
    let h0 = all_pairs(iface, e, |i, c| admissible_env(c, i).map(|r| r.holds()).unwrap_or(false));
    let h = greatest_fixpoint(h0, |(q, qe), h| {
        iface.transitions[q]
            .iter()
            .all(|q2| e.transitions[qe].iter().any(|qe2| h.contains(&(q2.clone(), qe2.clone()))))
    });
    Ok(settle(h, (iface.initial.clone(), e.initial.clone()), iface, e))
}

/// Full synchronous product with per-state component composition.
pub fn compose_stateful_components(
    f: &StatefulComponent,
    g: &StatefulComponent,
) -> Result<StatefulComponent, MachineError> {
    let sig = signature_union(&f.sig, &g.sig);
    let mut labels = BTreeMap::new();
    let mut edges = Vec::new();
    for (a, la) in &f.labels {
        for (b, lb) in &g.labels {
            let id = StateId::pair(a, b);
            labels.insert(id.clone(), compose_components(la, lb)?);
            for a2 in &f.transitions[a] {
                for b2 in &g.transitions[b] {
                    edges.push((id.clone(), StateId::pair(a2, b2)));
                }
            }
        }
    }
    StatefulComponent::new(sig, StateId::pair(&f.initial, &g.initial), labels, edges)
}

/// Stateless compatibility of the initial payloads.
pub fn compatible_stateful(a: &StatefulInterface, b: &StatefulInterface) -> Compatibility {
    compatible(&a.labels[&a.initial], &b.labels[&b.initial])
}

/// Product keeping the initial pair and every compatible pair; transitions
/// into dropped pairs are removed.
pub fn compose_stateful_interfaces(
    a: &StatefulInterface,
    b: &StatefulInterface,
) -> Result<StatefulInterface, MachineError> {
    if let Some(v) = a.sig.outputs().intersection(b.sig.outputs()).next() {
        return Err(InterfaceError::OutputsOverlap(v.clone()).into());
    }
    let init = compatible_stateful(a, b);
    if !init.holds() {
        return Err(MachineError::Incompatible { violations: init.violations.iter().cloned().collect() });
    }
    let sig = signature_union(&a.sig, &b.sig);
    let mut kept: BTreeMap<(StateId, StateId), StateId> = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for (qa, la) in &a.labels {
        for (qb, lb) in &b.labels {
            let is_init = qa == &a.initial && qb == &b.initial;
            if is_init || compatible(la, lb).holds() {
                let id = StateId::pair(qa, qb);
                labels.insert(id.clone(), compose_interfaces(la, lb)?);
                kept.insert((qa.clone(), qb.clone()), id);
            }
        }
    }
    let mut edges = Vec::new();
    for ((qa, qb), id) in &kept {
        for a2 in &a.transitions[qa] {
            for b2 in &b.transitions[qb] {
                if let Some(to) = kept.get(&(a2.clone(), b2.clone())) {
                    edges.push((id.clone(), to.clone()));
                }
            }
        }
    }
    StatefulInterface::new(sig, StateId::pair(&a.initial, &b.initial), labels, edges)
}

/// Which successor groups the alternating refinement ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GroupMode {
    /// Only labelings that occur among the successors.
    #[default]
    Occurring,
    /// Every labeling; those that occur nowhere contribute one empty group.
    Literal,
}

fn group_by<K: Ord + Clone>(m: &StatefulInterface, q: &StateId, key: impl Fn(&StatelessInterface) -> K) -> Result<Vec<(K, BTreeSet<StateId>)>, MachineError> {
    let mut groups: BTreeMap<K, BTreeSet<StateId>> = BTreeMap::new();
    for r in m.successors(q)? {
        groups.entry(key(&m.labels[r])).or_default().insert(r.clone());
    }
    Ok(groups.into_iter().collect())
}

/// Successors of `q` grouped by their assumption.
pub fn input_transitions(m: &StatefulInterface, q: &StateId) -> Result<Vec<(Relation, BTreeSet<StateId>)>, MachineError> {
    group_by(m, q, |p| p.assumption().clone())
}

/// Successors sharing one guarantee and property.
pub type OutputGroup = ((Relation, Relation), BTreeSet<StateId>);

/// Successors of `q` grouped by their guarantee and property.
pub fn output_transitions(m: &StatefulInterface, q: &StateId) -> Result<Vec<OutputGroup>, MachineError> {
    group_by(m, q, |p| (p.guarantee().clone(), p.property().clone()))
}

fn labeling_count_exceeds(pairs: usize, occurring: usize) -> bool {
    pairs >= 63 || (1u64 << pairs) > occurring as u64
}

fn families(m: &StatefulInterface, q: &StateId, mode: GroupMode) -> (Vec<BTreeSet<StateId>>, Vec<BTreeSet<StateId>>) {
    let ins = input_transitions(m, q).expect("known state");
    let outs = output_transitions(m, q).expect("known state");
    let z = m.sig.all().len();
    let in_rect = z * m.sig.inputs().len();
    let out_rect = 2 * z * m.sig.outputs().len();
    let mut i: Vec<_> = ins.into_iter().map(|(_, s)| s).collect();
    let mut o: Vec<_> = outs.into_iter().map(|(_, s)| s).collect();
    if mode == GroupMode::Literal {
        if labeling_count_exceeds(in_rect, i.len()) {
            i.push(BTreeSet::new());
        }
        if labeling_count_exceeds(out_rect, o.len()) {
            o.push(BTreeSet::new());
        }
    }
    (i, o)
}

pub fn refines_stateful(refined: &StatefulInterface, abstract_: &StatefulInterface) -> Result<Simulation, MachineError> {
    refines_stateful_with(refined, abstract_, GroupMode::Occurring)
}

/// Alternating refinement: each output group of the refined state is answered
/// by an output group of the abstract state such that every abstract input
/// group is answered by a refined input group, with all resulting pairs
/// related.
pub fn refines_stateful_with(
    refined: &StatefulInterface,
    abstract_: &StatefulInterface,
    mode: GroupMode,
) -> Result<Simulation, MachineError> {
    if refined.sig != abstract_.sig {
        return Err(InterfaceError::SignatureMismatch.into());
    }
    let fr: BTreeMap<_, _> = refined.labels.keys().map(|q| (q.clone(), families(refined, q, mode))).collect();
    let fa: BTreeMap<_, _> = abstract_.labels.keys().map(|q| (q.clone(), families(abstract_, q, mode))).collect();
    let h0 = all_pairs(refined, abstract_, |r, a| refines(r, a).map(|v| v.holds()).unwrap_or(false));
    let h = greatest_fixpoint(h0, |(qr, qa), h| {
        let (in_r, out_r) = &fr[qr];
        let (in_a, out_a) = &fa[qa];
        out_r.iter().all(|o| {
            out_a.iter().any(|o2| {
                in_a.iter().all(|i2| {
                    in_r.iter().any(|i| {
                        o.intersection(i).all(|r| o2.intersection(i2).all(|a| h.contains(&(r.clone(), a.clone()))))
                    })
                })
            })
        })
    });
    Ok(settle(h, (refined.initial.clone(), abstract_.initial.clone()), refined, abstract_))
}

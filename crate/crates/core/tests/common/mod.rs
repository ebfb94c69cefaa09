#![allow(dead_code)]

pub mod laws;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flowif::hypersem::TraceSet;
use flowif::relalg::{star, Pair, Relation, Var, VarSet};
use flowif::speclang::{Item, SpecDocument};
use flowif::stateful::{compose_stateful_interfaces, Machine, Payload, StateId, StatefulComponent, StatefulInterface};
use flowif::stateless::{
    admissible_env, derived_properties, implements, is_well_formed, refines, Signature, StatelessComponent,
    StatelessInterface, StepKind, Violation,
};

const MAX_DOC_VARS: usize = 5;

pub type Edge = (String, String);
pub type EdgeSet = BTreeSet<Edge>;

/// Seeded source of random relations, interfaces, components, machines and
/// trace sets.
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn density(&mut self) -> f64 {
        [0.1, 0.25, 0.4, 0.6][self.range(0, 3)]
    }

    pub fn pool(n: usize) -> Vec<Var> {
        (0..n).map(|i| Var::new(&format!("v{i}"))).collect()
    }

    pub fn subset<T: Clone>(&mut self, items: impl IntoIterator<Item = T>, p: f64) -> Vec<T> {
        items.into_iter().filter(|_| self.rng.gen_bool(p)).collect()
    }

    pub fn pairs(&mut self, dom: &VarSet, cod: &VarSet, p: f64, irreflexive: bool) -> Vec<Pair> {
        let mut out = Vec::new();
        for a in dom {
            for b in cod {
                if irreflexive && a == b {
                    continue;
                }
                if self.rng.gen_bool(p) {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    pub fn relation(&mut self, dom: &VarSet, cod: &VarSet, p: f64) -> Relation {
        let ps = self.pairs(dom, cod, p, false);
        Relation::new(dom.clone(), cod.clone(), ps).unwrap()
    }

    /// A signature over `v0..` with at most `max_vars` variables.
    pub fn signature(&mut self, max_vars: usize) -> (VarSet, VarSet) {
        let n = self.range(1, max_vars);
        let mut x = VarSet::new();
        let mut y = VarSet::new();
        for v in Self::pool(n) {
            if self.coin(0.5) {
                x.insert(v);
            } else {
                y.insert(v);
            }
        }
        (x, y)
    }

    /// Irreflexive random `A`, `G`, `P`.
    pub fn interface(&mut self, x: &VarSet, y: &VarSet) -> StatelessInterface {
        let z: VarSet = x.union(y).cloned().collect();
        let d = self.density();
        let a = self.pairs(&z, x, d, true);
        let d = self.density();
        let g = self.pairs(&z, y, d, true);
        let d = self.density();
        let p = self.pairs(&z, y, d, true);
        StatelessInterface::new(x.clone(), y.clone(), a, g, p).unwrap()
    }

    /// Random `A`, `G` with `P` drawn from the derived properties.
    pub fn well_formed(&mut self, x: &VarSet, y: &VarSet) -> StatelessInterface {
        let z: VarSet = x.union(y).cloned().collect();
        let d = self.density();
        let a = self.pairs(&z, x, d, true);
        let d = self.density();
        let g = self.pairs(&z, y, d, true);
        let ra = Relation::new(z.clone(), x.clone(), a.clone()).unwrap();
        let rg = Relation::new(z.clone(), y.clone(), g.clone()).unwrap();
        let derived = derived_properties(&ra, &rg, &z);
        let p = self.subset(derived.iter().cloned(), 0.7);
        let f = StatelessInterface::new(x.clone(), y.clone(), a, g, p).unwrap();
        debug_assert!(is_well_formed(&f).holds());
        f
    }

    /// Output sets of `k` composable operands plus their inputs, drawn from a
    /// shared pool so that variables become shared. With `disjoint_inputs`
    /// no variable is an input of two operands.
    pub fn composable_signatures(&mut self, k: usize, max_vars: usize, disjoint_inputs: bool) -> Vec<(VarSet, VarSet)> {
        let n = self.range(2, max_vars);
        let pool = Self::pool(n);
        let mut ys = vec![VarSet::new(); k];
        for v in &pool {
            let slot = self.range(0, k);
            if slot < k {
                ys[slot].insert(v.clone());
            }
        }
        let mut used_inputs = VarSet::new();
        let mut out = Vec::new();
        for y in ys {
            let mut x = VarSet::new();
            for v in &pool {
                if y.contains(v) || (disjoint_inputs && used_inputs.contains(v)) {
                    continue;
                }
                if self.coin(0.5) {
                    x.insert(v.clone());
                }
            }
            used_inputs.extend(x.iter().cloned());
            out.push((x, y));
        }
        out
    }

    /// A component `f ⊨ F`.
    pub fn implementation(&mut self, f: &StatelessInterface) -> StatelessComponent {
        let allowed = f.guarantee().complement();
        for _ in 0..8 {
            let d = self.density();
            let m = self.subset(allowed.iter().cloned(), d);
            let c = StatelessComponent::new(f.inputs().clone(), f.outputs().clone(), m, true).unwrap();
            if implements(&c, f).unwrap().holds() {
                return c;
            }
        }
        StatelessComponent::new(f.inputs().clone(), f.outputs().clone(), vec![], true).unwrap()
    }

    /// A component over the reversed signature with `e ⊨ F`.
    pub fn environment(&mut self, f: &StatelessInterface) -> StatelessComponent {
        let allowed = f.assumption().complement();
        for _ in 0..8 {
            let d = self.density();
            let m = self.subset(allowed.iter().cloned(), d);
            let c = StatelessComponent::new(f.outputs().clone(), f.inputs().clone(), m, true).unwrap();
            if admissible_env(&c, f).unwrap().holds() {
                return c;
            }
        }
        StatelessComponent::new(f.outputs().clone(), f.inputs().clone(), vec![], true).unwrap()
    }

    /// Any component over a signature.
    pub fn component(&mut self, x: &VarSet, y: &VarSet) -> StatelessComponent {
        let z: VarSet = x.union(y).cloned().collect();
        let d = self.density();
        let m = self.pairs(&z, y, d / 2.0, true);
        StatelessComponent::new(x.clone(), y.clone(), m, true).unwrap()
    }

    /// A well-formed `F' ⪯ F`; falls back to `F` itself.
    pub fn refinement_of(&mut self, f: &StatelessInterface) -> StatelessInterface {
        let z = f.all();
        for _ in 0..8 {
            let a = self.subset(f.assumption().iter().cloned(), 0.6);
            let d = self.density();
            let mut g: Vec<Pair> = f.guarantee().iter().cloned().collect();
            g.extend(self.pairs(&z, f.outputs(), d / 2.0, true));
            let ra = Relation::new(z.clone(), f.inputs().clone(), a.clone()).unwrap();
            let rg = Relation::new(z.clone(), f.outputs().clone(), g.clone()).unwrap();
            let derived = derived_properties(&ra, &rg, &z);
            let mut p: Vec<Pair> = f.property().iter().cloned().collect();
            p.extend(self.subset(derived.iter().cloned(), 0.5));
            let r = StatelessInterface::new(f.inputs().clone(), f.outputs().clone(), a, g, p).unwrap();
            if is_well_formed(&r).holds() && refines(&r, f).unwrap().holds() {
                return r;
            }
        }
        f.clone()
    }

    fn shape(&mut self, max_states: usize) -> (Vec<StateId>, Vec<(StateId, StateId)>) {
        let n = self.range(1, max_states);
        let states: Vec<StateId> = (0..n).map(|i| StateId::new(&format!("s{i}"))).collect();
        let mut edges = Vec::new();
        for q in &states {
            let k = if self.coin(0.1) { 0 } else { self.range(1, 2.min(n)) };
            let mut succ = states.clone();
            succ.shuffle(&mut self.rng);
            for r in succ.into_iter().take(k) {
                edges.push((q.clone(), r));
            }
        }
        (states, edges)
    }

    /// Payloads come from a small palette so that states share labelings.
    pub fn stateful_interface(&mut self, x: &VarSet, y: &VarSet, max_states: usize, well_formed: bool) -> StatefulInterface {
        let (states, edges) = self.shape(max_states);
        let palette_len = self.range(1, 3);
        let palette: Vec<StatelessInterface> = (0..palette_len)
            .map(|_| if well_formed { self.well_formed(x, y) } else { self.interface(x, y) })
            .collect();
        let labels = states.iter().map(|q| (q.clone(), palette[self.range(0, palette_len - 1)].clone())).collect();
        let sig = Signature::new(x.clone(), y.clone()).unwrap();
        StatefulInterface::new(sig, states[0].clone(), labels, edges).unwrap()
    }

    /// Same shape with a subset of the moves and an implementation per
    /// state; implements `m` by the identity relation.
    pub fn stateful_implementation(&mut self, m: &StatefulInterface) -> StatefulComponent {
        let labels = m.states().map(|q| (q.clone(), self.implementation(m.at(q).unwrap()))).collect();
        let edges: Vec<_> = m.transitions().map(|(a, b)| (a.clone(), b.clone())).collect();
        let edges = self.subset(edges, 0.8);
        StatefulComponent::new(m.signature().clone(), m.initial().clone(), labels, edges).unwrap()
    }

    /// Same shape over the reversed signature, every move kept, with an
    /// admissible environment per state.
    pub fn stateful_environment(&mut self, m: &StatefulInterface) -> StatefulComponent {
        let labels = m.states().map(|q| (q.clone(), self.environment(m.at(q).unwrap()))).collect();
        let edges: Vec<_> = m.transitions().map(|(a, b)| (a.clone(), b.clone())).collect();
        StatefulComponent::new(m.signature().reversed(), m.initial().clone(), labels, edges).unwrap()
    }

    /// Same shape with per-state refinements; labels that were shared stay
    /// shared.
    pub fn stateful_refinement_of(&mut self, m: &StatefulInterface) -> StatefulInterface {
        let mut memo: BTreeMap<StatelessInterface, StatelessInterface> = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for q in m.states() {
            let p = m.at(q).unwrap();
            let r = match memo.get(p) {
                Some(r) => r.clone(),
                None => {
                    let r = self.refinement_of(p);
                    memo.insert(p.clone(), r.clone());
                    r
                }
            };
            labels.insert(q.clone(), r);
        }
        let edges: Vec<_> = m.transitions().map(|(a, b)| (a.clone(), b.clone())).collect();
        StatefulInterface::new(m.signature().clone(), m.initial().clone(), labels, edges).unwrap()
    }

    /// A document mixing all four declaration kinds, occasionally with a
    /// composed machine so that product state names appear.
    pub fn document(&mut self, max_decls: usize) -> SpecDocument {
        let mut doc = SpecDocument::default();
        for i in 0..self.range(1, max_decls) {
            let (x, y) = self.signature(MAX_DOC_VARS);
            let item = match self.range(0, 3) {
                0 => Item::Interface(self.interface(&x, &y)),
                1 => Item::Component(self.component(&x, &y)),
                2 => {
                    let m = self.stateful_interface(&x, &y, 3, false);
                    if self.coin(0.3) {
                        let sigs = self.composable_signatures(2, MAX_DOC_VARS, false);
                        let a = self.stateful_interface(&sigs[0].0, &sigs[0].1, 2, false);
                        let b = self.stateful_interface(&sigs[1].0, &sigs[1].1, 2, false);
                        match compose_stateful_interfaces(&a, &b) {
                            Ok(ab) => Item::StatefulInterface(ab),
                            Err(_) => Item::StatefulInterface(m),
                        }
                    } else {
                        Item::StatefulInterface(m)
                    }
                }
                _ => {
                    let m = self.stateful_interface(&x, &y, 3, false);
                    Item::StatefulComponent(self.stateful_implementation(&m))
                }
            };
            doc.push(format!("D{i}"), item);
        }
        doc
    }

    /// Trace sets over `x`, `y`, `z` built from a small palette of
    /// valuations.
    pub fn trace_set(&mut self, max_traces: usize, max_len: usize) -> TraceSet {
        let names = ["x", "y", "z"];
        let palette_len = self.range(1, 4);
        let palette: Vec<BTreeMap<Var, bool>> =
            (0..palette_len).map(|_| names.iter().map(|n| (Var::new(n), self.coin(0.5))).collect()).collect();
        let k = self.range(1, max_traces);
        let traces = (0..k)
            .map(|_| {
                let len = self.range(1, max_len);
                (0..len).map(|_| palette[self.range(0, palette_len - 1)].clone()).collect()
            })
            .collect();
        TraceSet::new(names.iter().map(|n| Var::new(n)).collect(), traces).unwrap()
    }
}

pub fn edges(r: &Relation) -> EdgeSet {
    r.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

pub fn names(v: &VarSet) -> BTreeSet<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn compose_edges(r: &EdgeSet, s: &EdgeSet) -> EdgeSet {
    let mut out = EdgeSet::new();
    for (a, b) in r {
        for (c, d) in s {
            if b == c {
                out.insert((a.clone(), d.clone()));
            }
        }
    }
    out
}

/// `r⁺` by repeated squaring-free iteration.
pub fn plus(r: &EdgeSet) -> EdgeSet {
    let mut acc = r.clone();
    loop {
        let next: EdgeSet = acc.union(&compose_edges(&acc, r)).cloned().collect();
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

/// `r*` reflexive over `v`, by naive path search.
pub fn closure(r: &EdgeSet, v: &BTreeSet<String>) -> EdgeSet {
    let mut out: EdgeSet = v.iter().map(|x| (x.clone(), x.clone())).collect();
    out.extend(plus(r));
    out
}

/// Alternating walks enumerated layer by layer up to `2·|U|² + 2` steps.
/// A walk from `a` to `b` counts when it starts with a `first` step or `a`
/// is in `head`, and ends with a `second` step or `b` is in `tail`.
pub fn enumerate_alternating(
    first: &EdgeSet,
    second: &EdgeSet,
    head: &BTreeSet<String>,
    tail: &BTreeSet<String>,
) -> EdgeSet {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum L {
        F,
        S,
    }
    let mut universe: BTreeSet<String> = head.union(tail).cloned().collect();
    for (a, b) in first.iter().chain(second) {
        universe.insert(a.clone());
        universe.insert(b.clone());
    }
    let bound = 2 * universe.len() * universe.len() + 2;
    let mut out = EdgeSet::new();
    for a in &universe {
        let mut layer: BTreeSet<(String, Option<L>, Option<L>)> = BTreeSet::from([(a.clone(), None, None)]);
        for depth in 0..=bound {
            for (b, f, l) in &layer {
                let start_ok = *f == Some(L::F) || head.contains(a);
                let end_ok = *l == Some(L::S) || tail.contains(b);
                if start_ok && end_ok {
                    out.insert((a.clone(), b.clone()));
                }
            }
            if depth == bound {
                break;
            }
            let mut next = BTreeSet::new();
            for (v, f, l) in &layer {
                for (kind, rel) in [(L::F, first), (L::S, second)] {
                    if *l == Some(kind) {
                        continue;
                    }
                    for (x, w) in rel {
                        if x == v {
                            next.insert((w.clone(), f.or(Some(kind)), Some(kind)));
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layer = next;
        }
    }
    out
}

/// The expanded union form of composite flows, restricted to the composite
/// rectangle.
pub fn expanded_union(a: &StatelessInterface, b: &StatelessInterface) -> EdgeSet {
    let g1 = edges(&a.guarantee().complement());
    let g2 = edges(&b.guarantee().complement());
    let p12 = plus(&compose_edges(&g1, &g2));
    let p21 = plus(&compose_edges(&g2, &g1));
    let mut all: EdgeSet = g1.union(&g2).cloned().collect();
    all.extend(p12.iter().cloned());
    all.extend(p21.iter().cloned());
    all.extend(compose_edges(&p21, &g2));
    all.extend(compose_edges(&p12, &g1));
    let outputs: BTreeSet<String> = names(a.outputs()).union(&names(b.outputs())).cloned().collect();
    let z: BTreeSet<String> = names(&a.all()).union(&names(&b.all())).cloned().collect();
    all.into_iter().filter(|(x, y)| z.contains(x) && outputs.contains(y)).collect()
}

/// Checks a well-formedness witness against the raw relations.
pub fn valid_violation(f: &StatelessInterface, v: &Violation) -> bool {
    if v.path.len() != v.steps.len() + 1 || v.steps.is_empty() {
        return false;
    }
    if v.path.first() != Some(&v.pair.0) || v.path.last() != Some(&v.pair.1) {
        return false;
    }
    if !f.property().contains_pair(&v.pair) || v.steps.last() != Some(&StepKind::Impl) {
        return false;
    }
    let z = f.all();
    for (i, kind) in v.steps.iter().enumerate() {
        if i > 0 && v.steps[i - 1] == *kind {
            return false;
        }
        let (a, b) = (&v.path[i], &v.path[i + 1]);
        if !z.contains(a) || !z.contains(b) {
            return false;
        }
        let allowed = match kind {
            StepKind::Env => f.inputs().contains(b) && !f.assumption().contains(a.as_str(), b.as_str()),
            StepKind::Impl => f.outputs().contains(b) && !f.guarantee().contains(a.as_str(), b.as_str()),
        };
        if !allowed {
            return false;
        }
    }
    true
}

/// A relation on state pairs contains `start` and every pair satisfies
/// `base` and the forward step condition `left moves ⇒ right answers`.
pub fn closed_simulation<L: Payload, R: Payload>(
    h: &BTreeSet<(StateId, StateId)>,
    left: &Machine<L>,
    right: &Machine<R>,
    base: impl Fn(&L, &R) -> bool,
) -> bool {
    if !h.contains(&(left.initial().clone(), right.initial().clone())) {
        return false;
    }
    h.iter().all(|(a, b)| {
        base(left.at(a).unwrap(), right.at(b).unwrap())
            && left
                .successors(a)
                .unwrap()
                .iter()
                .all(|a2| right.successors(b).unwrap().iter().any(|b2| h.contains(&(a2.clone(), b2.clone()))))
    })
}

/// Successor groups keyed by a labeling.
fn groups<K: Ord>(m: &StatefulInterface, q: &StateId, key: impl Fn(&StatelessInterface) -> K) -> Vec<BTreeSet<StateId>> {
    let mut g: BTreeMap<K, BTreeSet<StateId>> = BTreeMap::new();
    for r in m.successors(q).unwrap() {
        g.entry(key(m.at(r).unwrap())).or_default().insert(r.clone());
    }
    g.into_values().collect()
}

/// Checks the alternating refinement condition on a candidate relation.
pub fn closed_refinement(h: &BTreeSet<(StateId, StateId)>, refined: &StatefulInterface, abstract_: &StatefulInterface) -> bool {
    if !h.contains(&(refined.initial().clone(), abstract_.initial().clone())) {
        return false;
    }
    h.iter().all(|(qr, qa)| {
        if !refines(refined.at(qr).unwrap(), abstract_.at(qa).unwrap()).unwrap().holds() {
            return false;
        }
        let out_r = groups(refined, qr, |p| (p.guarantee().clone(), p.property().clone()));
        let in_r = groups(refined, qr, |p| p.assumption().clone());
        let out_a = groups(abstract_, qa, |p| (p.guarantee().clone(), p.property().clone()));
        let in_a = groups(abstract_, qa, |p| p.assumption().clone());
        out_r.iter().all(|o| {
            out_a.iter().any(|o2| {
                in_a.iter().all(|i2| {
                    in_r.iter().any(|i| {
                        o.intersection(i).all(|r| o2.intersection(i2).all(|a| h.contains(&(r.clone(), a.clone()))))
                    })
                })
            })
        })
    })
}

pub fn star_edges(r: &Relation, over: &VarSet) -> EdgeSet {
    edges(&star(r, over))
}

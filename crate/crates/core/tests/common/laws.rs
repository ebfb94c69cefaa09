//! Randomized laws shared by the acceptance run and the property tests. Each
//! law draws one instance; instances that miss the law's premise are skipped.

use flowif::hypersem::{check_aware, check_strong, check_unstructured, TraceSet};
use flowif::relalg::{Var, VarSet};
use flowif::stateful::{
    admissible_env_stateful, compatible_stateful, compose_stateful_components, compose_stateful_interfaces,
    implements_stateful, is_well_formed_stateful, refines_stateful, MachineError, StatefulInterface,
};
use flowif::stateless::{
    admissible_env, compatible, compose_components, compose_components_restricted, compose_interfaces,
    derived_properties, implements, is_well_formed, refines, shared_refinement, StatelessInterface,
};

use super::{closure, edges, names, valid_violation, Gen};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    Skip,
    Pass,
    Fail(String),
}

fn verdict(ok: bool, what: impl FnOnce() -> String) -> Case {
    if ok {
        Case::Pass
    } else {
        Case::Fail(what())
    }
}

pub type Law = fn(&mut Gen) -> Case;

pub const MAX_VARS: usize = 6;
pub const MAX_STATES: usize = 4;

pub fn well_formed_iff_derived(g: &mut Gen) -> Case {
    let (x, y) = g.signature(MAX_VARS);
    let mut f = g.interface(&x, &y);
    if g.coin(0.1) && !y.is_empty() {
        let v = y.iter().next().unwrap().clone();
        let mut p: Vec<_> = f.property().iter().cloned().collect();
        p.push((v.clone(), v));
        f = StatelessInterface::new(x.clone(), y.clone(), f.assumption().iter().cloned(), f.guarantee().iter().cloned(), p).unwrap();
    }
    let v = is_well_formed(&f);
    let d = derived_properties(f.assumption(), f.guarantee(), &f.all());
    let expected = f.reflexive_pairs().is_empty() && f.property().is_subset(&d);
    let witnesses_ok = v.violations.iter().all(|w| valid_violation(&f, w));
    verdict(v.holds() == expected && witnesses_ok, || format!("{f:?}"))
}

fn pair(g: &mut Gen, well_formed: bool, disjoint_inputs: bool) -> (StatelessInterface, StatelessInterface) {
    let sigs = g.composable_signatures(2, MAX_VARS, disjoint_inputs);
    let mut mk = |(x, y): &(VarSet, VarSet)| if well_formed { g.well_formed(x, y) } else { g.interface(x, y) };
    (mk(&sigs[0]), mk(&sigs[1]))
}

fn triple(g: &mut Gen, well_formed: bool) -> (StatelessInterface, StatelessInterface, StatelessInterface) {
    let sigs = g.composable_signatures(3, MAX_VARS, false);
    let mut mk = |(x, y): &(VarSet, VarSet)| if well_formed { g.well_formed(x, y) } else { g.interface(x, y) };
    (mk(&sigs[0]), mk(&sigs[1]), mk(&sigs[2]))
}

pub fn commutativity(g: &mut Gen) -> Case {
    let (a, b) = pair(g, false, false);
    let ab = compose_interfaces(&a, &b).unwrap();
    let ba = compose_interfaces(&b, &a).unwrap();
    verdict(compatible(&a, &b).holds() == compatible(&b, &a).holds() && ab == ba, || format!("{a:?}\n{b:?}"))
}

pub fn associativity(g: &mut Gen) -> Case {
    let (a, b, c) = triple(g, true);
    if !compatible(&a, &b).holds() {
        return Case::Skip;
    }
    let ab = compose_interfaces(&a, &b).unwrap();
    if !compatible(&ab, &c).holds() {
        return Case::Skip;
    }
    let left = compose_interfaces(&ab, &c).unwrap();
    let right = compose_interfaces(&a, &compose_interfaces(&b, &c).unwrap()).unwrap();
    verdict(left == right, || format!("{a:?}\n{b:?}\n{c:?}"))
}

pub fn composition_preserves_well_formedness(g: &mut Gen) -> Case {
    let (a, b) = pair(g, true, false);
    if !compatible(&a, &b).holds() {
        return Case::Skip;
    }
    verdict(is_well_formed(&compose_interfaces(&a, &b).unwrap()).holds(), || format!("{a:?}\n{b:?}"))
}

pub fn incremental_design(g: &mut Gen) -> Case {
    let (a, b, c) = triple(g, false);
    if !compatible(&a, &b).holds() {
        return Case::Skip;
    }
    let ab = compose_interfaces(&a, &b).unwrap();
    if !compatible(&ab, &c).holds() {
        return Case::Skip;
    }
    let bc = compose_interfaces(&b, &c).unwrap();
    verdict(compatible(&b, &c).holds() && compatible(&a, &bc).holds(), || format!("{a:?}\n{b:?}\n{c:?}"))
}

pub fn independent_implementability(g: &mut Gen) -> Case {
    let (f1, f2) = pair(g, true, false);
    if !compatible(&f1, &f2).holds() {
        return Case::Skip;
    }
    let r1 = g.refinement_of(&f1);
    let ok = compatible(&r1, &f2).holds()
        && refines(&compose_interfaces(&r1, &f2).unwrap(), &compose_interfaces(&f1, &f2).unwrap()).unwrap().holds();
    verdict(ok, || format!("{r1:?}\n{f1:?}\n{f2:?}"))
}

fn machine_pair(g: &mut Gen, well_formed: bool) -> (StatefulInterface, StatefulInterface) {
    let sigs = g.composable_signatures(2, MAX_VARS, false);
    let a = g.stateful_interface(&sigs[0].0, &sigs[0].1, MAX_STATES, well_formed);
    let b = g.stateful_interface(&sigs[1].0, &sigs[1].1, MAX_STATES, well_formed);
    (a, b)
}

fn compose_or_skip(a: &StatefulInterface, b: &StatefulInterface) -> Option<StatefulInterface> {
    match compose_stateful_interfaces(a, b) {
        Ok(m) => Some(m),
        Err(MachineError::Incompatible { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

pub fn independent_implementability_stateful(g: &mut Gen) -> Case {
    let (f1, f2) = machine_pair(g, true);
    if !compatible_stateful(&f1, &f2).holds() || !is_well_formed_stateful(&f1).holds() {
        return Case::Skip;
    }
    let r1 = g.stateful_refinement_of(&f1);
    if !refines_stateful(&r1, &f1).unwrap().holds || !is_well_formed_stateful(&r1).holds() {
        return Case::Skip;
    }
    if !compatible_stateful(&r1, &f2).holds() {
        return Case::Fail(format!("{r1:?}\n{f1:?}\n{f2:?}"));
    }
    let left = compose_or_skip(&r1, &f2).expect("compatible");
    let right = compose_or_skip(&f1, &f2).expect("compatible");
    verdict(refines_stateful(&left, &right).unwrap().holds, || format!("{r1:?}\n{f1:?}\n{f2:?}"))
}

pub fn implements_compositionality(g: &mut Gen) -> Case {
    let (a, b) = pair(g, false, false);
    let f = g.implementation(&a);
    let h = g.implementation(&b);
    let fh = compose_components(&f, &h).unwrap();
    let ab = compose_interfaces(&a, &b).unwrap();
    verdict(implements(&fh, &ab).unwrap().holds(), || format!("{a:?}\n{b:?}\n{f:?}\n{h:?}"))
}

pub fn implements_compositionality_stateful(g: &mut Gen) -> Case {
    let (a, b) = machine_pair(g, false);
    let Some(ab) = compose_or_skip(&a, &b) else { return Case::Skip };
    let f = g.stateful_implementation(&a);
    let h = g.stateful_implementation(&b);
    let fh = compose_stateful_components(&f, &h).unwrap();
    verdict(implements_stateful(&fh, &ab).unwrap().holds, || format!("{a:?}\n{b:?}\n{f:?}\n{h:?}"))
}

pub fn refinement_transfer(g: &mut Gen) -> Case {
    let (x, y) = g.signature(MAX_VARS);
    let abstract_ = g.well_formed(&x, &y);
    let refined = g.refinement_of(&abstract_);
    let f = g.implementation(&refined);
    let e = g.environment(&abstract_);
    let ok = implements(&f, &abstract_).unwrap().holds() && admissible_env(&e, &refined).unwrap().holds();
    verdict(ok, || format!("{refined:?}\n{abstract_:?}"))
}

pub fn refinement_transfer_stateful(g: &mut Gen) -> Case {
    let (x, y) = g.signature(MAX_VARS);
    let abstract_ = g.stateful_interface(&x, &y, MAX_STATES, true);
    let refined = g.stateful_refinement_of(&abstract_);
    if !refines_stateful(&refined, &abstract_).unwrap().holds {
        return Case::Skip;
    }
    let f = g.stateful_implementation(&refined);
    let e = g.stateful_environment(&abstract_);
    let ok = implements_stateful(&f, &abstract_).unwrap().holds && admissible_env_stateful(&e, &refined).unwrap().holds;
    verdict(ok, || format!("{refined:?}\n{abstract_:?}\n{f:?}\n{e:?}"))
}

pub fn shared_refinement_glb(g: &mut Gen) -> Case {
    let (x, y) = g.signature(MAX_VARS);
    let a = g.well_formed(&x, &y);
    let b = g.well_formed(&x, &y);
    let s = shared_refinement(&a, &b).unwrap();
    if !is_well_formed(&s).holds() {
        return Case::Fail(format!("not well-formed: {a:?}\n{b:?}"));
    }
    let z = a.all();
    let common = a.assumption().intersection(b.assumption());
    let base = a.guarantee().union(b.guarantee());
    let props = a.property().union(b.property());
    for _ in 0..8 {
        let assume = g.subset(common.iter().cloned(), 0.7);
        let mut guar: Vec<_> = base.iter().cloned().collect();
        let d = g.density();
        guar.extend(g.pairs(&z, &y, d, true));
        let lower = StatelessInterface::new(x.clone(), y.clone(), assume, guar, props.iter().cloned()).unwrap();
        if is_well_formed(&lower).holds() {
            return verdict(refines(&lower, &s).unwrap().holds(), || format!("{a:?}\n{b:?}\n{lower:?}"));
        }
    }
    Case::Pass
}

pub fn safety(g: &mut Gen) -> Case {
    let (x, y) = g.signature(MAX_VARS);
    let f = g.well_formed(&x, &y);
    let m = g.implementation(&f);
    let e = g.environment(&f);
    let mut both = edges(m.flows());
    both.extend(edges(e.flows()));
    let closed = closure(&both, &names(&f.all()));
    let hit = edges(f.property()).iter().any(|p| closed.contains(p));
    verdict(!hit, || format!("{f:?}\n{m:?}\n{e:?}"))
}

pub fn environment_extraction(g: &mut Gen) -> Case {
    let (a, b) = pair(g, true, true);
    if !compatible(&a, &b).holds() {
        return Case::Skip;
    }
    let mut env = |f: &StatelessInterface| if g.coin(0.7) { g.environment(f) } else { g.component(f.outputs(), f.inputs()) };
    let e = env(&a);
    let e2 = env(&b);
    let c = compose_interfaces(&a, &b).unwrap();
    let to_inputs = compose_components_restricted(&e, &e2, c.inputs()).unwrap();
    let to_outputs = compose_components_restricted(&e, &e2, c.outputs()).unwrap();
    let premise = to_inputs.flows().pairs().is_disjoint(c.assumption().pairs())
        && to_outputs.flows().pairs().is_disjoint(c.guarantee().pairs());
    if !premise {
        return Case::Skip;
    }
    let ok = admissible_env(&e, &a).unwrap().holds() && admissible_env(&e2, &b).unwrap().holds();
    verdict(ok, || format!("{a:?}\n{b:?}\n{e:?}\n{e2:?}"))
}

fn xyz() -> (Var, Var, Var) {
    (Var::new("x"), Var::new("y"), Var::new("z"))
}

fn verdicts(t: &TraceSet) -> [bool; 3] {
    let (x, y, z) = xyz();
    [
        check_strong(t, &x, &y, &z).unwrap().member,
        check_aware(t, &x, &y, &z).unwrap().member,
        check_unstructured(t, &x, &y, &z).unwrap().member,
    ]
}

pub fn semantics_chain(g: &mut Gen) -> Case {
    let t = g.trace_set(5, 4);
    let [s, a, u] = verdicts(&t);
    verdict((!s || a) && (!a || u), || format!("{t:?}"))
}

pub fn constant_tail(g: &mut Gen) -> Case {
    let t = g.trace_set(5, 4);
    verdict(verdicts(&t) == verdicts(&t.extended()), || format!("{t:?}"))
}

pub const ALL: &[(&str, Law)] = &[
    ("well-formed iff P within derived properties", well_formed_iff_derived),
    ("composition commutes", commutativity),
    ("associativity under chained compatibility", associativity),
    ("composition preserves well-formedness", composition_preserves_well_formedness),
    ("incremental design", incremental_design),
    ("independent implementability", independent_implementability),
    ("independent implementability, stateful", independent_implementability_stateful),
    ("implementations compose", implements_compositionality),
    ("implementations compose, stateful", implements_compositionality_stateful),
    ("refinement transfer", refinement_transfer),
    ("refinement transfer, stateful", refinement_transfer_stateful),
    ("shared refinement well-formed and greatest lower bound", shared_refinement_glb),
    ("implementation and environment avoid P", safety),
    ("environment extraction", environment_extraction),
    ("semantics inclusion chain", semantics_chain),
    ("constant tail duplication", constant_tail),
];

/// Runs `law` until `cases` instances meet its premise or `attempts` draws
/// are spent; returns (checked, first failure).
pub fn run(law: Law, g: &mut Gen, cases: usize, attempts: usize) -> (usize, Option<String>) {
    let mut checked = 0;
    let mut failure = None;
    for _ in 0..attempts {
        match law(g) {
            Case::Skip => continue,
            Case::Pass => checked += 1,
            Case::Fail(msg) => {
                checked += 1;
                failure.get_or_insert(msg);
            }
        }
        if checked >= cases {
            break;
        }
    }
    (checked, failure)
}

use std::fmt::Write;

use super::{Item, SpecDocument};
use crate::relalg::{Relation, VarSet};
use crate::stateful::Machine;
use crate::stateless::{Signature, StatelessComponent, StatelessInterface};

/// Canonical text: sorted variables, pairs, states and transitions, with
/// declarations kept in document order. `parse_spec` reads it back to an
/// equal document.
pub fn serialize_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    for (i, d) in doc.declarations.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match &d.item {
            Item::Interface(f) => {
                let _ = writeln!(out, "interface {} {{", d.name);
                io(&mut out, f.signature(), "  ");
                clauses(&mut out, f, "  ");
            }
            Item::Component(f) => {
                let _ = writeln!(out, "component {} {{", d.name);
                io(&mut out, f.signature(), "  ");
                flows(&mut out, f, "  ");
            }
            Item::StatefulInterface(m) => {
                let _ = writeln!(out, "stateful interface {} {{", d.name);
                machine(&mut out, m, |out, p| clauses(out, p, "    "));
            }
            Item::StatefulComponent(m) => {
                let _ = writeln!(out, "stateful component {} {{", d.name);
                machine(&mut out, m, |out, p| flows(out, p, "    "));
            }
        }
        out.push_str("}\n");
    }
    out
}

fn names(set: &VarSet) -> String {
    set.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ")
}

fn io(out: &mut String, sig: &Signature, indent: &str) {
    let _ = writeln!(out, "{indent}inputs: {};", names(sig.inputs()));
    let _ = writeln!(out, "{indent}outputs: {};", names(sig.outputs()));
}

fn pair_list(r: &Relation, arrow: &str, skip_identity: bool) -> String {
    r.iter()
        .filter(|(a, b)| !(skip_identity && a == b))
        .map(|(a, b)| format!("{a} {arrow} {b}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn clauses(out: &mut String, f: &StatelessInterface, indent: &str) {
    for (word, r) in [("assume", f.assumption()), ("guarantee", f.guarantee()), ("property", f.property())] {
        if !r.is_empty() {
            let _ = writeln!(out, "{indent}{word}: {};", pair_list(r, "!->", false));
        }
    }
}

fn flows(out: &mut String, f: &StatelessComponent, indent: &str) {
    let _ = writeln!(out, "{indent}flows: {};", pair_list(f.flows(), "->", true));
}

fn machine<P>(out: &mut String, m: &Machine<P>, body: impl Fn(&mut String, &P))
where
    P: crate::stateful::Payload,
{
    io(out, m.signature(), "  ");
    let _ = writeln!(out, "  initial: {};", m.initial());
    for q in m.states() {
        let _ = writeln!(out, "  state {q} {{");
        body(out, m.at(q).expect("listed state"));
        out.push_str("  }\n");
    }
    out.push_str("  transitions:\n");
    for (a, b) in m.transitions() {
        let _ = writeln!(out, "    {a} -> {b};");
    }
}

use std::fmt::Write;

use crate::relalg::{Relation, VarSet};
use crate::speclang::Item;
use crate::stateful::{Machine, Payload};
use crate::stateless::{Signature, StatelessComponent, StatelessInterface};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn render(name: &str, item: &Item) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    out.push_str("  rankdir=LR;\n");
    match item {
        Item::Interface(f) => {
            out.push_str("  label=\"solid: guarantee, dashed: assumption, dotted: property\";\n");
            variables(&mut out, name, f.signature());
            edges(&mut out, f.guarantee(), "solid", false);
            edges(&mut out, f.assumption(), "dashed", false);
            edges(&mut out, f.property(), "dotted", false);
        }
        Item::Component(f) => {
            out.push_str("  label=\"solid: flow\";\n");
            variables(&mut out, name, f.signature());
            edges(&mut out, f.flows(), "solid", true);
        }
        Item::StatefulInterface(m) => machine(&mut out, m, interface_summary),
        Item::StatefulComponent(m) => machine(&mut out, m, component_summary),
    }
    out.push_str("}\n");
    out
}

fn variables(out: &mut String, name: &str, sig: &Signature) {
    let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{name}")));
    let _ = writeln!(out, "    label={};", quote(name));
    for (set, shape) in [(sig.inputs(), "ellipse"), (sig.outputs(), "box")] {
        for v in set {
            let _ = writeln!(out, "    {} [shape={shape}];", quote(v.as_str()));
        }
    }
    out.push_str("  }\n");
}

fn edges(out: &mut String, r: &Relation, style: &str, skip_identity: bool) {
    for (a, b) in r.iter() {
        if skip_identity && a == b {
            continue;
        }
        let _ = writeln!(out, "  {} -> {} [style={style}];", quote(a.as_str()), quote(b.as_str()));
    }
}

fn list(r: &Relation, arrow: &str) -> String {
    r.iter().filter(|(a, b)| a != b).map(|(a, b)| format!("{a}{arrow}{b}")).collect::<Vec<_>>().join(" ")
}

fn interface_summary(f: &StatelessInterface) -> Vec<String> {
    let mut out = Vec::new();
    for (tag, r) in [("A", f.assumption()), ("G", f.guarantee()), ("P", f.property())] {
        if !r.is_empty() {
            out.push(format!("{tag}: {}", list(r, "!->")));
        }
    }
    out
}

fn component_summary(f: &StatelessComponent) -> Vec<String> {
    let l = list(f.flows(), "->");
    if l.is_empty() {
        Vec::new()
    } else {
        vec![format!("M: {l}")]
    }
}

fn names(set: &VarSet) -> String {
    set.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(",")
}

fn machine<P: Payload>(out: &mut String, m: &Machine<P>, summary: fn(&P) -> Vec<String>) {
    let sig = m.signature();
    let _ = writeln!(out, "  label={};", quote(&format!("inputs: {}  outputs: {}", names(sig.inputs()), names(sig.outputs()))));
    out.push_str("  __start [shape=point];\n");
    for q in m.states() {
        let mut label = vec![q.as_str().to_string()];
        label.extend(summary(m.at(q).expect("listed state")));
        let label = label.join("\\n");
        let extra = if q == m.initial() { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  {} [shape=box, label=\"{}\"{extra}];", quote(q.as_str()), label.replace('"', "\\\""));
    }
    let _ = writeln!(out, "  __start -> {};", quote(m.initial().as_str()));
    for (a, b) in m.transitions() {
        let _ = writeln!(out, "  {} -> {};", quote(a.as_str()), quote(b.as_str()));
    }
}

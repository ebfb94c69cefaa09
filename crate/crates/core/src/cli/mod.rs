//! The `flowif` command line. `run` takes the argument list and returns what
//! would be printed, so the binary is a thin wrapper.

mod dot;
mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::hypersem::{self, Semantics, TraceError};
use crate::relalg::Var;
use crate::speclang::{parse_spec, parse_traces, serialize_spec, Item, SpecDocument, TraceLoadError};
use crate::stateful::{
    admissible_env_stateful, compatible_stateful, compose_stateful_components, compose_stateful_interfaces,
    implements_stateful, is_well_formed_stateful, refines_stateful_with, GroupMode, MachineError, Simulation,
};
use crate::stateless::{
    admissible_env, compatible, compose_components, compose_interfaces, derived_properties, implements,
    is_well_formed, refines, shared_refinement, suggest_repairs, InterfaceError, WellFormedVerdict,
};

pub use report::{Report, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    /// Positioned diagnostics, one per line, each with its own severity.
    #[error("{0}")]
    Parse(String),
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Interface(#[from] InterfaceError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("{0}")]
    Traces(#[from] TraceLoadError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Debug, Parser)]
#[command(name = "flowif", version, about = "Check, compose and render information-flow interfaces")]
struct Cli {
    /// Print only the machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary output to a file.
    #[arg(short = 'o', long = "output", global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Strong,
    Aware,
    Unstructured,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Groups {
    #[default]
    Occurring,
    Literal,
}

/// Operands name declarations in FILE; `A+B+C` denotes the left-folded
/// composition.
#[derive(Debug, Subcommand)]
enum Command {
    /// Well-formedness of an interface, with a witness path per violation.
    Check { file: PathBuf, name: String },
    /// Compose two or more operands, folding left.
    Compose {
        file: PathBuf,
        #[arg(required = true, num_args = 2..)]
        names: Vec<String>,
        /// Declaration name of the result.
        #[arg(long = "name", default_value = "composite")]
        result: String,
    },
    /// Compatibility of two interfaces.
    Compatible { file: PathBuf, left: String, right: String },
    /// Whether REFINED refines ABSTRACT.
    Refines {
        file: PathBuf,
        refined: String,
        #[arg(value_name = "ABSTRACT")]
        abstract_: String,
        /// Successor groups used by the stateful check.
        #[arg(long, value_enum, default_value_t)]
        groups: Groups,
    },
    /// Whether a component implements an interface.
    Implements { file: PathBuf, component: String, interface: String },
    /// Whether a component is an admissible environment of an interface.
    Env { file: PathBuf, environment: String, interface: String },
    /// Shared refinement of two interfaces over one signature.
    SharedRefine {
        file: PathBuf,
        left: String,
        right: String,
        #[arg(long = "name", default_value = "shared")]
        result: String,
    },
    /// Derived properties of an interface, checked against its declared ones.
    Derived { file: PathBuf, name: String },
    /// Single-pair extensions that each break one violating path.
    Repair { file: PathBuf, name: String },
    /// Membership of a trace set in a no-flow semantics.
    Semantics {
        tracefile: PathBuf,
        #[arg(value_enum)]
        mode: Mode,
        x: String,
        y: String,
        z: String,
    },
    /// Graphviz rendering of an operand.
    Dot { file: PathBuf, name: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { exit_code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { exit_code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut out = Outcome::default();
    match execute(&cli, &mut out.stderr).and_then(|r| emit(&cli, r, &mut out)) {
        Ok(()) => {}
        Err(CliError::Parse(msg)) => {
            out.stderr.push_str(&format!("{msg}\n"));
            out.exit_code = 2;
        }
        Err(e) => {
            out.stderr.push_str(&format!("error: {e}\n"));
            out.exit_code = 2;
        }
    }
    out
}

fn emit(cli: &Cli, report: Report, out: &mut Outcome) -> Result<(), CliError> {
    for w in &report.warnings {
        out.stderr.push_str(&format!("warning: {w}\n"));
    }
    out.exit_code = report.verdict.exit_code();
    let primary = match (&report.artifact, cli.json) {
        (_, true) => report.json_text(),
        (Some(a), false) => a.clone(),
        (None, false) => format!("{}\n{}", report.human(), report.json_text()),
    };
    match &cli.output {
        Some(path) => {
            fs::write(path, &primary).map_err(|source| CliError::Write { path: path.clone(), source })?;
            if report.artifact.is_some() && !cli.json {
                out.stdout = report.human();
            }
        }
        None => out.stdout = primary,
    }
    Ok(())
}

fn load(path: &Path, stderr: &mut String) -> Result<SpecDocument, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    let shown = path.display();
    match parse_spec(&text) {
        Ok(parsed) => {
            for w in parsed.warnings {
                stderr.push_str(&format!("{shown}:{w}\n"));
            }
            Ok(parsed.document)
        }
        Err(diags) => {
            let msg = diags.iter().map(|d| format!("{shown}:{d}")).collect::<Vec<_>>().join("\n");
            Err(CliError::Parse(msg))
        }
    }
}

/// Resolves `A` or `A+B+..`, collecting compatibility warnings.
fn resolve(doc: &SpecDocument, expr: &str, warnings: &mut Vec<String>) -> Result<Item, CliError> {
    let names: Vec<&str> = expr.split('+').map(str::trim).collect();
    let mut items = Vec::with_capacity(names.len());
    for n in &names {
        let item = doc.get(n).ok_or_else(|| CliError::Input(format!("no declaration named `{n}`")))?;
        items.push(item.clone());
    }
    fold(&names, items, warnings)
}

fn fold(names: &[&str], items: Vec<Item>, warnings: &mut Vec<String>) -> Result<Item, CliError> {
    let mut iter = items.into_iter();
    let mut acc = iter.next().ok_or_else(|| CliError::Input("nothing to compose".into()))?;
    let mut label = names[0].to_string();
    let mut chained = true;
    for (item, name) in iter.zip(&names[1..]) {
        acc = match (acc, item) {
            (Item::Interface(a), Item::Interface(b)) => {
                let c = compatible(&a, &b);
                if let Some(v) = &c.overlap {
                    return Err(CliError::Input(format!("`{label}` and `{name}` both output `{v}`")));
                }
                if !c.holds() {
                    chained = false;
                    warnings.push(format!(
                        "`{label}` and `{name}` are not compatible: {}",
                        report::pairs_text(&c.violations, "!->")
                    ));
                }
                Item::Interface(compose_interfaces(&a, &b)?)
            }
            (Item::Component(a), Item::Component(b)) => Item::Component(compose_components(&a, &b)?),
            (Item::StatefulInterface(a), Item::StatefulInterface(b)) => {
                Item::StatefulInterface(compose_stateful_interfaces(&a, &b)?)
            }
            (Item::StatefulComponent(a), Item::StatefulComponent(b)) => {
                Item::StatefulComponent(compose_stateful_components(&a, &b)?)
            }
            (a, b) => {
                return Err(CliError::Input(format!(
                    "cannot compose {} `{label}` with {} `{name}`",
                    a.kind(),
                    b.kind()
                )))
            }
        };
        label = format!("{label}+{name}");
    }
    if !chained && names.len() > 2 {
        warnings.push("operands are not chained-compatible; the result depends on the fold order".into());
    }
    Ok(acc)
}

fn wrong_kind(name: &str, item: &Item, wanted: &str) -> CliError {
    CliError::Input(format!("`{name}` is a {}, expected {wanted}", item.kind()))
}

fn execute(cli: &Cli, stderr: &mut String) -> Result<Report, CliError> {
    let mut warnings = Vec::new();
    let mut report = match &cli.command {
        Command::Check { file, name } => {
            let doc = load(file, stderr)?;
            let item = resolve(&doc, name, &mut warnings)?;
            check(name, &item)?
        }
        Command::Compose { file, names, result } => {
            let doc = load(file, stderr)?;
            let expr = names.join("+");
            let item = resolve(&doc, &expr, &mut warnings)?;
            let mut r = Report::new(format!("compose {}", names.join(" ")), Verdict::Produced);
            r.line(format!("{} `{result}`", item.kind()));
            r.set("kind", json!(item.kind()));
            r.set("name", json!(result));
            if let Item::Interface(f) = &item {
                r.line(format!("assumptions: {}", report::pairs_text(f.assumption(), "!->")));
                r.line(format!("guarantees: {}", report::pairs_text(f.guarantee(), "!->")));
                r.line(format!("properties: {}", report::pairs_text(f.property(), "!->")));
                r.set("assumptions", report::pairs_json(f.assumption()));
                r.set("guarantees", report::pairs_json(f.guarantee()));
                r.set("properties", report::pairs_json(f.property()));
            }
            let mut out = SpecDocument::default();
            out.push(result.clone(), item);
            r.artifact = Some(serialize_spec(&out));
            r
        }
        Command::Compatible { file, left, right } => {
            let doc = load(file, stderr)?;
            let a = resolve(&doc, left, &mut warnings)?;
            let b = resolve(&doc, right, &mut warnings)?;
            let c = match (&a, &b) {
                (Item::Interface(a), Item::Interface(b)) => compatible(a, b),
                (Item::StatefulInterface(a), Item::StatefulInterface(b)) => {
                    if let Some(v) = a.signature().outputs().intersection(b.signature().outputs()).next() {
                        return Err(InterfaceError::OutputsOverlap(v.clone()).into());
                    }
                    compatible_stateful(a, b)
                }
                (Item::Interface(_) | Item::StatefulInterface(_), other) => return Err(wrong_kind(right, other, "a matching interface")),
                (other, _) => return Err(wrong_kind(left, other, "an interface")),
            };
            let mut r = Report::new(format!("compatible {left} {right}"), Verdict::from_bool(c.holds()));
            if let Some(v) = &c.overlap {
                r.line(format!("not composable: both output `{v}`"));
            }
            r.line(format!("uncovered assumptions: {}", report::pairs_text(&c.violations, "!->")));
            r.set("overlap", json!(c.overlap.as_ref().map(Var::as_str)));
            r.set("uncovered_assumptions", report::pairs_json(&c.violations));
            r
        }
        Command::Refines { file, refined, abstract_, groups } => {
            let doc = load(file, stderr)?;
            let a = resolve(&doc, refined, &mut warnings)?;
            let b = resolve(&doc, abstract_, &mut warnings)?;
            let title = format!("refines {refined} {abstract_}");
            match (&a, &b) {
                (Item::Interface(a), Item::Interface(b)) => {
                    let v = refines(a, b)?;
                    let mut r = Report::new(title, Verdict::from_bool(v.holds()));
                    r.line(format!("extra assumptions: {}", report::pairs_text(&v.extra_assumptions, "!->")));
                    r.line(format!("missing guarantees: {}", report::pairs_text(&v.missing_guarantees, "!->")));
                    r.line(format!("missing properties: {}", report::pairs_text(&v.missing_properties, "!->")));
                    r.set("extra_assumptions", report::pairs_json(&v.extra_assumptions));
                    r.set("missing_guarantees", report::pairs_json(&v.missing_guarantees));
                    r.set("missing_properties", report::pairs_json(&v.missing_properties));
                    r
                }
                (Item::StatefulInterface(a), Item::StatefulInterface(b)) => {
                    let mode = match groups {
                        Groups::Occurring => GroupMode::Occurring,
                        Groups::Literal => GroupMode::Literal,
                    };
                    simulation(title, &refines_stateful_with(a, b, mode)?)
                }
                (Item::Interface(_) | Item::StatefulInterface(_), other) => {
                    return Err(wrong_kind(abstract_, other, "a matching interface"))
                }
                (other, _) => return Err(wrong_kind(refined, other, "an interface")),
            }
        }
        Command::Implements { file, component, interface } => {
            let doc = load(file, stderr)?;
            let f = resolve(&doc, component, &mut warnings)?;
            let i = resolve(&doc, interface, &mut warnings)?;
            let title = format!("implements {component} {interface}");
            match (&f, &i) {
                (Item::Component(f), Item::Interface(i)) => subset(title, "flows violating guarantees", &implements(f, i)?.offending),
                (Item::StatefulComponent(f), Item::StatefulInterface(i)) => simulation(title, &implements_stateful(f, i)?),
                (Item::Component(_) | Item::StatefulComponent(_), other) => {
                    return Err(wrong_kind(interface, other, "a matching interface"))
                }
                (other, _) => return Err(wrong_kind(component, other, "a component")),
            }
        }
        Command::Env { file, environment, interface } => {
            let doc = load(file, stderr)?;
            let e = resolve(&doc, environment, &mut warnings)?;
            let i = resolve(&doc, interface, &mut warnings)?;
            let title = format!("env {environment} {interface}");
            match (&e, &i) {
                (Item::Component(e), Item::Interface(i)) => {
                    subset(title, "flows violating assumptions", &admissible_env(e, i)?.offending)
                }
                (Item::StatefulComponent(e), Item::StatefulInterface(i)) => simulation(title, &admissible_env_stateful(e, i)?),
                (Item::Component(_) | Item::StatefulComponent(_), other) => {
                    return Err(wrong_kind(interface, other, "a matching interface"))
                }
                (other, _) => return Err(wrong_kind(environment, other, "a component")),
            }
        }
        Command::SharedRefine { file, left, right, result } => {
            let doc = load(file, stderr)?;
            let a = stateless_interface(&doc, left, &mut warnings)?;
            let b = stateless_interface(&doc, right, &mut warnings)?;
            let s = shared_refinement(&a, &b)?;
            let mut r = Report::new(format!("shared-refine {left} {right}"), Verdict::Produced);
            let wf = is_well_formed(&s);
            if !wf.holds() {
                r.warnings.push(format!("the shared refinement `{result}` is not well-formed"));
            }
            r.line(format!("well-formed: {}", wf.holds()));
            r.set("name", json!(result));
            r.set("well_formed", json!(wf.holds()));
            let mut out = SpecDocument::default();
            out.push(result.clone(), Item::Interface(s));
            r.artifact = Some(serialize_spec(&out));
            r
        }
        Command::Derived { file, name } => {
            let doc = load(file, stderr)?;
            let f = stateless_interface(&doc, name, &mut warnings)?;
            let d = derived_properties(f.assumption(), f.guarantee(), &f.all());
            let missing = f.property().difference(&d);
            let mut r = Report::new(format!("derived {name}"), Verdict::from_bool(missing.is_empty()));
            r.line(format!("derived properties: {}", report::pairs_text(&d, "!->")));
            r.line(format!("declared properties not derived: {}", report::pairs_text(&missing, "!->")));
            r.set("derived", report::pairs_json(&d));
            r.set("not_derived", report::pairs_json(&missing));
            r
        }
        Command::Repair { file, name } => {
            let doc = load(file, stderr)?;
            let f = stateless_interface(&doc, name, &mut warnings)?;
            let cands = suggest_repairs(&f)?;
            let mut r = Report::new(format!("repair {name}"), Verdict::Produced);
            let mut rows = Vec::new();
            for c in &cands {
                let (a, b) = &c.edge;
                let (x, y) = &c.violation;
                r.line(format!("add {} {a} !-> {b} (for {x} !-> {y})", c.role));
                rows.push(json!({
                    "violation": [x.as_str(), y.as_str()],
                    "role": c.role.to_string(),
                    "pair": [a.as_str(), b.as_str()],
                    "well_formed": is_well_formed(&c.interface).holds(),
                }));
            }
            r.set("candidates", Value::Array(rows));
            r
        }
        Command::Semantics { tracefile, mode, x, y, z } => {
            let text = fs::read_to_string(tracefile).map_err(|source| CliError::Read { path: tracefile.clone(), source })?;
            let set = parse_traces(&text)?;
            let sem = match mode {
                Mode::Strong => Semantics::Strong,
                Mode::Aware => Semantics::Aware,
                Mode::Unstructured => Semantics::Unstructured,
            };
            let v = hypersem::check(&set, sem, &Var::new(x), &Var::new(y), &Var::new(z))?;
            let mut r = Report::new(format!("semantics {sem} {x} {y} {z}"), Verdict::from_bool(v.member));
            for c in &v.witnesses {
                r.line(format!("witness: pi1={} pi2={} pi3={} t={}", c.pi1, c.pi2, c.pi3, c.t));
            }
            for c in &v.counterexamples {
                match c.t {
                    Some(t) => r.line(format!("counterexample: pi1={} pi2={} t={t}", c.pi1, c.pi2)),
                    None => r.line(format!("counterexample: pi1={} pi2={}", c.pi1, c.pi2)),
                }
            }
            r.set("semantics", json!(v.semantics));
            r.set("witnesses", json!(v.witnesses));
            r.set("counterexamples", json!(v.counterexamples));
            r
        }
        Command::Dot { file, name } => {
            let doc = load(file, stderr)?;
            let item = resolve(&doc, name, &mut warnings)?;
            let mut r = Report::new(format!("dot {name}"), Verdict::Produced);
            r.artifact = Some(dot::render(name, &item));
            r
        }
    };
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    Ok(report)
}

fn stateless_interface(doc: &SpecDocument, name: &str, warnings: &mut Vec<String>) -> Result<crate::stateless::StatelessInterface, CliError> {
    match resolve(doc, name, warnings)? {
        Item::Interface(f) => Ok(f),
        other => Err(wrong_kind(name, &other, "a stateless interface")),
    }
}

fn violations(verdict: &WellFormedVerdict, prefix: &str, r: &mut Report) -> Value {
    let mut rows = Vec::new();
    for (role, v) in &verdict.reflexive {
        r.line(format!("{prefix}reflexive {role} pair {v} !-> {v}"));
        rows.push(json!({"reflexive": {"role": role.to_string(), "var": v.as_str()}}));
    }
    for v in &verdict.violations {
        let path = v.path.iter().map(Var::as_str).collect::<Vec<_>>();
        let steps = v.steps.iter().map(ToString::to_string).collect::<Vec<_>>();
        r.line(format!(
            "{prefix}violation {} !-> {}: path {} ({})",
            v.pair.0,
            v.pair.1,
            path.join(" -> "),
            steps.join(" ")
        ));
        rows.push(json!({"pair": [v.pair.0.as_str(), v.pair.1.as_str()], "path": path, "steps": steps}));
    }
    Value::Array(rows)
}

fn check(name: &str, item: &Item) -> Result<Report, CliError> {
    let title = format!("check {name}");
    match item {
        Item::Interface(f) => {
            let v = is_well_formed(f);
            let mut r = Report::new(title, Verdict::from_bool(v.holds()));
            let rows = violations(&v, "", &mut r);
            r.set("violations", rows);
            Ok(r)
        }
        Item::StatefulInterface(m) => {
            let v = is_well_formed_stateful(m);
            let mut r = Report::new(title, Verdict::from_bool(v.holds()));
            let mut states = serde_json::Map::new();
            for (q, verdict) in &v.states {
                let rows = violations(verdict, &format!("state {q}: "), &mut r);
                states.insert(q.to_string(), rows);
            }
            for q in &v.skipped {
                r.line(format!("state {q}: unreachable, skipped"));
            }
            r.set("states", Value::Object(states));
            r.set("skipped", json!(v.skipped.iter().map(|q| q.as_str()).collect::<Vec<_>>()));
            Ok(r)
        }
        other => Err(wrong_kind(name, other, "an interface")),
    }
}

fn subset(title: String, what: &str, offending: &crate::relalg::Relation) -> Report {
    let mut r = Report::new(title, Verdict::from_bool(offending.is_empty()));
    r.line(format!("{what}: {}", report::pairs_text(offending, "->")));
    r.set("offending", report::pairs_json(offending));
    r
}

fn simulation(title: String, s: &Simulation) -> Report {
    let mut r = Report::new(title, Verdict::from_bool(s.holds));
    for (a, b) in &s.witness {
        r.line(format!("related: {a} ~ {b}"));
    }
    r.set("witness", json!(s.witness.iter().map(|(a, b)| [a.as_str(), b.as_str()]).collect::<Vec<_>>()));
    r
}

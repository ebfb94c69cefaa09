use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, Kind, Token};
use super::{Diagnostic, Item, Parsed, SpecDocument};
use crate::relalg::{Pair, Var, VarSet};
use crate::stateful::{StateId, StatefulComponent, StatefulInterface};
use crate::stateless::{Role, Signature, StatelessComponent, StatelessInterface};

type PResult<T> = Result<T, Diagnostic>;

#[derive(Clone, Debug)]
struct Name {
    text: String,
    line: usize,
    column: usize,
}

impl Name {
    fn from_token(t: &Token) -> Self {
        Name { text: t.text.clone(), line: t.line, column: t.column }
    }
}

struct RawPair {
    from: Name,
    to: Name,
}

struct Io {
    inputs: Vec<Name>,
    outputs: Vec<Name>,
}

#[derive(Default)]
struct Clauses {
    assume: Vec<RawPair>,
    guarantee: Vec<RawPair>,
    property: Vec<RawPair>,
}

/// A state block: its name, interface clauses, and component flows with the
/// `flows` token.
type RawState = (Name, Clauses, Option<(Token, Vec<RawPair>)>);

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

/// Parses a specification document; errors abort construction, warnings are
/// returned alongside the document.
pub fn parse_spec(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let tokens = tokenize(text).map_err(|d| vec![d])?;
    let mut p = Parser { tokens, pos: 0, errors: Vec::new(), warnings: Vec::new() };
    match p.document() {
        Ok(document) if p.errors.is_empty() => Ok(Parsed { document, warnings: p.warnings }),
        Ok(_) => Err(p.errors),
        Err(d) => {
            p.errors.push(d);
            Err(p.errors)
        }
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != Kind::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, word: &str) -> bool {
        let t = self.peek();
        t.kind == Kind::Ident && t.text == word
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let t = self.peek();
        let found = if t.kind == Kind::Ident { format!("`{}`", t.text) } else { t.kind.describe().to_string() };
        Diagnostic::error(t.line, t.column, format!("expected {wanted}, found {found}"))
    }

    fn expect(&mut self, kind: Kind) -> PResult<Token> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(kind.describe()))
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<Token> {
        if self.at_keyword(word) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn name(&mut self) -> PResult<Name> {
        let t = self.expect(Kind::Ident)?;
        Ok(Name::from_token(&t))
    }

    fn document(&mut self) -> PResult<SpecDocument> {
        let mut doc = SpecDocument::default();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        while self.peek().kind != Kind::Eof {
            let (name, item) = if self.at_keyword("interface") {
                self.bump();
                let name = self.name()?;
                let item = self.interface()?.map(Item::Interface);
                (name, item)
            } else if self.at_keyword("component") {
                self.bump();
                let name = self.name()?;
                let item = self.component()?.map(Item::Component);
                (name, item)
            } else if self.at_keyword("stateful") {
                self.bump();
                if self.at_keyword("interface") {
                    self.bump();
                    let name = self.name()?;
                    let item = self.machine(true)?;
                    (name, item)
                } else {
                    self.keyword("component")?;
                    let name = self.name()?;
                    let item = self.machine(false)?;
                    (name, item)
                }
            } else {
                return Err(self.unexpected("`interface`, `component` or `stateful`"));
            };
            if !seen.insert(name.text.clone()) {
                self.errors.push(Diagnostic::error(name.line, name.column, format!("duplicate declaration `{}`", name.text)));
                continue;
            }
            if let Some(item) = item {
                doc.push(name.text, item);
            }
        }
        Ok(doc)
    }

    fn names_until_semi(&mut self) -> PResult<Vec<Name>> {
        let mut out = Vec::new();
        if self.peek().kind != Kind::Semi {
            out.push(self.name()?);
            while self.peek().kind == Kind::Comma {
                self.bump();
                out.push(self.name()?);
            }
        }
        self.expect(Kind::Semi)?;
        Ok(out)
    }

    fn io(&mut self) -> PResult<Io> {
        self.keyword("inputs")?;
        self.expect(Kind::Colon)?;
        let inputs = self.names_until_semi()?;
        self.keyword("outputs")?;
        self.expect(Kind::Colon)?;
        let outputs = self.names_until_semi()?;
        Ok(Io { inputs, outputs })
    }

    fn pairs_until_semi(&mut self, arrow: Kind) -> PResult<Vec<RawPair>> {
        let mut out = Vec::new();
        if self.peek().kind != Kind::Semi {
            loop {
                let from = self.name()?;
                self.expect(arrow)?;
                let to = self.name()?;
                out.push(RawPair { from, to });
                if self.peek().kind != Kind::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Kind::Semi)?;
        Ok(out)
    }

    fn clauses(&mut self) -> PResult<Clauses> {
        let mut c = Clauses::default();
        let mut seen = BTreeSet::new();
        while let Some(word) = ["assume", "guarantee", "property"].into_iter().find(|w| self.at_keyword(w)) {
            let t = self.bump();
            if !seen.insert(word) {
                self.errors.push(Diagnostic::error(t.line, t.column, format!("repeated `{word}` clause")));
            }
            self.expect(Kind::Colon)?;
            let ps = self.pairs_until_semi(Kind::NoFlow)?;
            match word {
                "assume" => c.assume.extend(ps),
                "guarantee" => c.guarantee.extend(ps),
                _ => c.property.extend(ps),
            }
        }
        Ok(c)
    }

    fn flows(&mut self) -> PResult<(Token, Vec<RawPair>)> {
        let t = self.keyword("flows")?;
        self.expect(Kind::Colon)?;
        Ok((t, self.pairs_until_semi(Kind::Arrow)?))
    }

    fn strict(&mut self) -> PResult<bool> {
        if self.at_keyword("strict") {
            self.bump();
            self.expect(Kind::Semi)?;
            return Ok(true);
        }
        Ok(false)
    }

    fn interface(&mut self) -> PResult<Option<StatelessInterface>> {
        self.expect(Kind::LBrace)?;
        let io = self.io()?;
        let clauses = self.clauses()?;
        self.expect(Kind::RBrace)?;
        let Some(sig) = self.signature(&io) else { return Ok(None) };
        Ok(self.build_interface(&sig, &clauses, false))
    }

    fn component(&mut self) -> PResult<Option<StatelessComponent>> {
        self.expect(Kind::LBrace)?;
        let io = self.io()?;
        let strict = self.strict()?;
        let (at, flows) = self.flows()?;
        self.expect(Kind::RBrace)?;
        let Some(sig) = self.signature(&io) else { return Ok(None) };
        Ok(self.build_component(&sig, &at, &flows, strict))
    }

    /// `atom ("⋈" atom)?` with `atom := NAME | "(" state ")"`.
    fn state_ref(&mut self) -> PResult<Name> {
        let first = self.peek().clone();
        let left = self.state_atom()?;
        if self.peek().kind == Kind::Bowtie {
            self.bump();
            let right = self.state_atom()?;
            let id = StateId::pair(&StateId::new(&left), &StateId::new(&right));
            return Ok(Name { text: id.as_str().to_string(), line: first.line, column: first.column });
        }
        Ok(Name { text: left, line: first.line, column: first.column })
    }

    fn state_atom(&mut self) -> PResult<String> {
        if self.peek().kind == Kind::LParen {
            self.bump();
            let inner = self.state_ref()?;
            self.expect(Kind::RParen)?;
            return Ok(inner.text);
        }
        Ok(self.name()?.text)
    }

    fn machine(&mut self, is_interface: bool) -> PResult<Option<Item>> {
        self.expect(Kind::LBrace)?;
        let io = self.io()?;
        let strict = if is_interface { false } else { self.strict()? };
        self.keyword("initial")?;
        self.expect(Kind::Colon)?;
        let initial = self.state_ref()?;
        self.expect(Kind::Semi)?;
        let mut states: Vec<RawState> = Vec::new();
        while self.at_keyword("state") {
            self.bump();
            let q = self.state_ref()?;
            self.expect(Kind::LBrace)?;
            if is_interface {
                let c = self.clauses()?;
                states.push((q, c, None));
            } else {
                let f = self.flows()?;
                states.push((q, Clauses::default(), Some(f)));
            }
            self.expect(Kind::RBrace)?;
        }
        if states.is_empty() {
            return Err(self.unexpected("`state`"));
        }
        self.keyword("transitions")?;
        self.expect(Kind::Colon)?;
        let mut edges = Vec::new();
        while self.peek().kind != Kind::RBrace {
            let from = self.state_ref()?;
            self.expect(Kind::Arrow)?;
            let to = self.state_ref()?;
            self.expect(Kind::Semi)?;
            edges.push((from, to));
        }
        self.expect(Kind::RBrace)?;

        let Some(sig) = self.signature(&io) else { return Ok(None) };
        let mut declared: BTreeSet<String> = BTreeSet::new();
        let mut ok = true;
        let mut iface_labels = BTreeMap::new();
        let mut comp_labels = BTreeMap::new();
        for (q, clauses, flows) in &states {
            if !declared.insert(q.text.clone()) {
                self.errors.push(Diagnostic::error(q.line, q.column, format!("duplicate state `{}`", q.text)));
                ok = false;
                continue;
            }
            let id = StateId::new(&q.text);
            match flows {
                None => match self.build_interface(&sig, clauses, true) {
                    Some(p) => {
                        iface_labels.insert(id, p);
                    }
                    None => ok = false,
                },
                Some((at, fs)) => match self.build_component(&sig, at, fs, strict) {
                    Some(c) => {
                        comp_labels.insert(id, c);
                    }
                    None => ok = false,
                },
            }
        }
        for q in std::iter::once(&initial).chain(edges.iter().flat_map(|(a, b)| [a, b])) {
            if !declared.contains(&q.text) {
                self.errors.push(Diagnostic::error(q.line, q.column, format!("unknown state `{}`", q.text)));
                ok = false;
            }
        }
        let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (a, b) in &edges {
            if !succ.entry(a.text.as_str()).or_default().insert(b.text.as_str()) {
                self.warnings.push(Diagnostic::warning(a.line, a.column, format!("duplicate transition {} -> {}", a.text, b.text)));
            }
        }
        if !ok {
            return Ok(None);
        }
        let mut reach = BTreeSet::from([initial.text.as_str()]);
        let mut stack = vec![initial.text.as_str()];
        while let Some(q) = stack.pop() {
            for r in succ.get(q).into_iter().flatten() {
                if reach.insert(r) {
                    stack.push(r);
                }
            }
        }
        for (q, _, _) in &states {
            if !reach.contains(q.text.as_str()) {
                self.warnings.push(Diagnostic::warning(q.line, q.column, format!("state `{}` is unreachable", q.text)));
            }
        }
        let init = StateId::new(&initial.text);
        let edges: Vec<(StateId, StateId)> =
            edges.iter().map(|(a, b)| (StateId::new(&a.text), StateId::new(&b.text))).collect();
        let built = if is_interface {
            StatefulInterface::new(sig, init, iface_labels, edges).map(Item::StatefulInterface)
        } else {
            StatefulComponent::new(sig, init, comp_labels, edges).map(Item::StatefulComponent)
        };
        match built {
            Ok(item) => Ok(Some(item)),
            Err(e) => {
                self.errors.push(Diagnostic::error(initial.line, initial.column, e.to_string()));
                Ok(None)
            }
        }
    }

    fn signature(&mut self, io: &Io) -> Option<Signature> {
        let mut inputs = VarSet::new();
        let mut outputs = VarSet::new();
        let mut ok = true;
        for n in &io.inputs {
            if !inputs.insert(Var::new(&n.text)) {
                self.warnings.push(Diagnostic::warning(n.line, n.column, format!("input `{}` listed twice", n.text)));
            }
        }
        for n in &io.outputs {
            if inputs.contains(n.text.as_str()) {
                self.errors.push(Diagnostic::error(n.line, n.column, format!("`{}` is declared both as input and output", n.text)));
                ok = false;
            } else if !outputs.insert(Var::new(&n.text)) {
                self.warnings.push(Diagnostic::warning(n.line, n.column, format!("output `{}` listed twice", n.text)));
            }
        }
        if !ok {
            return None;
        }
        Some(Signature::new(inputs, outputs).expect("overlap reported above"))
    }

    fn relation(&mut self, sig: &Signature, raw: &[RawPair], role: Role, no_flow: bool) -> Option<Vec<Pair>> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut ok = true;
        let targets = if role == Role::Assumption { sig.inputs() } else { sig.outputs() };
        let target_kind = if role == Role::Assumption { "an input" } else { "an output" };
        for p in raw {
            let known = |n: &Name| sig.inputs().contains(n.text.as_str()) || sig.outputs().contains(n.text.as_str());
            if !known(&p.from) {
                self.errors.push(Diagnostic::error(p.from.line, p.from.column, format!("unknown variable `{}`", p.from.text)));
                ok = false;
            }
            if !known(&p.to) {
                self.errors.push(Diagnostic::error(p.to.line, p.to.column, format!("unknown variable `{}`", p.to.text)));
                ok = false;
                continue;
            }
            if !targets.contains(p.to.text.as_str()) {
                self.errors.push(Diagnostic::error(
                    p.to.line,
                    p.to.column,
                    format!("{role} pair must target {target_kind}, `{}` is not", p.to.text),
                ));
                ok = false;
                continue;
            }
            if no_flow && p.from.text == p.to.text {
                self.errors.push(Diagnostic::error(
                    p.from.line,
                    p.from.column,
                    format!("{role} relates `{}` to itself", p.from.text),
                ));
                ok = false;
            }
            let pair = (Var::new(&p.from.text), Var::new(&p.to.text));
            if !seen.insert(pair.clone()) {
                self.warnings.push(Diagnostic::warning(p.from.line, p.from.column, format!("duplicate {role} pair")));
            }
            out.push(pair);
        }
        ok.then_some(out)
    }

    fn build_interface(&mut self, sig: &Signature, c: &Clauses, no_flow: bool) -> Option<StatelessInterface> {
        let a = self.relation(sig, &c.assume, Role::Assumption, no_flow);
        let g = self.relation(sig, &c.guarantee, Role::Guarantee, no_flow);
        let p = self.relation(sig, &c.property, Role::Property, no_flow);
        let (a, g, p) = (a?, g?, p?);
        Some(
            StatelessInterface::new(sig.inputs().clone(), sig.outputs().clone(), a, g, p)
                .expect("pairs validated above"),
        )
    }

    fn build_component(&mut self, sig: &Signature, at: &Token, raw: &[RawPair], strict: bool) -> Option<StatelessComponent> {
        let flows = self.relation(sig, raw, Role::Flows, false)?;
        match StatelessComponent::new(sig.inputs().clone(), sig.outputs().clone(), flows, !strict) {
            Ok(c) => Some(c),
            Err(e) => {
                self.errors.push(Diagnostic::error(at.line, at.column, e.to_string()));
                None
            }
        }
    }
}

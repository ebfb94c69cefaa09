//! Finite relations over named variables.
//!
//! A [`Relation`] is a set of ordered variable pairs together with a declared
//! domain and codomain. Complements are taken against that rectangle.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A variable name. Cheap to clone; ordered and compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Var {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(Arc::from(s))
    }
}

pub type VarSet = BTreeSet<Var>;
pub type Pair = (Var, Var);

/// Builds a variable set from names.
pub fn vars<I, S>(names: I) -> VarSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(|s| Var::new(s.as_ref())).collect()
}

/// Builds a list of pairs from name tuples.
pub fn pairs(list: &[(&str, &str)]) -> Vec<Pair> {
    list.iter().map(|(a, b)| (Var::new(a), Var::new(b))).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("pair ({0}, {1}) lies outside the declared domain and codomain")]
    OutOfRange(Var, Var),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Relation {
    pairs: BTreeSet<Pair>,
    domain: VarSet,
    codomain: VarSet,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.pairs.iter().map(|(a, b)| format!("{a}->{b}")))
            .finish()
    }
}

impl Relation {
    pub fn new<I>(domain: VarSet, codomain: VarSet, pairs: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = Pair>,
    {
        let pairs: BTreeSet<Pair> = pairs.into_iter().collect();
        if let Some((a, b)) = pairs
            .iter()
            .find(|(a, b)| !domain.contains(a) || !codomain.contains(b))
        {
            return Err(RelationError::OutOfRange(a.clone(), b.clone()));
        }
        Ok(Relation { pairs, domain, codomain })
    }

    pub fn empty(domain: VarSet, codomain: VarSet) -> Self {
        Relation { pairs: BTreeSet::new(), domain, codomain }
    }

    pub fn full(domain: VarSet, codomain: VarSet) -> Self {
        let pairs = domain
            .iter()
            .flat_map(|a| codomain.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        Relation { pairs, domain, codomain }
    }

    pub fn identity(v: &VarSet) -> Self {
        Relation {
            pairs: v.iter().map(|x| (x.clone(), x.clone())).collect(),
            domain: v.clone(),
            codomain: v.clone(),
        }
    }

    pub fn pairs(&self) -> &BTreeSet<Pair> {
        &self.pairs
    }

    pub fn into_pairs(self) -> BTreeSet<Pair> {
        self.pairs
    }

    pub fn domain(&self) -> &VarSet {
        &self.domain
    }

    pub fn codomain(&self) -> &VarSet {
        &self.codomain
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&(Var::new(a), Var::new(b)))
    }

    pub fn contains_pair(&self, pair: &Pair) -> bool {
        self.pairs.contains(pair)
    }

    /// Successors of `a`, in name order.
    pub fn image<'a>(&'a self, a: &'a Var) -> impl Iterator<Item = &'a Var> + 'a {
        self.pairs
            .range((a.clone(), Var::new(""))..)
            .take_while(move |(x, _)| x == a)
            .map(|(_, b)| b)
    }

    fn index(&self) -> BTreeMap<&Var, Vec<&Var>> {
        let mut map: BTreeMap<&Var, Vec<&Var>> = BTreeMap::new();
        for (a, b) in &self.pairs {
            map.entry(a).or_default().push(b);
        }
        map
    }

    /// Diagrammatic composition: `(a, b)` is in the result iff some `c`
    /// has `(a, c)` in `self` and `(c, b)` in `other`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let right = other.index();
        let mut pairs = BTreeSet::new();
        for (a, c) in &self.pairs {
            if let Some(bs) = right.get(c) {
                for b in bs {
                    pairs.insert((a.clone(), (*b).clone()));
                }
            }
        }
        Relation { pairs, domain: self.domain.clone(), codomain: other.codomain.clone() }
    }

    /// Complement against the declared rectangle.
    pub fn complement(&self) -> Relation {
        let mut pairs = BTreeSet::new();
        for a in &self.domain {
            for b in &self.codomain {
                let p = (a.clone(), b.clone());
                if !self.pairs.contains(&p) {
                    pairs.insert(p);
                }
            }
        }
        Relation { pairs, domain: self.domain.clone(), codomain: self.codomain.clone() }
    }

    /// Union; the rectangle widens to cover both operands.
    pub fn union(&self, other: &Relation) -> Relation {
        Relation {
            pairs: self.pairs.union(&other.pairs).cloned().collect(),
            domain: self.domain.union(&other.domain).cloned().collect(),
            codomain: self.codomain.union(&other.codomain).cloned().collect(),
        }
    }

    /// Intersection; keeps the rectangle of `self`.
    pub fn intersection(&self, other: &Relation) -> Relation {
        Relation {
            pairs: self.pairs.intersection(&other.pairs).cloned().collect(),
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
        }
    }

    /// Difference; keeps the rectangle of `self`.
    pub fn difference(&self, other: &Relation) -> Relation {
        Relation {
            pairs: self.pairs.difference(&other.pairs).cloned().collect(),
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
        }
    }

    /// Keeps the pairs inside `domain × codomain` and re-declares the rectangle.
    pub fn restrict(&self, domain: &VarSet, codomain: &VarSet) -> Relation {
        Relation {
            pairs: self
                .pairs
                .iter()
                .filter(|(a, b)| domain.contains(a) && codomain.contains(b))
                .cloned()
                .collect(),
            domain: domain.clone(),
            codomain: codomain.clone(),
        }
    }

    /// Compares pair sets only.
    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn same_pairs(&self, other: &Relation) -> bool {
        self.pairs == other.pairs
    }

    /// Variables `x` with `(x, x)` in the relation.
    pub fn reflexive_points(&self) -> Vec<Var> {
        self.pairs.iter().filter(|(a, b)| a == b).map(|(a, _)| a.clone()).collect()
    }

    pub fn is_irreflexive(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a != b)
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }
}

/// Smallest transitively closed relation containing `r` and the identity on
/// `reflexive_over`.
pub fn star(r: &Relation, reflexive_over: &VarSet) -> Relation {
    let adj = r.index();
    let mut pairs: BTreeSet<Pair> = reflexive_over.iter().map(|x| (x.clone(), x.clone())).collect();
    for start in adj.keys() {
        let mut seen: BTreeSet<&Var> = BTreeSet::new();
        let mut stack: Vec<&Var> = adj[start].clone();
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                if let Some(next) = adj.get(v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        for v in seen {
            pairs.insert(((*start).clone(), v.clone()));
        }
    }
    Relation {
        pairs,
        domain: r.domain.union(reflexive_over).cloned().collect(),
        codomain: r.codomain.union(reflexive_over).cloned().collect(),
    }
}

/// `⋃ₙ (Id_head ∪ first) ∘ (second ∘ first)ⁿ ∘ (Id_tail ∪ second)`.
///
/// Paths alternate `first` and `second` steps, starting with `first` unless the
/// source is in `head_ids` and ending with `second` unless the target is in
/// `tail_ids`.
pub fn alternating_paths(
    first: &Relation,
    second: &Relation,
    head_ids: &VarSet,
    tail_ids: &VarSet,
) -> Relation {
    let head = Relation::identity(head_ids).union(first);
    let tail = Relation::identity(tail_ids).union(second);
    let middle = second.compose(first);
    let mut acc = head;
    loop {
        let next = acc.union(&acc.compose(&middle));
        if next.pairs.len() == acc.pairs.len() {
            break;
        }
        acc = next;
    }
    acc.compose(&tail)
}

/// Which operand of [`alternating_paths`] a path step uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    First,
    Second,
}

/// A concrete path realizing a pair of [`alternating_paths`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingPath {
    pub vertices: Vec<Var>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Last {
    Start,
    Took(Step),
}

/// Shortest alternating path from `from` to `to`, found breadth first with
/// neighbours visited in name order.
pub fn alternating_witness(
    first: &Relation,
    second: &Relation,
    head_ids: &VarSet,
    tail_ids: &VarSet,
    from: &Var,
    to: &Var,
) -> Option<AlternatingPath> {
    if from == to && head_ids.contains(from) && tail_ids.contains(from) {
        return Some(AlternatingPath { vertices: vec![from.clone()], steps: vec![] });
    }
    let accepting = |v: &Var, last: Last| {
        v == to
            && match last {
                Last::Start => false,
                Last::Took(Step::Second) => true,
                Last::Took(Step::First) => tail_ids.contains(v),
            }
    };
    let mut pred: BTreeMap<(Var, Last), (Var, Last)> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let start = (from.clone(), Last::Start);
    queue.push_back(start.clone());
    let mut seen = BTreeSet::from([start.clone()]);
    while let Some((v, last)) = queue.pop_front() {
        let mut moves: Vec<(Var, Step)> = Vec::new();
        let allow_first = matches!(last, Last::Start | Last::Took(Step::Second));
        let allow_second = match last {
            Last::Start => head_ids.contains(&v),
            Last::Took(Step::First) => true,
            Last::Took(Step::Second) => false,
        };
        if allow_first {
            moves.extend(first.image(&v).map(|w| (w.clone(), Step::First)));
        }
        if allow_second {
            moves.extend(second.image(&v).map(|w| (w.clone(), Step::Second)));
        }
        moves.sort();
        for (w, step) in moves {
            let node = (w.clone(), Last::Took(step));
            if !seen.insert(node.clone()) {
                continue;
            }
            pred.insert(node.clone(), (v.clone(), last));
            if accepting(&w, Last::Took(step)) {
                return Some(unwind(&pred, node, &start));
            }
            queue.push_back(node);
        }
    }
    None
}

fn unwind(
    pred: &BTreeMap<(Var, Last), (Var, Last)>,
    end: (Var, Last),
    start: &(Var, Last),
) -> AlternatingPath {
    let mut vertices = vec![end.0.clone()];
    let mut steps = Vec::new();
    let mut cur = end;
    while &cur != start {
        if let Last::Took(s) = cur.1 {
            steps.push(s);
        }
        let prev = pred[&cur].clone();
        vertices.push(prev.0.clone());
        cur = prev;
    }
    vertices.reverse();
    steps.reverse();
    AlternatingPath { vertices, steps }
}

//! Formulas of the explicit/implicit belief language.
//!
//! The internal representation has one constant (`true`) and five
//! constructors: atoms, negation, conjunction, explicit belief `Exp[i]` and
//! implicit belief `Box[i]`. Everything else (`false`, `|`, `->`, `<->`,
//! `Poss[i]`) is sugar and is expanded by the smart constructors below.
//!
//! The argument of `Exp[i]` is always Box-free. [`Formula`] cannot be built
//! any other way: the only constructor that can create an `Exp` node checks
//! its body first.

mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use parser::{check_agent, make_atom, parse_raw, Modal, Raw, RawKind};
pub use parser::{parse_formula, parse_formula_with, ParseError, ParseOptions, Pos};

/// An atomic proposition.
///
/// User-facing names match `[a-z][A-Za-z0-9_]*`. Names with a leading
/// underscore are reserved for atoms the toolkit invents itself (fresh atoms,
/// context markers) and are rejected by the default parser.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Atom(Arc<str>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid atom name `{0}`")]
pub struct InvalidAtom(pub String);

impl Atom {
    /// Builds a user atom; reserved names are refused.
    pub fn new(name: &str) -> Result<Self, InvalidAtom> {
        if is_user_atom_name(name) {
            Ok(Atom(name.into()))
        } else {
            Err(InvalidAtom(name.to_string()))
        }
    }

    /// Builds an atom in the reserved namespace (`_...`).
    pub fn reserved(name: &str) -> Result<Self, InvalidAtom> {
        if is_reserved_atom_name(name) {
            Ok(Atom(name.into()))
        } else {
            Err(InvalidAtom(name.to_string()))
        }
    }

    /// Accepts either namespace.
    pub fn any(name: &str) -> Result<Self, InvalidAtom> {
        Self::new(name).or_else(|_| Self::reserved(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with('_')
    }
}

pub(crate) fn is_user_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "true"
        && name != "false"
}

pub(crate) fn is_reserved_atom_name(name: &str) -> bool {
    name.len() > 1
        && name.starts_with('_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl From<Atom> for String {
    fn from(a: Atom) -> String {
        a.0.to_string()
    }
}

impl TryFrom<String> for Atom {
    type Error = InvalidAtom;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Atom::any(&s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A 1-based agent index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(u32);

impl AgentId {
    /// Panics on 0; agent indices start at 1.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "agent indices are 1-based");
        AgentId(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// Position in a dense per-agent vector.
    pub fn slot(self) -> usize {
        (self.0 - 1) as usize
    }

    /// All agents `1..=n`.
    pub fn all(n: u32) -> impl Iterator<Item = AgentId> {
        (1..=n).map(AgentId)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The shape of a formula node.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Top,
    Atom(Atom),
    Not(Formula),
    And(Formula, Formula),
    /// Explicit belief; the body is Box-free.
    Exp(AgentId, Formula),
    /// Implicit belief.
    Box(AgentId, Formula),
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Inner {
    node: Node,
    l0: bool,
    modal_depth: usize,
    size: usize,
    max_agent: u32,
}

/// An immutable, cheaply clonable formula.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula(Arc<Inner>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("argument of Exp[{agent}] is not Box-free: {body}")]
pub struct StratificationError {
    pub agent: AgentId,
    pub body: Formula,
}

impl Formula {
    fn make(node: Node) -> Self {
        let (l0, modal_depth, size, max_agent) = match &node {
            Node::Top => (true, 0, 1, 0),
            Node::Atom(_) => (true, 0, 1, 0),
            Node::Not(a) => (a.is_l0(), a.modal_depth(), a.size() + 1, a.max_agent()),
            Node::And(a, b) => (
                a.is_l0() && b.is_l0(),
                a.modal_depth().max(b.modal_depth()),
                a.size() + b.size() + 1,
                a.max_agent().max(b.max_agent()),
            ),
            Node::Exp(i, a) => (
                true,
                a.modal_depth() + 1,
                a.size() + 1,
                a.max_agent().max(i.index()),
            ),
            Node::Box(i, a) => (
                false,
                a.modal_depth() + 1,
                a.size() + 1,
                a.max_agent().max(i.index()),
            ),
        };
        Formula(Arc::new(Inner {
            node,
            l0,
            modal_depth,
            size,
            max_agent,
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// Rebuilds a formula from a node, enforcing stratification.
    pub fn from_node(node: Node) -> Result<Self, StratificationError> {
        if let Node::Exp(i, body) = &node {
            if !body.is_l0() {
                return Err(StratificationError {
                    agent: *i,
                    body: body.clone(),
                });
            }
        }
        Ok(Self::make(node))
    }

    pub fn top() -> Self {
        Self::make(Node::Top)
    }

    pub fn bot() -> Self {
        Self::not(Self::top())
    }

    pub fn atom(a: Atom) -> Self {
        Self::make(Node::Atom(a))
    }

    /// Shorthand for tests and fixtures; panics on an invalid name.
    pub fn var(name: &str) -> Self {
        Self::atom(Atom::any(name).expect("valid atom name"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Self::make(Node::Not(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Self::make(Node::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Self::not(Self::and(Self::not(a), Self::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::not(Self::and(a, Self::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a))
    }

    pub fn exp(agent: AgentId, body: Formula) -> Result<Self, StratificationError> {
        Self::from_node(Node::Exp(agent, body))
    }

    pub fn boxed(agent: AgentId, body: Formula) -> Self {
        Self::make(Node::Box(agent, body))
    }

    /// `Poss[i] f`, i.e. `~Box[i] ~f`.
    pub fn poss(agent: AgentId, body: Formula) -> Self {
        Self::not(Self::boxed(agent, Self::not(body)))
    }

    /// Conjunction of a list; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Self::top(),
            Some(first) => iter.fold(first, Self::and),
        }
    }

    /// True iff the formula contains no `Box` node.
    pub fn is_l0(&self) -> bool {
        self.0.l0
    }

    pub fn modal_depth(&self) -> usize {
        self.0.modal_depth
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// Largest agent index mentioned, 0 if none.
    pub fn max_agent(&self) -> u32 {
        self.0.max_agent
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self.node() {
            Node::Top | Node::Atom(_) => vec![],
            Node::Not(a) | Node::Exp(_, a) | Node::Box(_, a) => vec![a],
            Node::And(a, b) => vec![a, b],
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self.node() {
            Node::Atom(a) => Some(a),
            _ => None,
        }
    }
}

pub type FormulaSet = BTreeSet<Formula>;
pub type AtomSet = BTreeSet<Atom>;

/// The smallest set containing `f` and closed under immediate subformulas.
pub fn subformulas(f: &Formula) -> FormulaSet {
    let mut out = FormulaSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if out.insert(g.clone()) {
            stack.extend(g.children());
        }
    }
    out
}

/// Union of [`subformulas`] over a collection.
pub fn subformula_closure<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> FormulaSet {
    let mut out = FormulaSet::new();
    for f in fs {
        out.extend(subformulas(f));
    }
    out
}

/// True iff every immediate subformula of every member is also a member.
pub fn is_subformula_closed(set: &FormulaSet) -> bool {
    set.iter()
        .all(|f| f.children().into_iter().all(|c| set.contains(c)))
}

pub fn atoms(f: &Formula) -> AtomSet {
    let mut out = AtomSet::new();
    collect_atoms(f, &mut out);
    out
}

pub fn atoms_of<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> AtomSet {
    let mut out = AtomSet::new();
    for f in fs {
        collect_atoms(f, &mut out);
    }
    out
}

fn collect_atoms(f: &Formula, out: &mut AtomSet) {
    match f.node() {
        Node::Top => {}
        Node::Atom(a) => {
            out.insert(a.clone());
        }
        Node::Not(a) | Node::Exp(_, a) | Node::Box(_, a) => collect_atoms(a, out),
        Node::And(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

pub fn is_l0(f: &Formula) -> bool {
    f.is_l0()
}

/// Canonical concrete syntax; `parse_formula` reads it back unchanged.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Top => f.write_str("true"),
            Node::Atom(a) => write!(f, "{a}"),
            Node::Not(a) if matches!(a.node(), Node::Top) => f.write_str("false"),
            Node::Not(a) => write!(f, "~{a}"),
            Node::And(a, b) => write!(f, "({a} & {b})"),
            Node::Exp(i, a) => write!(f, "Exp[{i}] {a}"),
            Node::Box(i, a) => write!(f, "Box[{i}] {a}"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

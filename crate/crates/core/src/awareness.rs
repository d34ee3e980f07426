//! The logic of general awareness over serial structures, and the
//! embedding of the belief language into it.
//!
//! `B[i]` is implicit belief over an accessibility relation, `A[i]` is
//! syntactic awareness, and `X[i] φ` holds when both `B[i] φ` and `A[i] φ` do.
//! [`translate`] maps `Exp[i]` to `X[i]` and `Box[i]` to `B[i]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ndm::{check_conditions, DoxasticModel, NdmError, QuasiNdm};
use crate::syntax::{
    check_agent, make_atom, parse_raw, AgentId, Atom, Formula, Modal, Node, ParseError,
    ParseOptions, Raw, RawKind,
};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LgaNode {
    Top,
    Atom(Atom),
    Not(LgaFormula),
    And(LgaFormula, LgaFormula),
    /// Implicit belief.
    B(AgentId, LgaFormula),
    /// Awareness.
    A(AgentId, LgaFormula),
    /// Explicit belief.
    X(AgentId, LgaFormula),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LgaFormula(Arc<LgaNode>);

impl LgaFormula {
    pub fn new(node: LgaNode) -> Self {
        LgaFormula(Arc::new(node))
    }

    pub fn node(&self) -> &LgaNode {
        &self.0
    }

    pub fn top() -> Self {
        Self::new(LgaNode::Top)
    }

    pub fn atom(a: Atom) -> Self {
        Self::new(LgaNode::Atom(a))
    }

    pub fn var(name: &str) -> Self {
        Self::atom(Atom::any(name).expect("valid atom name"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: LgaFormula) -> Self {
        Self::new(LgaNode::Not(a))
    }

    pub fn and(a: LgaFormula, b: LgaFormula) -> Self {
        Self::new(LgaNode::And(a, b))
    }

    pub fn belief(i: AgentId, a: LgaFormula) -> Self {
        Self::new(LgaNode::B(i, a))
    }

    pub fn aware(i: AgentId, a: LgaFormula) -> Self {
        Self::new(LgaNode::A(i, a))
    }

    pub fn explicit(i: AgentId, a: LgaFormula) -> Self {
        Self::new(LgaNode::X(i, a))
    }

    pub fn size(&self) -> usize {
        match self.node() {
            LgaNode::Top | LgaNode::Atom(_) => 1,
            LgaNode::Not(a) | LgaNode::B(_, a) | LgaNode::A(_, a) | LgaNode::X(_, a) => {
                1 + a.size()
            }
            LgaNode::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn max_agent(&self) -> u32 {
        match self.node() {
            LgaNode::Top | LgaNode::Atom(_) => 0,
            LgaNode::Not(a) => a.max_agent(),
            LgaNode::And(a, b) => a.max_agent().max(b.max_agent()),
            LgaNode::B(i, a) | LgaNode::A(i, a) | LgaNode::X(i, a) => i.index().max(a.max_agent()),
        }
    }
}

impl fmt::Display for LgaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            LgaNode::Top => f.write_str("true"),
            LgaNode::Atom(a) => write!(f, "{a}"),
            LgaNode::Not(a) if matches!(a.node(), LgaNode::Top) => f.write_str("false"),
            LgaNode::Not(a) => write!(f, "~{a}"),
            LgaNode::And(a, b) => write!(f, "({a} & {b})"),
            LgaNode::B(i, a) => write!(f, "B[{i}] {a}"),
            LgaNode::A(i, a) => write!(f, "A[{i}] {a}"),
            LgaNode::X(i, a) => write!(f, "X[{i}] {a}"),
        }
    }
}

impl fmt::Debug for LgaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for LgaFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

const LGA_MODALS: &[Modal] = &[Modal::B, Modal::A, Modal::X];

fn lower(raw: &Raw, opts: &ParseOptions) -> Result<LgaFormula, ParseError> {
    let sub = |r: &Raw| lower(r, opts);
    let not = LgaFormula::not;
    Ok(match &raw.kind {
        RawKind::Top => LgaFormula::top(),
        RawKind::Bot => not(LgaFormula::top()),
        RawKind::Atom(name) => LgaFormula::atom(make_atom(name, raw.pos, opts.allow_reserved)?),
        RawKind::Not(a) => not(sub(a)?),
        RawKind::And(a, b) => LgaFormula::and(sub(a)?, sub(b)?),
        RawKind::Or(a, b) => not(LgaFormula::and(not(sub(a)?), not(sub(b)?))),
        RawKind::Implies(a, b) => not(LgaFormula::and(sub(a)?, not(sub(b)?))),
        RawKind::Iff(a, b) => {
            let (x, y) = (sub(a)?, sub(b)?);
            LgaFormula::and(
                not(LgaFormula::and(x.clone(), not(y.clone()))),
                not(LgaFormula::and(y, not(x))),
            )
        }
        RawKind::Modal(m, i, body) => {
            check_agent(*i, raw.pos, opts.n_agents)?;
            let body = sub(body)?;
            match m {
                Modal::B => LgaFormula::belief(*i, body),
                Modal::A => LgaFormula::aware(*i, body),
                Modal::X => LgaFormula::explicit(*i, body),
                Modal::Exp | Modal::Box | Modal::Poss => unreachable!("not an LGA keyword"),
            }
        }
    })
}

/// Parses the awareness language (`B[i]`, `A[i]`, `X[i]`).
pub fn parse_lga(text: &str, opts: ParseOptions) -> Result<LgaFormula, ParseError> {
    lower(&parse_raw(text, LGA_MODALS)?, &opts)
}

/// The embedding: identity on the propositional part, `Exp[i] ↦ X[i]`,
/// `Box[i] ↦ B[i]`.
pub fn translate(f: &Formula) -> LgaFormula {
    match f.node() {
        Node::Top => LgaFormula::top(),
        Node::Atom(p) => LgaFormula::atom(p.clone()),
        Node::Not(a) => LgaFormula::not(translate(a)),
        Node::And(a, b) => LgaFormula::and(translate(a), translate(b)),
        Node::Exp(i, a) => LgaFormula::explicit(*i, translate(a)),
        Node::Box(i, a) => LgaFormula::belief(*i, translate(a)),
    }
}

/// Inverse of [`translate`] on Box-free images: `None` unless `g` is built
/// from atoms, `~`, `&` and `X[i]` only.
pub fn untranslate_l0(g: &LgaFormula) -> Option<Formula> {
    Some(match g.node() {
        LgaNode::Top => Formula::top(),
        LgaNode::Atom(p) => Formula::atom(p.clone()),
        LgaNode::Not(a) => Formula::not(untranslate_l0(a)?),
        LgaNode::And(a, b) => Formula::and(untranslate_l0(a)?, untranslate_l0(b)?),
        LgaNode::X(i, a) => Formula::exp(*i, untranslate_l0(a)?).ok()?,
        LgaNode::B(..) | LgaNode::A(..) => return None,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AwarenessError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("a structure needs at least one state")]
    NoStates,
    #[error("relation of agent {agent} has no successor at state `{state}`")]
    NotSerial { agent: AgentId, state: String },
    #[error(transparent)]
    Model(#[from] NdmError),
}

/// `(S, R_1..R_n, A_1..A_n, π)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AwarenessStructure {
    n_agents: u32,
    states: Vec<String>,
    access: Vec<Vec<BTreeSet<usize>>>,
    awareness: Vec<Vec<BTreeSet<LgaFormula>>>,
    valuation: BTreeMap<Atom, BTreeSet<usize>>,
}

impl AwarenessStructure {
    /// States with no successors, no awareness and nothing true.
    pub fn new(n_agents: u32, states: Vec<String>) -> Result<Self, AwarenessError> {
        if states.is_empty() {
            return Err(AwarenessError::NoStates);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(AwarenessError::DuplicateState(s.clone()));
            }
        }
        let k = states.len();
        Ok(AwarenessStructure {
            n_agents,
            states,
            access: vec![vec![BTreeSet::new(); k]; n_agents as usize],
            awareness: vec![vec![BTreeSet::new(); k]; n_agents as usize],
            valuation: BTreeMap::new(),
        })
    }

    pub fn with_state_count(n_agents: u32, k: usize) -> Result<Self, AwarenessError> {
        Self::new(n_agents, (0..k).map(|j| format!("s{j}")).collect())
    }

    pub fn n_agents(&self) -> u32 {
        self.n_agents
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Result<usize, AwarenessError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| AwarenessError::UnknownState(name.to_string()))
    }

    pub fn successors(&self, i: AgentId, s: usize) -> &BTreeSet<usize> {
        &self.access[i.slot()][s]
    }

    pub fn awareness(&self, i: AgentId, s: usize) -> &BTreeSet<LgaFormula> {
        &self.awareness[i.slot()][s]
    }

    pub fn valuation(&self) -> &BTreeMap<Atom, BTreeSet<usize>> {
        &self.valuation
    }

    pub fn add_edge(&mut self, i: AgentId, s: usize, t: usize) {
        assert!(t < self.states.len(), "state out of range");
        self.access[i.slot()][s].insert(t);
    }

    pub fn set_successors(&mut self, i: AgentId, s: usize, ts: BTreeSet<usize>) {
        assert!(
            ts.iter().all(|&t| t < self.states.len()),
            "state out of range"
        );
        self.access[i.slot()][s] = ts;
    }

    pub fn add_awareness(&mut self, i: AgentId, s: usize, g: LgaFormula) {
        self.awareness[i.slot()][s].insert(g);
    }

    pub fn set_true(&mut self, p: Atom, s: usize) {
        self.valuation.entry(p).or_default().insert(s);
    }

    pub fn is_true(&self, p: &Atom, s: usize) -> bool {
        self.valuation.get(p).is_some_and(|ss| ss.contains(&s))
    }

    /// First state/agent pair without a successor, if any.
    pub fn check_serial(&self) -> Result<(), AwarenessError> {
        for i in AgentId::all(self.n_agents) {
            for s in 0..self.states.len() {
                if self.access[i.slot()][s].is_empty() {
                    return Err(AwarenessError::NotSerial {
                        agent: i,
                        state: self.states[s].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_serial(&self) -> bool {
        self.check_serial().is_ok()
    }

    pub fn eval(&self, s: usize, g: &LgaFormula) -> bool {
        match g.node() {
            LgaNode::Top => true,
            LgaNode::Atom(p) => self.is_true(p, s),
            LgaNode::Not(a) => !self.eval(s, a),
            LgaNode::And(a, b) => self.eval(s, a) && self.eval(s, b),
            LgaNode::B(i, a) => self.access[i.slot()][s].iter().all(|&t| self.eval(t, a)),
            LgaNode::A(i, a) => self.awareness[i.slot()][s].contains(a),
            LgaNode::X(i, a) => {
                self.eval(s, &LgaFormula::belief(*i, a.clone()))
                    && self.eval(s, &LgaFormula::aware(*i, a.clone()))
            }
        }
    }
}

/// Truth at a named state.
pub fn eval_awareness(
    m: &AwarenessStructure,
    s: &str,
    g: &LgaFormula,
) -> Result<bool, AwarenessError> {
    Ok(m.eval(m.state_index(s)?, g))
}

/// `R_i(w) = N(i,w)`, `A_i(w) = tr(D(i,w))`, same valuation; world names are kept.
pub fn quasi_ndm_to_awareness(m: &DoxasticModel) -> Result<AwarenessStructure, AwarenessError> {
    let report = check_conditions(m);
    if !(report.c1_star && report.c2) {
        return Err(NdmError::ConditionViolation(report.violations).into());
    }
    let mut out = AwarenessStructure::new(m.n_agents(), m.worlds().to_vec())?;
    for i in AgentId::all(m.n_agents()) {
        for w in 0..m.world_count() {
            out.set_successors(i, w, m.notional(i, w).clone());
            for alpha in m.doxastic(i, w) {
                out.add_awareness(i, w, translate(alpha));
            }
        }
    }
    for (p, ws) in m.valuation() {
        for &w in ws {
            out.set_true(p.clone(), w);
        }
    }
    Ok(out)
}

/// `N(i,s) = R_i(s)` and `D(i,s)` = the Box-free `α` with `tr(α)` in `A_i(s)`
/// and `B[i] tr(α)` true at `s`. Awareness entries outside the image of the
/// translation are ignored.
pub fn awareness_to_quasi_ndm(m: &AwarenessStructure) -> Result<QuasiNdm, AwarenessError> {
    m.check_serial()?;
    let mut out = DoxasticModel::new(m.n_agents(), m.states().to_vec())?;
    for i in AgentId::all(m.n_agents()) {
        for s in 0..m.state_count() {
            out.set_notional(i, s, m.successors(i, s).clone());
            for g in m.awareness(i, s) {
                let Some(alpha) = untranslate_l0(g) else {
                    continue;
                };
                if m.eval(s, &LgaFormula::belief(i, g.clone())) {
                    out.add_belief(i, s, alpha)?;
                }
            }
        }
    }
    for (p, ss) in m.valuation() {
        for &s in ss {
            out.set_true(p.clone(), s);
        }
    }
    Ok(QuasiNdm::new(out)?)
}

//! Tableau for the logic of general awareness over serial structures.
//!
//! Nodes are sets of NNF formulas. Conjunctions are split first, then
//! disjunctions branch; a node with neither is saturated and gets, per agent,
//! one successor per `Poss[i]` witness (each carrying all `B[i]` bodies), or a
//! single successor with just the `B[i]` bodies when there is no witness.
//! Agents with no modal formulas at a node get a self-loop in the extracted
//! model. Awareness literals behave like atoms local to a node.
//!
//! Exploration is depth-first under a node budget. A closed tableau is kept
//! as a [`Proof`] that [`replay`] re-checks from the root set.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::nnf::Nnf;
use crate::awareness::{AwarenessStructure, LgaFormula};
use crate::syntax::{AgentId, Atom};

/// A closed tableau, one rule application per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Proof {
    /// The node contains `false`.
    Bottom,
    /// The node contains `literal` and its complement.
    Clash { literal: Nnf },
    /// Split a conjunction.
    Conjunction { formula: Nnf, next: Box<Proof> },
    /// Both sides of a disjunction close.
    Disjunction {
        formula: Nnf,
        left: Box<Proof>,
        right: Box<Proof>,
    },
    /// The successor for `agent` (with `witness`, or the seriality successor
    /// when absent) closes.
    Modal {
        agent: AgentId,
        witness: Option<Nnf>,
        next: Box<Proof>,
    },
}

impl Proof {
    pub fn size(&self) -> usize {
        match self {
            Proof::Bottom | Proof::Clash { .. } => 1,
            Proof::Conjunction { next, .. } | Proof::Modal { next, .. } => 1 + next.size(),
            Proof::Disjunction { left, right, .. } => 1 + left.size() + right.size(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("`false` is not in the node")]
    NoBottom,
    #[error("no clash on {0}")]
    NoClash(Nnf),
    #[error("{0} is not a conjunction in the node")]
    NoConjunction(Nnf),
    #[error("{0} is not a disjunction in the node")]
    NoDisjunction(Nnf),
    #[error("Poss[{agent}] {witness} is not in the node")]
    NoWitness { agent: AgentId, witness: Nnf },
}

/// The successor set for `agent`: all `B[agent]` bodies plus the witness.
pub(crate) fn successor(
    set: &BTreeSet<Nnf>,
    agent: AgentId,
    witness: Option<&Nnf>,
) -> BTreeSet<Nnf> {
    let mut out: BTreeSet<Nnf> = set
        .iter()
        .filter_map(|f| match f {
            Nnf::Nec(i, body) if *i == agent => Some((**body).clone()),
            _ => None,
        })
        .collect();
    if let Some(w) = witness {
        out.insert(w.clone());
    }
    out
}

/// Checks that `proof` closes the node `set`.
pub fn replay(set: &BTreeSet<Nnf>, proof: &Proof) -> Result<(), ReplayError> {
    match proof {
        Proof::Bottom => set
            .contains(&Nnf::False)
            .then_some(())
            .ok_or(ReplayError::NoBottom),
        Proof::Clash { literal } => {
            let closes = literal
                .complement()
                .is_some_and(|c| set.contains(literal) && set.contains(&c));
            closes
                .then_some(())
                .ok_or_else(|| ReplayError::NoClash(literal.clone()))
        }
        Proof::Conjunction { formula, next } => {
            let Nnf::And(a, b) = formula else {
                return Err(ReplayError::NoConjunction(formula.clone()));
            };
            if !set.contains(formula) {
                return Err(ReplayError::NoConjunction(formula.clone()));
            }
            let mut child = set.clone();
            child.remove(formula);
            child.insert((**a).clone());
            child.insert((**b).clone());
            replay(&child, next)
        }
        Proof::Disjunction {
            formula,
            left,
            right,
        } => {
            let Nnf::Or(a, b) = formula else {
                return Err(ReplayError::NoDisjunction(formula.clone()));
            };
            if !set.contains(formula) {
                return Err(ReplayError::NoDisjunction(formula.clone()));
            }
            for (side, proof) in [(a, left), (b, right)] {
                let mut child = set.clone();
                child.remove(formula);
                child.insert((**side).clone());
                replay(&child, proof)?;
            }
            Ok(())
        }
        Proof::Modal {
            agent,
            witness,
            next,
        } => {
            if let Some(w) = witness {
                if !set.contains(&Nnf::Poss(*agent, Box::new(w.clone()))) {
                    return Err(ReplayError::NoWitness {
                        agent: *agent,
                        witness: w.clone(),
                    });
                }
            }
            replay(&successor(set, *agent, witness.as_ref()), next)
        }
    }
}

/// A saturated open node and its open successors.
#[derive(Debug, Clone)]
pub struct OpenNode {
    pub true_atoms: BTreeSet<Atom>,
    pub aware: Vec<(AgentId, LgaFormula)>,
    pub successors: Vec<(AgentId, OpenNode)>,
}

impl OpenNode {
    pub fn depth(&self) -> usize {
        self.successors
            .iter()
            .map(|(_, c)| 1 + c.depth())
            .max()
            .unwrap_or(0)
    }

    /// One state per node, root first (`s0`).
    pub fn to_structure(&self, n_agents: u32) -> AwarenessStructure {
        let mut flat: Vec<&OpenNode> = Vec::new();
        let mut edges: Vec<(usize, AgentId, usize)> = Vec::new();
        fn walk<'a>(
            node: &'a OpenNode,
            flat: &mut Vec<&'a OpenNode>,
            edges: &mut Vec<(usize, AgentId, usize)>,
        ) -> usize {
            let me = flat.len();
            flat.push(node);
            for (i, child) in &node.successors {
                let c = walk(child, flat, edges);
                edges.push((me, *i, c));
            }
            me
        }
        walk(self, &mut flat, &mut edges);
        let mut out =
            AwarenessStructure::with_state_count(n_agents, flat.len()).expect("at least the root");
        for (s, node) in flat.iter().enumerate() {
            for p in &node.true_atoms {
                out.set_true(p.clone(), s);
            }
            for (i, g) in &node.aware {
                if i.index() <= n_agents {
                    out.add_awareness(*i, s, g.clone());
                }
            }
        }
        for (s, i, t) in edges {
            out.add_edge(i, s, t);
        }
        for i in AgentId::all(n_agents) {
            for s in 0..flat.len() {
                if out.successors(i, s).is_empty() {
                    out.add_edge(i, s, s);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Open(OpenNode),
    Closed(Proof),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("node budget of {budget} exhausted")]
pub struct BudgetExhausted {
    pub budget: usize,
}

pub struct Tableau {
    budget: usize,
    pub nodes: usize,
    pub max_depth: usize,
}

impl Tableau {
    pub fn new(budget: usize) -> Self {
        Tableau {
            budget,
            nodes: 0,
            max_depth: 0,
        }
    }

    pub fn run(&mut self, root: BTreeSet<Nnf>) -> Result<Outcome, BudgetExhausted> {
        self.expand(root, 0)
    }

    fn expand(&mut self, mut set: BTreeSet<Nnf>, depth: usize) -> Result<Outcome, BudgetExhausted> {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        if self.nodes > self.budget {
            return Err(BudgetExhausted {
                budget: self.budget,
            });
        }
        if set.contains(&Nnf::False) {
            return Ok(Outcome::Closed(Proof::Bottom));
        }
        if let Some(literal) = set
            .iter()
            .find(|f| f.is_literal() && f.complement().is_some_and(|c| set.contains(&c)))
        {
            return Ok(Outcome::Closed(Proof::Clash {
                literal: literal.clone(),
            }));
        }
        set.remove(&Nnf::True);

        if let Some(conj) = set.iter().find(|f| matches!(f, Nnf::And(..))).cloned() {
            let Nnf::And(a, b) = &conj else {
                unreachable!()
            };
            set.remove(&conj);
            set.insert((**a).clone());
            set.insert((**b).clone());
            return Ok(match self.expand(set, depth)? {
                Outcome::Closed(next) => Outcome::Closed(Proof::Conjunction {
                    formula: conj,
                    next: Box::new(next),
                }),
                open => open,
            });
        }

        if let Some(disj) = set.iter().find(|f| matches!(f, Nnf::Or(..))).cloned() {
            let Nnf::Or(a, b) = &disj else { unreachable!() };
            set.remove(&disj);
            let mut left = set.clone();
            left.insert((**a).clone());
            let left = match self.expand(left, depth)? {
                Outcome::Closed(p) => p,
                open => return Ok(open),
            };
            set.insert((**b).clone());
            let right = match self.expand(set, depth)? {
                Outcome::Closed(p) => p,
                open => return Ok(open),
            };
            return Ok(Outcome::Closed(Proof::Disjunction {
                formula: disj,
                left: Box::new(left),
                right: Box::new(right),
            }));
        }

        // Saturated: only literals and modal formulas remain.
        let agents: BTreeSet<AgentId> = set
            .iter()
            .filter_map(|f| match f {
                Nnf::Nec(i, _) | Nnf::Poss(i, _) => Some(*i),
                _ => None,
            })
            .collect();
        let mut successors = Vec::new();
        for agent in agents {
            let witnesses: Vec<Nnf> = set
                .iter()
                .filter_map(|f| match f {
                    Nnf::Poss(i, body) if *i == agent => Some((**body).clone()),
                    _ => None,
                })
                .collect();
            let choices: Vec<Option<Nnf>> = if witnesses.is_empty() {
                vec![None]
            } else {
                witnesses.into_iter().map(Some).collect()
            };
            for witness in choices {
                let child = successor(&set, agent, witness.as_ref());
                match self.expand(child, depth + 1)? {
                    Outcome::Closed(next) => {
                        return Ok(Outcome::Closed(Proof::Modal {
                            agent,
                            witness,
                            next: Box::new(next),
                        }))
                    }
                    Outcome::Open(node) => successors.push((agent, node)),
                }
            }
        }

        let mut true_atoms = BTreeSet::new();
        let mut aware = Vec::new();
        for f in &set {
            match f {
                Nnf::Lit {
                    atom,
                    positive: true,
                } => {
                    true_atoms.insert(atom.clone());
                }
                Nnf::Aware {
                    agent,
                    body,
                    positive: true,
                } => aware.push((*agent, body.clone())),
                _ => {}
            }
        }
        Ok(Outcome::Open(OpenNode {
            true_atoms,
            aware,
            successors,
        }))
    }
}

//! Multi-agent belief bases and belief models.
//!
//! A [`BeliefBase`] gives each agent a finite set of Box-free formulas plus
//! the set of true atoms. Box-free formulas are evaluated directly on a base;
//! `Box[i]` looks at the members of a finite context that satisfy everything
//! in agent `i`'s base.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{AgentId, Atom, AtomSet, Formula, Node};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MabError {
    #[error("formula is not Box-free: {0}")]
    NotL0(Formula),
    #[error("agent {agent} is outside 1..={n_agents}")]
    AgentRange { agent: u32, n_agents: u32 },
}

/// `(B_1, ..., B_n, V)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BeliefBase {
    beliefs: Vec<BTreeSet<Formula>>,
    valuation: AtomSet,
}

impl BeliefBase {
    /// A base with empty belief sets and no true atoms.
    pub fn empty(n_agents: u32) -> Self {
        BeliefBase {
            beliefs: vec![BTreeSet::new(); n_agents as usize],
            valuation: AtomSet::new(),
        }
    }

    pub fn new(beliefs: Vec<BTreeSet<Formula>>, valuation: AtomSet) -> Result<Self, MabError> {
        for f in beliefs.iter().flatten() {
            if !f.is_l0() {
                return Err(MabError::NotL0(f.clone()));
            }
        }
        Ok(BeliefBase { beliefs, valuation })
    }

    pub fn n_agents(&self) -> u32 {
        self.beliefs.len() as u32
    }

    pub fn beliefs(&self, i: AgentId) -> &BTreeSet<Formula> {
        &self.beliefs[i.slot()]
    }

    pub fn valuation(&self) -> &AtomSet {
        &self.valuation
    }

    /// Adds `alpha` to agent `i`'s base.
    pub fn believe(&mut self, i: AgentId, alpha: Formula) -> Result<(), MabError> {
        if !alpha.is_l0() {
            return Err(MabError::NotL0(alpha));
        }
        if i.index() > self.n_agents() {
            return Err(MabError::AgentRange {
                agent: i.index(),
                n_agents: self.n_agents(),
            });
        }
        self.beliefs[i.slot()].insert(alpha);
        Ok(())
    }

    pub fn set_true(&mut self, p: Atom) {
        self.valuation.insert(p);
    }

    /// Builder form of [`BeliefBase::believe`]; panics on bad input.
    pub fn with_belief(mut self, i: u32, alpha: Formula) -> Self {
        self.believe(AgentId::new(i), alpha).expect("valid belief");
        self
    }

    pub fn with_true(mut self, p: &str) -> Self {
        self.set_true(Atom::any(p).expect("valid atom"));
        self
    }

    /// Every formula held by some agent.
    pub fn all_beliefs(&self) -> impl Iterator<Item = &Formula> {
        self.beliefs.iter().flatten()
    }
}

/// Satisfaction of a Box-free formula at a belief base.
pub fn eval_base(b: &BeliefBase, alpha: &Formula) -> Result<bool, MabError> {
    if !alpha.is_l0() {
        return Err(MabError::NotL0(alpha.clone()));
    }
    Ok(eval_l0(b, alpha))
}

fn eval_l0(b: &BeliefBase, alpha: &Formula) -> bool {
    match alpha.node() {
        Node::Top => true,
        Node::Atom(p) => b.valuation.contains(p),
        Node::Not(a) => !eval_l0(b, a),
        Node::And(x, y) => eval_l0(b, x) && eval_l0(b, y),
        Node::Exp(i, a) => b.beliefs.get(i.slot()).is_some_and(|set| set.contains(a)),
        Node::Box(..) => unreachable!("checked Box-free"),
    }
}

/// `b2` satisfies everything agent `i` explicitly believes at `b`.
pub fn is_alternative(b: &BeliefBase, b2: &BeliefBase, i: AgentId) -> bool {
    b.beliefs
        .get(i.slot())
        .is_none_or(|set| set.iter().all(|alpha| eval_l0(b2, alpha)))
}

/// A belief base together with a finite context of bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mab {
    n_agents: u32,
    base: BeliefBase,
    context: Vec<BeliefBase>,
}

impl Mab {
    /// Context entries are deduplicated, keeping first occurrences in order.
    pub fn new(base: BeliefBase, context: Vec<BeliefBase>) -> Self {
        let n_agents = base.n_agents();
        let mut seen = BTreeSet::new();
        let context = context
            .into_iter()
            .filter(|c| seen.insert(c.clone()))
            .collect();
        Mab {
            n_agents,
            base,
            context,
        }
    }

    pub fn n_agents(&self) -> u32 {
        self.n_agents
    }

    pub fn base(&self) -> &BeliefBase {
        &self.base
    }

    pub fn context(&self) -> &[BeliefBase] {
        &self.context
    }

    /// The same context re-rooted at another base.
    pub fn rooted_at(&self, base: BeliefBase) -> Mab {
        Mab {
            n_agents: self.n_agents,
            base,
            context: self.context.clone(),
        }
    }
}

/// Members of the context that are doxastic alternatives for `i` at the base.
pub fn alternatives(m: &Mab, i: AgentId) -> Vec<&BeliefBase> {
    m.context
        .iter()
        .filter(|c| is_alternative(&m.base, c, i))
        .collect()
}

/// Satisfaction at `(base, context)`.
pub fn eval_mab(m: &Mab, f: &Formula) -> bool {
    eval_at(&m.base, &m.context, f)
}

fn eval_at(b: &BeliefBase, cxt: &[BeliefBase], f: &Formula) -> bool {
    if f.is_l0() {
        return eval_l0(b, f);
    }
    match f.node() {
        Node::Not(a) => !eval_at(b, cxt, a),
        Node::And(x, y) => eval_at(b, cxt, x) && eval_at(b, cxt, y),
        Node::Box(i, a) => cxt
            .iter()
            .filter(|c| is_alternative(b, c, *i))
            .all(|c| eval_at(c, cxt, a)),
        Node::Top | Node::Atom(_) | Node::Exp(..) => unreachable!("Box-free handled above"),
    }
}

/// Every base in `context ∪ {base}` has, for every agent, an alternative in
/// the context.
pub fn is_cmab(m: &Mab) -> bool {
    std::iter::once(&m.base).chain(&m.context).all(|b| {
        AgentId::all(m.n_agents).all(|i| m.context.iter().any(|c| is_alternative(b, c, i)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s, 2).unwrap()
    }
    fn one() -> AgentId {
        AgentId::new(1)
    }

    /// The belief base of the running example: B_1 = {p, Exp[2] p}, B_2 = {p}, V = {p, q}.
    fn example_base() -> BeliefBase {
        BeliefBase::empty(2)
            .with_belief(1, f("p"))
            .with_belief(1, f("Exp[2] p"))
            .with_belief(2, f("p"))
            .with_true("p")
            .with_true("q")
    }

    fn example_mab() -> Mab {
        let c1 = example_base();
        let c2 = BeliefBase::empty(2)
            .with_belief(1, f("p"))
            .with_belief(2, f("p"))
            .with_true("p")
            .with_true("q");
        let c3 = BeliefBase::empty(2).with_true("q");
        Mab::new(example_base(), vec![c1, c2, c3])
    }

    #[test]
    fn eval_base_examples() {
        let b = example_base();
        assert!(eval_base(&b, &f("Exp[1] p")).unwrap());
        assert!(!eval_base(&b, &f("Exp[1] (p & p)")).unwrap());
        // set-membership oracle for the structural reading
        assert!(!b.beliefs(one()).iter().any(|x| *x == f("p & p")));
        assert!(eval_base(&b, &f("q")).unwrap());
        assert!(matches!(
            eval_base(&b, &f("Box[1] p")),
            Err(MabError::NotL0(_))
        ));
    }

    #[test]
    fn alternative_examples() {
        let empty = BeliefBase::empty(2);
        assert!(is_alternative(&empty, &example_base(), one()));
        let holds_p = BeliefBase::empty(2).with_belief(1, f("p"));
        assert!(is_alternative(
            &holds_p,
            &BeliefBase::empty(2).with_true("p"),
            one()
        ));
        let b2 = BeliefBase::empty(2).with_true("p");
        assert!(!eval_base(&b2, &f("Exp[2] p")).unwrap());
        assert!(!is_alternative(&example_base(), &b2, one()));
    }

    #[test]
    fn alternatives_examples() {
        assert!(alternatives(&Mab::new(example_base(), vec![]), one()).is_empty());
        let m = example_mab();
        let alts = alternatives(&m, one());
        assert_eq!(alts, vec![&m.context()[0], &m.context()[1]]);
        let m_empty = m.rooted_at(BeliefBase::empty(2));
        assert_eq!(alternatives(&m_empty, one()).len(), m.context().len());
    }

    #[test]
    fn example_query_holds() {
        let m = example_mab();
        let query = f("Box[1] (p & q) & Box[2] (p & q) & Box[1] Box[2] (p & q)");
        assert!(eval_mab(&m, &query));
        // every context member satisfies p -> q
        assert!(m
            .context()
            .iter()
            .all(|c| eval_base(c, &f("p -> q")).unwrap()));
    }

    #[test]
    fn vacuous_and_trivial_queries() {
        let m = Mab::new(example_base(), vec![]);
        assert!(eval_mab(&m, &f("Box[1] false")));
        assert!(!is_cmab(&m));
        assert!(eval_mab(&example_mab(), &Formula::top()));
    }

    #[test]
    fn cmab_examples() {
        assert!(is_cmab(&example_mab()));
        let c = BeliefBase::empty(2);
        assert!(is_cmab(&Mab::new(c.clone(), vec![c])));
    }

    #[test]
    fn l0_agrees_with_eval_base() {
        let m = example_mab();
        for s in ["p", "~q", "Exp[1] Exp[2] p", "Exp[2] p & ~Exp[2] q"] {
            assert_eq!(eval_mab(&m, &f(s)), eval_base(m.base(), &f(s)).unwrap());
        }
    }

    #[test]
    fn context_is_deduplicated() {
        let m = Mab::new(example_base(), vec![example_base(), example_base()]);
        assert_eq!(m.context().len(), 1);
    }

    #[test]
    fn explicit_belief_is_not_closed() {
        // Exp[1](p & q) without Exp[1](q & p); Exp[1] p and Exp[1] q without Exp[1](p & q)
        let b = BeliefBase::empty(1)
            .with_belief(1, f("p & q"))
            .with_belief(1, f("p"))
            .with_belief(1, f("q"))
            .with_true("p")
            .with_true("q");
        let m = Mab::new(b.clone(), vec![b]);
        assert!(is_cmab(&m));
        assert!(eval_mab(&m, &f("Exp[1] (p & q) & ~Exp[1] (q & p)")));
        let b = BeliefBase::empty(1)
            .with_belief(1, f("p"))
            .with_belief(1, f("q"))
            .with_true("p")
            .with_true("q");
        let m = Mab::new(b.clone(), vec![b]);
        assert!(is_cmab(&m));
        assert!(eval_mab(&m, &f("Exp[1] p & Exp[1] q & ~Exp[1] (p & q)")));
    }
}

//! Negation normal form for awareness formulas.
//!
//! Negations are pushed down to atoms and awareness literals; `X[i] φ`
//! unfolds to `B[i] φ & A[i] φ`. The argument of an awareness literal is kept
//! verbatim, since awareness is a syntactic test.

use std::fmt;

use serde::Serialize;

use crate::awareness::{LgaFormula, LgaNode};
use crate::syntax::{AgentId, Atom};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nnf {
    True,
    False,
    Lit {
        atom: Atom,
        positive: bool,
    },
    Aware {
        agent: AgentId,
        body: LgaFormula,
        positive: bool,
    },
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    /// `B[i] φ`.
    Nec(AgentId, Box<Nnf>),
    /// `~B[i] ~φ`.
    Poss(AgentId, Box<Nnf>),
}

impl Nnf {
    pub fn from_lga(g: &LgaFormula) -> Self {
        to_nnf(g, true)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Nnf::Lit { .. } | Nnf::Aware { .. })
    }

    /// The complementary literal, for literals only.
    pub fn complement(&self) -> Option<Nnf> {
        match self {
            Nnf::Lit { atom, positive } => Some(Nnf::Lit {
                atom: atom.clone(),
                positive: !positive,
            }),
            Nnf::Aware {
                agent,
                body,
                positive,
            } => Some(Nnf::Aware {
                agent: *agent,
                body: body.clone(),
                positive: !positive,
            }),
            _ => None,
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Nnf::True | Nnf::False | Nnf::Lit { .. } | Nnf::Aware { .. } => 0,
            Nnf::And(a, b) | Nnf::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Nnf::Nec(_, a) | Nnf::Poss(_, a) => 1 + a.modal_depth(),
        }
    }
}

fn to_nnf(g: &LgaFormula, positive: bool) -> Nnf {
    match g.node() {
        LgaNode::Top if positive => Nnf::True,
        LgaNode::Top => Nnf::False,
        LgaNode::Atom(p) => Nnf::Lit {
            atom: p.clone(),
            positive,
        },
        LgaNode::Not(a) => to_nnf(a, !positive),
        LgaNode::And(a, b) if positive => {
            Nnf::And(Box::new(to_nnf(a, true)), Box::new(to_nnf(b, true)))
        }
        LgaNode::And(a, b) => Nnf::Or(Box::new(to_nnf(a, false)), Box::new(to_nnf(b, false))),
        LgaNode::B(i, a) if positive => Nnf::Nec(*i, Box::new(to_nnf(a, true))),
        LgaNode::B(i, a) => Nnf::Poss(*i, Box::new(to_nnf(a, false))),
        LgaNode::A(i, a) => Nnf::Aware {
            agent: *i,
            body: a.clone(),
            positive,
        },
        LgaNode::X(i, a) => {
            let aware = Nnf::Aware {
                agent: *i,
                body: a.clone(),
                positive,
            };
            if positive {
                Nnf::And(
                    Box::new(Nnf::Nec(*i, Box::new(to_nnf(a, true)))),
                    Box::new(aware),
                )
            } else {
                Nnf::Or(
                    Box::new(Nnf::Poss(*i, Box::new(to_nnf(a, false)))),
                    Box::new(aware),
                )
            }
        }
    }
}

impl fmt::Display for Nnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nnf::True => f.write_str("true"),
            Nnf::False => f.write_str("false"),
            Nnf::Lit { atom, positive } => {
                write!(f, "{}{atom}", if *positive { "" } else { "~" })
            }
            Nnf::Aware {
                agent,
                body,
                positive,
            } => write!(f, "{}A[{agent}] {body}", if *positive { "" } else { "~" }),
            Nnf::And(a, b) => write!(f, "({a} & {b})"),
            Nnf::Or(a, b) => write!(f, "({a} | {b})"),
            Nnf::Nec(i, a) => write!(f, "B[{i}] {a}"),
            Nnf::Poss(i, a) => write!(f, "Poss[{i}] {a}"),
        }
    }
}

impl fmt::Debug for Nnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Nnf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

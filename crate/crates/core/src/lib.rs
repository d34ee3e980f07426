//! Reasoning about explicit and implicit beliefs of multiple agents.
//!
//! * [`syntax`]: formulas, parser and printer.
//! * [`mab`]: multi-agent belief bases, contexts and their satisfaction relation.
//! * [`ndm`]: notional doxastic models, filtration and the model conversions.
//! * [`awareness`]: the logic of general awareness and the embedding into it.
//! * [`solver`]: tableau, bounded model search, validity and axiom checks.
//! * [`io`]: JSON model formats.
//! * [`gen`]: seeded random formulas and models.

pub mod awareness;
pub mod gen;
pub mod io;
pub mod mab;
pub mod ndm;
pub mod solver;
pub mod syntax;

pub use syntax::{AgentId, Atom, Formula, FormulaSet, Node};

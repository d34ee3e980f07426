//! Seeded random formulas and models.
//!
//! Formula grammar weights (out of 100, at depth > 0):
//!
//! | node       | L  | L0 | LGA |
//! |------------|----|----|-----|
//! | atom       | 20 | 25 | 20  |
//! | constant   |  4 |  5 |  4  |
//! | `~`        | 20 | 25 | 20  |
//! | `&`        | 18 | 20 | 20  |
//! | `\|`       |  8 | 10 |  -  |
//! | `->`       |  5 |  5 |  -  |
//! | `Box`/`B`  | 15 |  - | 16  |
//! | `Exp`/`A`  | 10 | 10 | 12  |
//! | `X`        |  - |  - |  8  |
//!
//! At depth 0 only atoms (90) and constants (10) are drawn. `Exp` and `A`
//! take an L0 body of depth one less.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rand::SeedableRng;

use crate::awareness::{translate, AwarenessStructure, LgaFormula};
use crate::mab::{is_alternative, BeliefBase, Mab};
use crate::ndm::{quasi_to_ndm, DoxasticModel, Ndm, QuasiNdm};
use crate::syntax::{AgentId, Atom, Formula};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ATOM_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// The `k`-th atom: `p`, `q`, ..., `u`, then `p6`, `p7`, ...
pub fn atom_name(k: usize) -> String {
    ATOM_NAMES
        .get(k)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("p{k}"))
}

pub fn atom(k: usize) -> Atom {
    Atom::new(&atom_name(k)).expect("generated names are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaShape {
    pub max_depth: usize,
    pub n_agents: u32,
    pub n_atoms: usize,
}

impl FormulaShape {
    pub fn new(max_depth: usize, n_agents: u32, n_atoms: usize) -> Self {
        assert!(n_agents >= 1 && n_atoms >= 1);
        FormulaShape {
            max_depth,
            n_agents,
            n_atoms,
        }
    }
}

fn pick(rng: &mut GenRng, weights: &[u32]) -> usize {
    let total: u32 = weights.iter().sum();
    let mut x = rng.gen_range(0..total);
    for (k, &w) in weights.iter().enumerate() {
        if x < w {
            return k;
        }
        x -= w;
    }
    unreachable!()
}

fn agent(rng: &mut GenRng, shape: &FormulaShape) -> AgentId {
    AgentId::new(rng.gen_range(1..=shape.n_agents))
}

fn leaf(rng: &mut GenRng, shape: &FormulaShape) -> Formula {
    if pick(rng, &[90, 10]) == 0 {
        Formula::atom(atom(rng.gen_range(0..shape.n_atoms)))
    } else if rng.gen() {
        Formula::top()
    } else {
        Formula::bot()
    }
}

/// A random formula of the full language.
pub fn formula(rng: &mut GenRng, shape: &FormulaShape) -> Formula {
    gen_formula(rng, shape, shape.max_depth, true)
}

/// A random Box-free formula.
pub fn l0_formula(rng: &mut GenRng, shape: &FormulaShape) -> Formula {
    gen_formula(rng, shape, shape.max_depth, false)
}

fn gen_formula(rng: &mut GenRng, shape: &FormulaShape, depth: usize, boxes: bool) -> Formula {
    if depth == 0 {
        return leaf(rng, shape);
    }
    let weights: &[u32] = if boxes {
        &[20, 4, 20, 18, 8, 5, 15, 10]
    } else {
        &[25, 5, 25, 20, 10, 5, 0, 10]
    };
    let sub = |rng: &mut GenRng| gen_formula(rng, shape, depth - 1, boxes);
    match pick(rng, weights) {
        0 => Formula::atom(atom(rng.gen_range(0..shape.n_atoms))),
        1 => leaf(rng, shape),
        2 => Formula::not(sub(rng)),
        3 => {
            let a = sub(rng);
            Formula::and(a, sub(rng))
        }
        4 => {
            let a = sub(rng);
            Formula::or(a, sub(rng))
        }
        5 => {
            let a = sub(rng);
            Formula::implies(a, sub(rng))
        }
        6 => {
            let i = agent(rng, shape);
            Formula::boxed(i, sub(rng))
        }
        _ => {
            let i = agent(rng, shape);
            let body = gen_formula(rng, shape, depth - 1, false);
            Formula::exp(i, body).expect("body is Box-free")
        }
    }
}

/// A random formula of the awareness logic.
pub fn lga_formula(rng: &mut GenRng, shape: &FormulaShape) -> LgaFormula {
    gen_lga(rng, shape, shape.max_depth)
}

fn gen_lga(rng: &mut GenRng, shape: &FormulaShape, depth: usize) -> LgaFormula {
    if depth == 0 {
        return translate(&leaf(rng, shape));
    }
    match pick(rng, &[20, 4, 20, 20, 16, 12, 8]) {
        0 => LgaFormula::atom(atom(rng.gen_range(0..shape.n_atoms))),
        1 => translate(&leaf(rng, shape)),
        2 => LgaFormula::not(gen_lga(rng, shape, depth - 1)),
        3 => {
            let a = gen_lga(rng, shape, depth - 1);
            LgaFormula::and(a, gen_lga(rng, shape, depth - 1))
        }
        4 => {
            let i = agent(rng, shape);
            LgaFormula::belief(i, gen_lga(rng, shape, depth - 1))
        }
        5 => {
            let i = agent(rng, shape);
            LgaFormula::aware(i, gen_lga(rng, shape, depth - 1))
        }
        _ => {
            let i = agent(rng, shape);
            LgaFormula::explicit(i, gen_lga(rng, shape, depth - 1))
        }
    }
}

/// Size parameters for random models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelShape {
    pub n_agents: u32,
    pub max_worlds: usize,
    pub n_atoms: usize,
    /// Upper bound on formulas per doxastic set.
    pub max_beliefs: usize,
    /// Depth of believed formulas.
    pub belief_depth: usize,
}

impl ModelShape {
    pub fn new(n_agents: u32, max_worlds: usize, n_atoms: usize) -> Self {
        assert!(n_agents >= 1 && max_worlds >= 1 && n_atoms >= 1);
        ModelShape {
            n_agents,
            max_worlds,
            n_atoms,
            max_beliefs: 3,
            belief_depth: 2,
        }
    }

    fn beliefs(&self) -> FormulaShape {
        FormulaShape::new(self.belief_depth, self.n_agents, self.n_atoms)
    }
}

fn random_subset(rng: &mut GenRng, from: &BTreeSet<usize>) -> BTreeSet<usize> {
    debug_assert!(!from.is_empty());
    loop {
        let s: BTreeSet<usize> = from.iter().copied().filter(|_| rng.gen()).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random quasi-NDM. Doxastic sets are drawn first, then trimmed until
/// each has a satisfying world (trimming can falsify `Exp` beliefs elsewhere,
/// so this runs to a fixpoint); notional sets are random non-empty subsets of
/// the belief worlds.
pub fn quasi_ndm(rng: &mut GenRng, shape: &ModelShape) -> QuasiNdm {
    let k = rng.gen_range(1..=shape.max_worlds);
    let mut m = DoxasticModel::with_world_count(shape.n_agents, k).expect("k >= 1");
    for w in 0..k {
        for a in 0..shape.n_atoms {
            if rng.gen() {
                m.set_true(atom(a), w);
            }
        }
    }
    for i in AgentId::all(shape.n_agents) {
        for w in 0..k {
            let n = rng.gen_range(0..=shape.max_beliefs);
            let beliefs = (0..n).map(|_| l0_formula(rng, &shape.beliefs())).collect();
            m.set_doxastic(i, w, beliefs)
                .expect("generated beliefs are Box-free");
        }
    }
    loop {
        let mut changed = false;
        for i in AgentId::all(shape.n_agents) {
            for w in 0..k {
                if m.belief_worlds(i, w).is_empty() {
                    let mut beliefs: Vec<Formula> = m.doxastic(i, w).iter().cloned().collect();
                    beliefs.remove(rng.gen_range(0..beliefs.len()));
                    m.set_doxastic(i, w, beliefs.into_iter().collect())
                        .expect("still Box-free");
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in AgentId::all(shape.n_agents) {
        for w in 0..k {
            let pool = m.belief_worlds(i, w);
            let n = random_subset(rng, &pool);
            m.set_notional(i, w, n);
        }
    }
    QuasiNdm::new(m).expect("construction satisfies C1* and C2")
}

/// A random NDM: a random quasi-NDM, made exact with fresh atoms.
pub fn ndm(rng: &mut GenRng, shape: &ModelShape) -> Ndm {
    let q = quasi_ndm(rng, shape);
    quasi_to_ndm(&q, &Formula::top())
}

fn belief_base(rng: &mut GenRng, shape: &ModelShape) -> BeliefBase {
    let mut b = BeliefBase::empty(shape.n_agents);
    for a in 0..shape.n_atoms {
        if rng.gen() {
            b.set_true(atom(a));
        }
    }
    for i in AgentId::all(shape.n_agents) {
        for _ in 0..rng.gen_range(0..=shape.max_beliefs) {
            b.believe(i, l0_formula(rng, &shape.beliefs()))
                .expect("generated beliefs are Box-free");
        }
    }
    b
}

fn drop_belief(rng: &mut GenRng, b: &mut BeliefBase, i: AgentId) {
    let beliefs: Vec<Formula> = b.beliefs(i).iter().cloned().collect();
    let victim = beliefs
        .choose(rng)
        .expect("non-empty when no alternative exists");
    let mut out = BeliefBase::empty(b.n_agents());
    for p in b.valuation() {
        out.set_true(p.clone());
    }
    for j in AgentId::all(b.n_agents()) {
        for alpha in b.beliefs(j) {
            if j != i || alpha != victim {
                out.believe(j, alpha.clone()).expect("already Box-free");
            }
        }
    }
    *b = out;
}

/// A random CMAB. Bases without an alternative for some agent lose random
/// beliefs of that agent until they have one. With probability 1/4 the base
/// lies outside the context.
pub fn cmab(rng: &mut GenRng, shape: &ModelShape) -> Mab {
    let k = rng.gen_range(1..=shape.max_worlds);
    let mut context: Vec<BeliefBase> = (0..k).map(|_| belief_base(rng, shape)).collect();
    let outside = rng.gen_range(0..4) == 0;
    let mut base = if outside {
        belief_base(rng, shape)
    } else {
        context[rng.gen_range(0..k)].clone()
    };
    loop {
        let mut changed = false;
        for i in AgentId::all(shape.n_agents) {
            for c in 0..context.len() {
                if !context.iter().any(|b2| is_alternative(&context[c], b2, i)) {
                    let mut b = context[c].clone();
                    drop_belief(rng, &mut b, i);
                    if !outside && base == context[c] {
                        base = b.clone();
                    }
                    context[c] = b;
                    changed = true;
                }
            }
            if !context.iter().any(|b2| is_alternative(&base, b2, i)) {
                let was = base.clone();
                drop_belief(rng, &mut base, i);
                if !outside {
                    for c in context.iter_mut() {
                        if *c == was {
                            *c = base.clone();
                        }
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Mab::new(base, context)
}

/// A random serial awareness structure whose awareness sets hold
/// translations of Box-free formulas.
pub fn awareness_structure(rng: &mut GenRng, shape: &ModelShape) -> AwarenessStructure {
    let k = rng.gen_range(1..=shape.max_worlds);
    let mut m = AwarenessStructure::with_state_count(shape.n_agents, k).expect("k >= 1");
    let all: BTreeSet<usize> = (0..k).collect();
    for s in 0..k {
        for a in 0..shape.n_atoms {
            if rng.gen() {
                m.set_true(atom(a), s);
            }
        }
        for i in AgentId::all(shape.n_agents) {
            let succ = random_subset(rng, &all);
            m.set_successors(i, s, succ);
            for _ in 0..rng.gen_range(0..=shape.max_beliefs) {
                m.add_awareness(i, s, translate(&l0_formula(rng, &shape.beliefs())));
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mab::is_cmab;
    use crate::ndm::check_conditions;

    #[test]
    fn seeded_generation_is_reproducible() {
        let shape = FormulaShape::new(3, 2, 3);
        let a: Vec<Formula> = (0..20)
            .map({
                let mut r = rng(7);
                move |_| formula(&mut r, &shape)
            })
            .collect();
        let b: Vec<Formula> = (0..20)
            .map({
                let mut r = rng(7);
                move |_| formula(&mut r, &shape)
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn formulas_respect_shape() {
        let shape = FormulaShape::new(3, 2, 2);
        let mut r = rng(1);
        for _ in 0..300 {
            let f = formula(&mut r, &shape);
            assert!(f.modal_depth() <= 3);
            assert!(f.max_agent() <= 2);
            assert!(crate::syntax::atoms(&f)
                .iter()
                .all(|p| ["p", "q"].contains(&p.name())));
            assert!(l0_formula(&mut r, &shape).is_l0());
        }
    }

    #[test]
    fn models_are_in_class() {
        let shape = ModelShape::new(2, 5, 3);
        let mut r = rng(3);
        for _ in 0..100 {
            let q = quasi_ndm(&mut r, &shape);
            let rep = check_conditions(&q);
            assert!(rep.c1_star && rep.c2);
            let n = ndm(&mut r, &shape);
            let rep = check_conditions(&n);
            assert!(rep.c1_exact && rep.c2);
            assert!(is_cmab(&cmab(&mut r, &shape)));
            assert!(awareness_structure(&mut r, &shape).is_serial());
        }
    }
}

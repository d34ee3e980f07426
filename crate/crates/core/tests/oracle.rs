//! A second, deliberately naive implementation of the semantics, used to
//! cross-check the library's evaluators, converters and solver.

use std::collections::BTreeSet;

use doxa::gen::{self, FormulaShape};
use doxa::mab::{BeliefBase, Mab};
use doxa::ndm::DoxasticModel;
use doxa::solver::{sat_lda, SolverConfig};
use doxa::syntax::{atoms, parse_formula, subformulas, AgentId, Atom, Formula, Node};

/// `(W, D, N, V)` with everything spelled out; indices are `[agent][world]`.
#[derive(Debug, Clone)]
struct Tiny {
    val: Vec<BTreeSet<Atom>>,
    dox: Vec<Vec<BTreeSet<Formula>>>,
    not: Vec<Vec<BTreeSet<usize>>>,
}

impl Tiny {
    fn from_model(m: &DoxasticModel) -> Tiny {
        let worlds = 0..m.world_count();
        Tiny {
            val: worlds.clone().map(|w| m.atoms_at(w)).collect(),
            dox: AgentId::all(m.n_agents())
                .map(|i| worlds.clone().map(|w| m.doxastic(i, w).clone()).collect())
                .collect(),
            not: AgentId::all(m.n_agents())
                .map(|i| worlds.clone().map(|w| m.notional(i, w).clone()).collect())
                .collect(),
        }
    }

    fn holds(&self, w: usize, f: &Formula) -> bool {
        match f.node() {
            Node::Top => true,
            Node::Atom(p) => self.val[w].contains(p),
            Node::Not(a) => !self.holds(w, a),
            Node::And(a, b) => self.holds(w, a) && self.holds(w, b),
            Node::Exp(i, a) => self.dox[i.slot()][w].contains(a),
            Node::Box(i, a) => self.not[i.slot()][w].iter().all(|&v| self.holds(v, a)),
        }
    }

    fn belief_worlds(&self, i: usize, w: usize) -> BTreeSet<usize> {
        (0..self.val.len())
            .filter(|&v| self.dox[i][w].iter().all(|a| self.holds(v, a)))
            .collect()
    }

    fn is_quasi(&self) -> bool {
        (0..self.dox.len()).all(|i| {
            (0..self.val.len()).all(|w| {
                !self.not[i][w].is_empty() && self.not[i][w].is_subset(&self.belief_worlds(i, w))
            })
        })
    }

    fn is_exact(&self) -> bool {
        (0..self.dox.len()).all(|i| {
            (0..self.val.len())
                .all(|w| !self.not[i][w].is_empty() && self.not[i][w] == self.belief_worlds(i, w))
        })
    }
}

fn base_holds(b: &BeliefBase, f: &Formula) -> bool {
    match f.node() {
        Node::Top => true,
        Node::Atom(p) => b.valuation().contains(p),
        Node::Not(a) => !base_holds(b, a),
        Node::And(x, y) => base_holds(b, x) && base_holds(b, y),
        Node::Exp(i, a) => b.beliefs(*i).contains(a),
        Node::Box(..) => panic!("belief bases only evaluate Box-free formulas"),
    }
}

fn mab_holds(base: &BeliefBase, context: &[BeliefBase], f: &Formula) -> bool {
    match f.node() {
        Node::Not(a) => !mab_holds(base, context, a),
        Node::And(x, y) => mab_holds(base, context, x) && mab_holds(base, context, y),
        Node::Box(i, a) => context
            .iter()
            .filter(|c| base.beliefs(*i).iter().all(|alpha| base_holds(c, alpha)))
            .all(|c| mab_holds(c, context, a)),
        _ => base_holds(base, f),
    }
}

fn mab_consistent(m: &Mab) -> bool {
    let members = m.context().iter().chain(std::iter::once(m.base()));
    members.clone().all(|b| {
        AgentId::all(m.n_agents()).all(|i| {
            m.context()
                .iter()
                .any(|c| b.beliefs(i).iter().all(|alpha| base_holds(c, alpha)))
        })
    })
}

fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0..1usize << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// Every one-agent quasi-NDM with at most `max_worlds` worlds over the atoms
/// of `f`, with doxastic sets drawn from the `Exp` bodies in `f`; returns
/// whether one satisfies `f` at world 0.
fn enumerate_one_agent(f: &Formula, max_worlds: usize) -> bool {
    let atom_list: Vec<Atom> = atoms(f).into_iter().collect();
    let bodies: Vec<Formula> = subformulas(f)
        .into_iter()
        .filter_map(|g| match g.node() {
            Node::Exp(_, a) => Some(a.clone()),
            _ => None,
        })
        .collect();
    let vals = subsets(&atom_list);
    let doxes = subsets(&bodies);
    for k in 1..=max_worlds {
        let worlds: Vec<usize> = (0..k).collect();
        let nots: Vec<BTreeSet<usize>> = subsets(&worlds)
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect();
        let per_world = vals.len() * doxes.len() * nots.len();
        let total = per_world.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let mut m = Tiny {
                val: Vec::new(),
                dox: vec![Vec::new()],
                not: vec![Vec::new()],
            };
            for _ in 0..k {
                let (v, rest) = (c % vals.len(), c / vals.len());
                let (d, rest) = (rest % doxes.len(), rest / doxes.len());
                let (n, rest) = (rest % nots.len(), rest / nots.len());
                c = rest;
                m.val.push(vals[v].clone());
                m.dox[0].push(doxes[d].clone());
                m.not[0].push(nots[n].clone());
            }
            if m.is_quasi() && m.holds(0, f) {
                return true;
            }
        }
    }
    false
}

fn lda(s: &str) -> Formula {
    parse_formula(s, 2).unwrap()
}

#[test]
fn enumeration_finds_the_listed_models() {
    assert!(enumerate_one_agent(&lda("p"), 1));
    assert!(enumerate_one_agent(&lda("Exp[1] p & ~Exp[1] (p & p)"), 2));
    assert!(!enumerate_one_agent(&lda("Box[1] false"), 2));
    // countermodel to implicit-implies-explicit
    assert!(enumerate_one_agent(&lda("~(Box[1] p -> Exp[1] p)"), 2));
    assert!(enumerate_one_agent(
        &lda("~((Exp[1] p & Exp[1] q) -> Exp[1] (p & q))"),
        2
    ));
    assert!(!enumerate_one_agent(&lda("~(Exp[1] p -> Box[1] p)"), 2));
}

#[test]
fn small_models_found_by_enumeration_are_found_by_the_solver() {
    let shape = FormulaShape::new(2, 1, 2);
    let mut rng = gen::rng(11);
    let (mut sat, mut total) = (0, 0);
    for _ in 0..300 {
        let f = gen::formula(&mut rng, &shape);
        if subformulas(&f).len() > 9 {
            continue;
        }
        total += 1;
        if enumerate_one_agent(&f, 2) {
            sat += 1;
            assert!(
                sat_lda(&f, &SolverConfig::default()).unwrap().is_sat(),
                "{f}"
            );
        }
    }
    assert!(
        total > 100 && sat > 20,
        "too few informative instances: {sat}/{total}"
    );
}

#[test]
fn solver_models_check_out_under_the_naive_semantics() {
    let shape = FormulaShape::new(3, 2, 3);
    let mut rng = gen::rng(5);
    let mut sat = 0;
    for _ in 0..300 {
        let f = gen::formula(&mut rng, &shape);
        let res = sat_lda(&f, &SolverConfig::default()).unwrap();
        let Some(views) = res.model else { continue };
        sat += 1;
        let q = Tiny::from_model(views.quasi.as_ref().unwrap());
        assert!(q.is_quasi() && q.holds(views.root, &f), "{f}");
        let n = Tiny::from_model(views.ndm.as_ref().unwrap());
        assert!(n.is_exact() && n.holds(views.root, &f), "{f}");
        let c = views.cmab.as_ref().unwrap();
        assert!(mab_consistent(c), "{f}");
        assert!(mab_holds(c.base(), c.context(), &f), "{f}");
    }
    assert!(sat > 50);
}

#[test]
fn library_evaluator_agrees_with_naive_one() {
    let mut rng = gen::rng(8);
    let shape = gen::ModelShape::new(2, 5, 2);
    for _ in 0..200 {
        let m = gen::quasi_ndm(&mut rng, &shape);
        let f = gen::formula(&mut rng, &FormulaShape::new(3, 2, 2));
        let t = Tiny::from_model(&m);
        for w in 0..m.world_count() {
            assert_eq!(m.eval(w, &f), t.holds(w, &f), "{f}");
        }
        let c = gen::cmab(&mut rng, &shape);
        assert!(mab_consistent(&c));
        assert_eq!(
            doxa::mab::eval_mab(&c, &f),
            mab_holds(c.base(), c.context(), &f),
            "{f}"
        );
    }
}

//! Exhaustive search for small quasi-NDMs, independent of the tableau.
//!
//! Every satisfiable formula has a model whose worlds are pairwise distinct
//! on its subformulas (filtration never adds worlds). Such a world is fully
//! described by a *type*: a truth assignment to the subformulas that respects
//! the Boolean connectives. Given a set `S` of types, the largest admissible
//! model over `S` takes `D(i,t) = {α : Exp[i] α true in t}` and lets `N(i,t)`
//! be every `u ∈ S` satisfying all `Box[i]` and `Exp[i]` bodies true in `t`.
//! `S` is a model iff each `N(i,t)` is non-empty and each false `Box[i] ψ` in
//! `t` has a notional `u` falsifying `ψ`.
//!
//! The search first removes types that can never be part of such a set
//! (greatest fixpoint), then looks for a set of at most `max_worlds` types
//! containing one that makes the formula true.

use std::collections::{BTreeSet, HashSet};

use crate::ndm::{quasi_to_ndm, DoxasticModel, Ndm, QuasiNdm};
use crate::syntax::{subformulas, AgentId, Formula, Node};

/// Types beyond this count are not enumerated.
pub const MAX_TYPES: usize = 1 << 16;

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    /// An NDM and the world satisfying the formula.
    Found(Ndm, usize),
    /// No model with at most `max_worlds` worlds.
    NotFound,
    /// The formula has too many modal/atomic subformulas to enumerate types,
    /// or the search step limit was hit.
    TooLarge,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_types: usize,
    pub max_steps: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_types: MAX_TYPES,
            max_steps: 2_000_000,
        }
    }
}

struct Types {
    n_agents: u32,
    subs: Vec<Formula>,
    /// `rows[t][k]`: truth of `subs[k]` in type `t`.
    rows: Vec<Vec<bool>>,
    /// Per agent: `(box index, body index)` pairs.
    boxes: Vec<Vec<(usize, usize)>>,
    /// Per agent: `(exp index, body index)` pairs.
    exps: Vec<Vec<(usize, usize)>>,
}

impl Types {
    fn build(f: &Formula, n_agents: u32, max_types: usize) -> Option<Types> {
        // children precede parents when sorted by size
        let mut subs: Vec<Formula> = subformulas(f).into_iter().collect();
        subs.sort_by_key(|g| g.size());
        let index = |g: &Formula| subs.iter().position(|h| h == g).expect("closed");
        let free: Vec<usize> = (0..subs.len())
            .filter(|&k| {
                matches!(
                    subs[k].node(),
                    Node::Atom(_) | Node::Exp(..) | Node::Box(..)
                )
            })
            .collect();
        if free.len() >= usize::BITS as usize || (1usize << free.len()) > max_types {
            return None;
        }
        let children: Vec<Vec<usize>> = subs
            .iter()
            .map(|g| g.children().into_iter().map(index).collect())
            .collect();
        let mut rows = Vec::with_capacity(1 << free.len());
        for mask in 0..(1usize << free.len()) {
            let mut row = vec![false; subs.len()];
            let mut next_free = 0;
            for k in 0..subs.len() {
                row[k] = match subs[k].node() {
                    Node::Top => true,
                    Node::Not(_) => !row[children[k][0]],
                    Node::And(..) => row[children[k][0]] && row[children[k][1]],
                    Node::Atom(_) | Node::Exp(..) | Node::Box(..) => {
                        let bit = mask >> next_free & 1 == 1;
                        next_free += 1;
                        bit
                    }
                };
            }
            rows.push(row);
        }
        let mut boxes = vec![Vec::new(); n_agents as usize];
        let mut exps = vec![Vec::new(); n_agents as usize];
        for (k, g) in subs.iter().enumerate() {
            match g.node() {
                Node::Box(i, _) => boxes[i.slot()].push((k, children[k][0])),
                Node::Exp(i, _) => exps[i.slot()].push((k, children[k][0])),
                _ => {}
            }
        }
        Some(Types {
            n_agents,
            subs,
            rows,
            boxes,
            exps,
        })
    }

    /// `u` may be notional for agent `i` at `t`.
    fn compatible(&self, i: usize, t: usize, u: usize) -> bool {
        let (rt, ru) = (&self.rows[t], &self.rows[u]);
        self.boxes[i].iter().all(|&(b, body)| !rt[b] || ru[body])
            && self.exps[i].iter().all(|&(e, body)| !rt[e] || ru[body])
    }

    /// Requirements of `t` for agent `i`: `None` for non-emptiness, then the
    /// body of each false box that needs a falsifying witness.
    fn requirements(&self, i: usize, t: usize) -> Vec<Option<usize>> {
        let mut out = vec![None];
        out.extend(
            self.boxes[i]
                .iter()
                .filter(|&&(b, _)| !self.rows[t][b])
                .map(|&(_, body)| Some(body)),
        );
        out
    }

    fn meets(&self, i: usize, t: usize, u: usize, req: Option<usize>) -> bool {
        self.compatible(i, t, u) && req.is_none_or(|body| !self.rows[u][body])
    }

    fn first_unmet(&self, set: &[usize]) -> Option<(usize, usize, Option<usize>)> {
        for &t in set {
            for i in 0..self.n_agents as usize {
                for req in self.requirements(i, t) {
                    if !set.iter().any(|&u| self.meets(i, t, u, req)) {
                        return Some((i, t, req));
                    }
                }
            }
        }
        None
    }

    /// Greatest set of types closed under the requirements.
    fn survivors(&self) -> Vec<usize> {
        let mut alive: Vec<bool> = vec![true; self.rows.len()];
        loop {
            let mut changed = false;
            for t in 0..self.rows.len() {
                if !alive[t] {
                    continue;
                }
                let ok = (0..self.n_agents as usize).all(|i| {
                    self.requirements(i, t).into_iter().all(|req| {
                        (0..self.rows.len()).any(|u| alive[u] && self.meets(i, t, u, req))
                    })
                });
                if !ok {
                    alive[t] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..self.rows.len()).filter(|&t| alive[t]).collect()
    }

    fn to_model(&self, set: &[usize]) -> QuasiNdm {
        let mut m = DoxasticModel::with_world_count(self.n_agents, set.len()).expect("non-empty");
        for (w, &t) in set.iter().enumerate() {
            for (k, g) in self.subs.iter().enumerate() {
                if let Node::Atom(p) = g.node() {
                    if self.rows[t][k] {
                        m.set_true(p.clone(), w);
                    }
                }
            }
            for i in 0..self.n_agents as usize {
                let agent = AgentId::new(i as u32 + 1);
                for &(e, body) in &self.exps[i] {
                    if self.rows[t][e] {
                        m.add_belief(agent, w, self.subs[body].clone())
                            .expect("Exp bodies are Box-free");
                    }
                }
                let notional: BTreeSet<usize> = set
                    .iter()
                    .enumerate()
                    .filter(|&(_, &u)| self.compatible(i, t, u))
                    .map(|(v, _)| v)
                    .collect();
                m.set_notional(agent, w, notional);
            }
        }
        QuasiNdm::new(m).expect("admissible type sets give quasi-NDMs")
    }
}

struct Search<'a> {
    types: &'a Types,
    alive: &'a [usize],
    max_worlds: usize,
    steps: usize,
    max_steps: usize,
    seen: HashSet<Vec<usize>>,
}

enum Step {
    Done(Vec<usize>),
    Fail,
    Limit,
}

impl Search<'_> {
    fn extend(&mut self, set: Vec<usize>) -> Step {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Step::Limit;
        }
        let mut key = set.clone();
        key.sort_unstable();
        if !self.seen.insert(key) {
            return Step::Fail;
        }
        let Some((i, t, req)) = self.types.first_unmet(&set) else {
            return Step::Done(set);
        };
        if set.len() >= self.max_worlds {
            return Step::Fail;
        }
        let mut limited = false;
        for &u in self.alive {
            if set.contains(&u) || !self.types.meets(i, t, u, req) {
                continue;
            }
            let mut next = set.clone();
            next.push(u);
            match self.extend(next) {
                Step::Done(s) => return Step::Done(s),
                Step::Limit => limited = true,
                Step::Fail => {}
            }
            if limited {
                break;
            }
        }
        if limited {
            Step::Limit
        } else {
            Step::Fail
        }
    }
}

/// Searches for a model of `f` with at most `max_worlds` worlds, under the
/// given limits. `n_agents` must cover every agent in `f`.
pub fn search(
    f: &Formula,
    n_agents: u32,
    max_worlds: usize,
    limits: SearchLimits,
) -> SearchOutcome {
    assert!(max_worlds >= 1, "max_worlds must be at least 1");
    let n_agents = n_agents.max(f.max_agent()).max(1);
    let Some(types) = Types::build(f, n_agents, limits.max_types) else {
        return SearchOutcome::TooLarge;
    };
    let root = types
        .subs
        .iter()
        .position(|g| g == f)
        .expect("f is a subformula");
    let alive = types.survivors();
    let mut search = Search {
        types: &types,
        alive: &alive,
        max_worlds,
        steps: 0,
        max_steps: limits.max_steps,
        seen: HashSet::new(),
    };
    let mut limited = false;
    for &t in &alive {
        if !types.rows[t][root] {
            continue;
        }
        match search.extend(vec![t]) {
            Step::Done(set) => {
                let quasi = types.to_model(&set);
                debug_assert!(quasi.eval(0, f));
                return SearchOutcome::Found(quasi_to_ndm(&quasi, f), 0);
            }
            Step::Limit => {
                limited = true;
                break;
            }
            Step::Fail => {}
        }
    }
    if limited {
        SearchOutcome::TooLarge
    } else {
        SearchOutcome::NotFound
    }
}

/// A model of `f` (as an NDM, with the satisfying world) with at most
/// `max_worlds` worlds, if one exists within the default limits.
pub fn bounded_model_search(f: &Formula, max_worlds: usize) -> Option<(Ndm, usize)> {
    match search(f, f.max_agent().max(1), max_worlds, SearchLimits::default()) {
        SearchOutcome::Found(m, w) => Some((m, w)),
        SearchOutcome::NotFound | SearchOutcome::TooLarge => None,
    }
}

/// `2^|sub(f)|`, saturating: a bound at which the search is complete.
pub fn complete_bound(f: &Formula) -> usize {
    let n = subformulas(f).len();
    if n >= usize::BITS as usize - 1 {
        usize::MAX
    } else {
        1usize << n
    }
}

/// Satisfiability over all finite quasi-NDMs, with no bound on size.
pub fn satisfiable_by_types(f: &Formula, n_agents: u32) -> Option<bool> {
    let n_agents = n_agents.max(f.max_agent()).max(1);
    let types = Types::build(f, n_agents, MAX_TYPES)?;
    let root = types
        .subs
        .iter()
        .position(|g| g == f)
        .expect("f is a subformula");
    Some(types.survivors().into_iter().any(|t| types.rows[t][root]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndm::check_conditions;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s, 2).unwrap()
    }

    #[test]
    fn atom_in_one_world() {
        let (m, w) = bounded_model_search(&f("p"), 1).unwrap();
        assert_eq!(m.world_count(), 1);
        assert!(m.eval(w, &f("p")));
    }

    #[test]
    fn structural_explicit_belief() {
        let g = f("Exp[1] p & ~Exp[1] (p & p)");
        let (m, w) = bounded_model_search(&g, 2).unwrap();
        assert!(m.eval(w, &g));
        assert!(m.doxastic(AgentId::new(1), w).contains(&f("p")));
        assert!(check_conditions(&m).c1_exact);
    }

    #[test]
    fn box_false_has_no_model() {
        for bound in [1, 4, 8] {
            assert!(bounded_model_search(&f("Box[1] false"), bound).is_none());
        }
        assert_eq!(satisfiable_by_types(&f("Box[1] false"), 1), Some(false));
    }

    #[test]
    fn bound_matters() {
        // needs a p-world and a ~p-world for agent 1
        let g = f("Poss[1] p & Poss[1] ~p");
        assert!(bounded_model_search(&g, 1).is_none());
        let (m, w) = bounded_model_search(&g, 2).unwrap();
        assert!(m.eval(w, &g));
    }

    #[test]
    fn axiom_instances_have_no_countermodel() {
        for s in [
            "~(Exp[1] p -> Box[1] p)",
            "~~(Box[1] p & Box[1] ~p)",
            "~((Box[1] p & Box[1] (p -> q)) -> Box[1] q)",
        ] {
            let g = f(s);
            assert!(bounded_model_search(&g, 8).is_none(), "{s}");
            assert_eq!(satisfiable_by_types(&g, 2), Some(false), "{s}");
        }
    }
}

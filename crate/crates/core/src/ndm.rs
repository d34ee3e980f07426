//! Notional doxastic models.
//!
//! A [`DoxasticModel`] is the raw tuple `(W, D, N, V)`: per agent and world a
//! finite set of explicit beliefs `D(i,w)` and a set of notional worlds
//! `N(i,w)`, plus a finite-support valuation. [`QuasiNdm`] and [`Ndm`] are
//! the validated classes: both need non-empty notional sets (C2); a quasi-NDM
//! only needs `N(i,w)` inside the worlds satisfying all of `D(i,w)` (C1*),
//! an NDM needs equality (C1).
//!
//! This module also holds the finite-model constructions: filtration through
//! a subformula-closed set, the fresh-atom upgrade from quasi-NDMs to NDMs,
//! and the two conversions between NDMs and consistent belief models.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Deref;

use thiserror::Error;

use crate::mab::{is_cmab, BeliefBase, Mab};
use crate::syntax::{atoms, atoms_of, AgentId, Atom, AtomSet, Formula, FormulaSet, Node};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NdmError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("doxastic set contains a formula that is not Box-free: {0}")]
    NotL0(Formula),
    #[error("model violates its class conditions: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ConditionViolation(Vec<Violation>),
    #[error("set is not closed under subformulas: {0} is missing")]
    SigmaNotClosed(Formula),
    #[error("belief model is not consistent")]
    NotConsistent,
}

/// The raw `(W, D, N, V)` tuple, with no class conditions enforced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoxasticModel {
    n_agents: u32,
    worlds: Vec<String>,
    doxastic: Vec<Vec<BTreeSet<Formula>>>,
    notional: Vec<Vec<BTreeSet<usize>>>,
    valuation: BTreeMap<Atom, BTreeSet<usize>>,
}

impl DoxasticModel {
    /// Worlds with empty doxastic and notional sets and nothing true.
    pub fn new(n_agents: u32, worlds: Vec<String>) -> Result<Self, NdmError> {
        if worlds.is_empty() {
            return Err(NdmError::NoWorlds);
        }
        let mut seen = BTreeSet::new();
        for w in &worlds {
            if !seen.insert(w) {
                return Err(NdmError::DuplicateWorld(w.clone()));
            }
        }
        let k = worlds.len();
        Ok(DoxasticModel {
            n_agents,
            worlds,
            doxastic: vec![vec![BTreeSet::new(); k]; n_agents as usize],
            notional: vec![vec![BTreeSet::new(); k]; n_agents as usize],
            valuation: BTreeMap::new(),
        })
    }

    /// Worlds named `w0, w1, ...`.
    pub fn with_world_count(n_agents: u32, k: usize) -> Result<Self, NdmError> {
        Self::new(n_agents, (0..k).map(|j| format!("w{j}")).collect())
    }

    pub fn n_agents(&self) -> u32 {
        self.n_agents
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world_index(&self, name: &str) -> Result<usize, NdmError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| NdmError::UnknownWorld(name.to_string()))
    }

    pub fn doxastic(&self, i: AgentId, w: usize) -> &BTreeSet<Formula> {
        &self.doxastic[i.slot()][w]
    }

    pub fn notional(&self, i: AgentId, w: usize) -> &BTreeSet<usize> {
        &self.notional[i.slot()][w]
    }

    pub fn valuation(&self) -> &BTreeMap<Atom, BTreeSet<usize>> {
        &self.valuation
    }

    pub fn is_true(&self, p: &Atom, w: usize) -> bool {
        self.valuation.get(p).is_some_and(|ws| ws.contains(&w))
    }

    /// `V⁻¹(w)`.
    pub fn atoms_at(&self, w: usize) -> AtomSet {
        self.valuation
            .iter()
            .filter(|(_, ws)| ws.contains(&w))
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn set_doxastic(
        &mut self,
        i: AgentId,
        w: usize,
        beliefs: BTreeSet<Formula>,
    ) -> Result<(), NdmError> {
        if let Some(bad) = beliefs.iter().find(|f| !f.is_l0()) {
            return Err(NdmError::NotL0(bad.clone()));
        }
        self.doxastic[i.slot()][w] = beliefs;
        Ok(())
    }

    pub fn add_belief(&mut self, i: AgentId, w: usize, alpha: Formula) -> Result<(), NdmError> {
        if !alpha.is_l0() {
            return Err(NdmError::NotL0(alpha));
        }
        self.doxastic[i.slot()][w].insert(alpha);
        Ok(())
    }

    pub fn set_notional(&mut self, i: AgentId, w: usize, ws: BTreeSet<usize>) {
        assert!(
            ws.iter().all(|&v| v < self.worlds.len()),
            "notional world out of range"
        );
        self.notional[i.slot()][w] = ws;
    }

    pub fn set_true(&mut self, p: Atom, w: usize) {
        self.valuation.entry(p).or_default().insert(w);
    }

    /// Atoms occurring in some explicit belief somewhere in the model.
    pub fn terminology(&self) -> AtomSet {
        atoms_of(self.doxastic.iter().flatten().flatten())
    }

    /// Every atom the model mentions, in beliefs or in the valuation.
    pub fn vocabulary(&self) -> AtomSet {
        let mut out = self.terminology();
        out.extend(self.valuation.keys().cloned());
        out
    }

    /// Truth of `f` at world `w`.
    pub fn eval(&self, w: usize, f: &Formula) -> bool {
        match f.node() {
            Node::Top => true,
            Node::Atom(p) => self.is_true(p, w),
            Node::Not(a) => !self.eval(w, a),
            Node::And(a, b) => self.eval(w, a) && self.eval(w, b),
            Node::Exp(i, a) => self.doxastic[i.slot()][w].contains(a),
            Node::Box(i, a) => self.notional[i.slot()][w].iter().all(|&v| self.eval(v, a)),
        }
    }

    /// `||f||`.
    pub fn truth_set(&self, f: &Formula) -> BTreeSet<usize> {
        (0..self.worlds.len())
            .filter(|&w| self.eval(w, f))
            .collect()
    }

    /// `⋂_{α ∈ D(i,w)} ||α||`, which is all of `W` when `D(i,w)` is empty.
    pub fn belief_worlds(&self, i: AgentId, w: usize) -> BTreeSet<usize> {
        (0..self.worlds.len())
            .filter(|&v| self.doxastic[i.slot()][w].iter().all(|a| self.eval(v, a)))
            .collect()
    }
}

/// Truth at a named world.
pub fn eval_ndm(m: &DoxasticModel, w: &str, f: &Formula) -> Result<bool, NdmError> {
    Ok(m.eval(m.world_index(w)?, f))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// C2: `N(i,w)` is empty.
    EmptyNotional { agent: AgentId, world: String },
    /// C1*: a notional world falsifies an explicit belief.
    NotionalFalsifiesBelief {
        agent: AgentId,
        world: String,
        notional: String,
        belief: Formula,
    },
    /// C1: a world satisfying all explicit beliefs is not notional.
    MissingNotional {
        agent: AgentId,
        world: String,
        missing: String,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EmptyNotional { agent, world } => {
                write!(f, "C2: N({agent},{world}) is empty")
            }
            Violation::NotionalFalsifiesBelief {
                agent,
                world,
                notional,
                belief,
            } => write!(f, "C1*: {notional} ∈ N({agent},{world}) falsifies {belief}"),
            Violation::MissingNotional {
                agent,
                world,
                missing,
            } => write!(
                f,
                "C1: {missing} satisfies D({agent},{world}) but is not notional"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub c1_star: bool,
    pub c1_exact: bool,
    pub c2: bool,
    pub violations: Vec<Violation>,
}

pub fn check_conditions(m: &DoxasticModel) -> ConditionReport {
    let mut violations = Vec::new();
    let (mut c1_star, mut c1_exact, mut c2) = (true, true, true);
    for i in AgentId::all(m.n_agents) {
        for w in 0..m.world_count() {
            let notional = m.notional(i, w);
            let name = || m.world_name(w).to_string();
            if notional.is_empty() {
                c2 = false;
                violations.push(Violation::EmptyNotional {
                    agent: i,
                    world: name(),
                });
            }
            for &v in notional {
                if let Some(belief) = m.doxastic(i, w).iter().find(|a| !m.eval(v, a)) {
                    c1_star = false;
                    violations.push(Violation::NotionalFalsifiesBelief {
                        agent: i,
                        world: name(),
                        notional: m.world_name(v).to_string(),
                        belief: belief.clone(),
                    });
                }
            }
            for v in m.belief_worlds(i, w) {
                if !notional.contains(&v) {
                    c1_exact = false;
                    violations.push(Violation::MissingNotional {
                        agent: i,
                        world: name(),
                        missing: m.world_name(v).to_string(),
                    });
                }
            }
        }
    }
    ConditionReport {
        c1_star,
        c1_exact: c1_exact && c1_star,
        c2,
        violations,
    }
}

/// A model satisfying C1* and C2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiNdm(DoxasticModel);

impl QuasiNdm {
    pub fn new(m: DoxasticModel) -> Result<Self, NdmError> {
        let report = check_conditions(&m);
        if report.c1_star && report.c2 {
            Ok(QuasiNdm(m))
        } else {
            Err(NdmError::ConditionViolation(
                report
                    .violations
                    .into_iter()
                    .filter(|v| !matches!(v, Violation::MissingNotional { .. }))
                    .collect(),
            ))
        }
    }

    pub fn into_inner(self) -> DoxasticModel {
        self.0
    }
}

impl Deref for QuasiNdm {
    type Target = DoxasticModel;
    fn deref(&self) -> &DoxasticModel {
        &self.0
    }
}

/// A model satisfying C1 and C2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ndm(DoxasticModel);

impl Ndm {
    pub fn new(m: DoxasticModel) -> Result<Self, NdmError> {
        let report = check_conditions(&m);
        if report.c1_exact && report.c2 {
            Ok(Ndm(m))
        } else {
            Err(NdmError::ConditionViolation(report.violations))
        }
    }

    /// Every NDM is a quasi-NDM.
    pub fn to_quasi(&self) -> QuasiNdm {
        QuasiNdm(self.0.clone())
    }

    pub fn into_inner(self) -> DoxasticModel {
        self.0
    }
}

impl Deref for Ndm {
    type Target = DoxasticModel;
    fn deref(&self) -> &DoxasticModel {
        &self.0
    }
}

/// `M_Σ` together with the map `w ↦ |w|_Σ`.
#[derive(Debug, Clone)]
pub struct FiltrationResult {
    pub model: QuasiNdm,
    /// Original world index to filtrated world index.
    pub class_of: Vec<usize>,
    pub sigma: FormulaSet,
}

/// Quotient of `m` by agreement on `sigma`.
///
/// Filtrated worlds are named `c<bits>`, one bit per member of `sigma` in
/// its sorted order. Explicit beliefs are those shared by the whole class and
/// lying in `sigma`; the notional relation is the smallest filtration, i.e.
/// `|v|` is notional for `|w|` when some member of `|v|` is notional for some
/// member of `|w|`.
pub fn filtrate(m: &QuasiNdm, sigma: &FormulaSet) -> Result<FiltrationResult, NdmError> {
    for f in sigma {
        if let Some(missing) = f.children().into_iter().find(|c| !sigma.contains(*c)) {
            return Err(NdmError::SigmaNotClosed(missing.clone()));
        }
    }
    let profile = |w: usize| -> String {
        sigma
            .iter()
            .map(|f| if m.eval(w, f) { '1' } else { '0' })
            .collect()
    };

    let mut class_names: Vec<String> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut by_profile: BTreeMap<String, usize> = BTreeMap::new();
    let mut class_of = Vec::with_capacity(m.world_count());
    for w in 0..m.world_count() {
        let bits = profile(w);
        let c = *by_profile.entry(bits.clone()).or_insert_with(|| {
            class_names.push(format!("c{bits}"));
            members.push(Vec::new());
            class_names.len() - 1
        });
        members[c].push(w);
        class_of.push(c);
    }

    let mut out = DoxasticModel::new(m.n_agents(), class_names).expect("at least one class");
    for i in AgentId::all(m.n_agents()) {
        for (c, ws) in members.iter().enumerate() {
            let mut shared: BTreeSet<Formula> = m.doxastic(i, ws[0]).clone();
            for &w in &ws[1..] {
                shared.retain(|a| m.doxastic(i, w).contains(a));
            }
            shared.retain(|a| sigma.contains(a));
            out.set_doxastic(i, c, shared)
                .expect("beliefs stay Box-free");
            let image = ws
                .iter()
                .flat_map(|&w| m.notional(i, w))
                .map(|&v| class_of[v])
                .collect();
            out.set_notional(i, c, image);
        }
    }
    for p in atoms_of(sigma) {
        for (c, ws) in members.iter().enumerate() {
            if m.is_true(&p, ws[0]) {
                out.set_true(p.clone(), c);
            }
        }
    }
    let model = QuasiNdm::new(out).expect("filtration of a quasi-NDM is a quasi-NDM");
    Ok(FiltrationResult {
        model,
        class_of,
        sigma: sigma.clone(),
    })
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Picks `_<stem>`, appending underscores until it avoids `used`, and records it.
pub(crate) fn fresh_atom(stem: &str, used: &mut AtomSet) -> Atom {
    let mut name = format!("_{stem}");
    loop {
        let atom = Atom::reserved(&name).expect("reserved names are well-formed");
        if used.insert(atom.clone()) {
            return atom;
        }
        name.push('_');
    }
}

/// Upgrades a finite quasi-NDM to an NDM with the same truth values for
/// `phi` (and for every formula that avoids the new atoms).
///
/// Each `(i, w)` gets a fresh atom `_f_<i>_<w>` that is true exactly on
/// `N(i,w)` and is added to `D(i,w)`, which pins the notional set down.
pub fn quasi_to_ndm(m: &QuasiNdm, phi: &Formula) -> Ndm {
    let mut used = m.vocabulary();
    used.extend(atoms(phi));
    let mut out = m.0.clone();
    for i in AgentId::all(m.n_agents()) {
        for w in 0..m.world_count() {
            let stem = format!("f_{}_{}", i, sanitize(m.world_name(w)));
            let marker = fresh_atom(&stem, &mut used);
            out.add_belief(i, w, Formula::atom(marker.clone()))
                .expect("atoms are Box-free");
            for &v in m.notional(i, w) {
                out.set_true(marker.clone(), v);
            }
        }
    }
    debug_assert!(check_conditions(&out).c1_exact);
    Ndm(out)
}

/// Builds an NDM with one world per distinct base of `context ∪ {base}`.
///
/// Returns the model and the world of the base. Context members are named
/// `c0, c1, ...`. When the base is not itself in the context it becomes an
/// extra world `base`, and a fresh marker atom true on exactly the context
/// worlds is added to every doxastic set, so that only context worlds can be
/// notional. Truth agrees with [`crate::mab::eval_mab`] for every formula not
/// mentioning that marker.
pub fn cmab_to_ndm(m: &Mab) -> Result<(Ndm, usize), NdmError> {
    if !is_cmab(m) {
        return Err(NdmError::NotConsistent);
    }
    let mut bases: Vec<&BeliefBase> = m.context().iter().collect();
    let mut names: Vec<String> = (0..bases.len()).map(|j| format!("c{j}")).collect();
    let base_world = match bases.iter().position(|b| *b == m.base()) {
        Some(j) => j,
        None => {
            bases.push(m.base());
            names.push("base".to_string());
            bases.len() - 1
        }
    };
    let marker = if base_world == m.context().len() {
        let mut used = AtomSet::new();
        for b in &bases {
            used.extend(b.valuation().iter().cloned());
            used.extend(atoms_of(b.all_beliefs()));
        }
        Some(fresh_atom("cxt", &mut used))
    } else {
        None
    };

    let n = m.n_agents();
    let mut out = DoxasticModel::new(n, names)?;
    for (w, b) in bases.iter().enumerate() {
        for p in b.valuation() {
            out.set_true(p.clone(), w);
        }
        for i in AgentId::all(n) {
            out.set_doxastic(i, w, b.beliefs(i).clone())?;
            if let Some(c) = &marker {
                out.add_belief(i, w, Formula::atom(c.clone()))?;
            }
        }
    }
    if let Some(c) = &marker {
        for w in 0..m.context().len() {
            out.set_true(c.clone(), w);
        }
    }
    for i in AgentId::all(n) {
        for w in 0..bases.len() {
            let ns = out.belief_worlds(i, w);
            out.set_notional(i, w, ns);
        }
    }
    Ok((Ndm::new(out)?, base_world))
}

/// Builds the belief model rooted at world `w`: one base `(D(1,u), ..., D(n,u), V⁻¹(u))`
/// per world, with redundant worlds (same atoms, same doxastic sets) collapsed.
pub fn ndm_to_cmab(m: &DoxasticModel, w: usize) -> Result<Mab, NdmError> {
    if w >= m.world_count() {
        return Err(NdmError::UnknownWorld(w.to_string()));
    }
    let report = check_conditions(m);
    if !(report.c1_exact && report.c2) {
        return Err(NdmError::ConditionViolation(report.violations));
    }
    let base_of = |u: usize| {
        let beliefs = AgentId::all(m.n_agents())
            .map(|i| m.doxastic(i, u).clone())
            .collect();
        BeliefBase::new(beliefs, m.atoms_at(u)).expect("doxastic sets are Box-free")
    };
    // Mab::new deduplicates structurally equal bases, which is exactly the
    // collapse of redundant worlds.
    let context = (0..m.world_count()).map(base_of).collect();
    let out = Mab::new(base_of(w), context);
    debug_assert!(is_cmab(&out));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mab::eval_mab;
    use crate::syntax::{parse_formula, subformulas};

    fn f(s: &str) -> Formula {
        parse_formula(s, 2).unwrap()
    }
    fn a(i: u32) -> AgentId {
        AgentId::new(i)
    }
    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn singleton() -> DoxasticModel {
        let mut m = DoxasticModel::with_world_count(1, 1).unwrap();
        m.set_notional(a(1), 0, [0].into());
        m.set_true(atom("p"), 0);
        m
    }

    fn two_world() -> DoxasticModel {
        let mut m = DoxasticModel::with_world_count(1, 2).unwrap();
        m.add_belief(a(1), 0, f("p")).unwrap();
        m.set_true(atom("p"), 1);
        m.set_notional(a(1), 0, [1].into());
        m.set_notional(a(1), 1, [0, 1].into());
        m
    }

    #[test]
    fn evaluation_examples() {
        let m = singleton();
        assert!(eval_ndm(&m, "w0", &f("Box[1] p")).unwrap());
        assert!(!eval_ndm(&m, "w0", &f("Exp[1] p")).unwrap());
        assert!(matches!(
            eval_ndm(&m, "nope", &f("p")),
            Err(NdmError::UnknownWorld(_))
        ));

        let m = two_world();
        assert!(eval_ndm(&m, "w0", &f("Box[1] p")).unwrap());
        assert!(eval_ndm(&m, "w0", &f("Exp[1] p")).unwrap());
        assert_eq!(m.truth_set(&f("p")), BTreeSet::from([1]));
        assert_eq!(m.belief_worlds(a(1), 0), *m.notional(a(1), 0));
    }

    #[test]
    fn conditions() {
        let mut m = two_world();
        let r = check_conditions(&m);
        assert!(r.c1_exact && r.c1_star && r.c2, "{:?}", r.violations);

        m.set_notional(a(1), 1, [].into());
        let r = check_conditions(&m);
        assert!(!r.c2);
        assert!(r.violations.contains(&Violation::EmptyNotional {
            agent: a(1),
            world: "w1".into()
        }));

        // drop one world from an exact notional set
        let mut m = two_world();
        m.set_notional(a(1), 1, [1].into());
        let r = check_conditions(&m);
        assert!(r.c1_star && !r.c1_exact && r.c2);

        let mut m = DoxasticModel::with_world_count(1, 3).unwrap();
        for w in 0..3 {
            m.set_notional(a(1), w, [0, 1, 2].into());
        }
        assert!(check_conditions(&m).c1_exact);

        let mut m = two_world();
        m.set_notional(a(1), 0, [0, 1].into());
        let r = check_conditions(&m);
        assert!(!r.c1_star && !r.c1_exact);
        assert!(QuasiNdm::new(m).is_err());
    }

    #[test]
    fn identity_filtration() {
        let m = QuasiNdm::new(two_world()).unwrap();
        let sigma = subformulas(&f("p"));
        let r = filtrate(&m, &sigma).unwrap();
        assert_eq!(r.class_of, vec![0, 1]);
        assert_eq!(r.model.worlds(), ["c0", "c1"]);
        for w in 0..2 {
            assert_eq!(m.eval(w, &f("p")), r.model.eval(r.class_of[w], &f("p")));
        }
    }

    #[test]
    fn filtration_merges_and_drops_outside_atoms() {
        let mut m = DoxasticModel::with_world_count(1, 2).unwrap();
        m.set_true(atom("p"), 0);
        m.set_true(atom("p"), 1);
        m.set_true(atom("q"), 1);
        for w in 0..2 {
            m.set_notional(a(1), w, [0, 1].into());
        }
        let m = QuasiNdm::new(m).unwrap();
        let sigma = subformulas(&f("p"));
        let r = filtrate(&m, &sigma).unwrap();
        assert_eq!(r.model.world_count(), 1);
        assert_eq!(r.class_of, vec![0, 0]);
        assert!(r.model.eval(0, &f("p")));
        assert!(!r.model.eval(0, &f("q")));
        assert!(m.eval(1, &f("q")));
    }

    #[test]
    fn filtration_requires_closed_sigma() {
        let m = QuasiNdm::new(singleton()).unwrap();
        let sigma: FormulaSet = [f("p & q")].into();
        assert!(matches!(
            filtrate(&m, &sigma),
            Err(NdmError::SigmaNotClosed(_))
        ));
    }

    #[test]
    fn quasi_to_ndm_pins_notional_sets() {
        let mut m = two_world();
        m.set_notional(a(1), 1, [1].into());
        let q = QuasiNdm::new(m).unwrap();
        let phi = f("Box[1] p & ~Exp[1] q");
        let n = quasi_to_ndm(&q, &phi);
        assert!(check_conditions(&n).c1_exact);
        let marker = Atom::reserved("_f_1_w1").unwrap();
        assert!(n.doxastic(a(1), 1).contains(&Formula::atom(marker.clone())));
        assert_eq!(n.valuation()[&marker], BTreeSet::from([1]));
        for w in 0..2 {
            assert_eq!(q.eval(w, &phi), n.eval(w, &phi));
        }
    }

    #[test]
    fn quasi_to_ndm_on_exact_model() {
        let q = QuasiNdm::new(two_world()).unwrap();
        let phi = f("Exp[1] p & Box[1] p");
        let n = quasi_to_ndm(&q, &phi);
        assert!(Ndm::new(n.clone().into_inner()).is_ok());
        assert_eq!(q.eval(0, &phi), n.eval(0, &phi));
    }

    #[test]
    fn fresh_atoms_avoid_existing_names() {
        let mut m = singleton();
        let clash = Atom::reserved("_f_1_w0").unwrap();
        m.set_true(clash.clone(), 0);
        let q = QuasiNdm::new(m).unwrap();
        let n = quasi_to_ndm(&q, &f("p"));
        let added: Vec<_> = n.doxastic(a(1), 0).iter().cloned().collect();
        assert_eq!(added, vec![Formula::var("_f_1_w0_")]);
    }

    fn example_mab() -> Mab {
        let base = BeliefBase::empty(2)
            .with_belief(1, f("p"))
            .with_belief(1, f("Exp[2] p"))
            .with_belief(2, f("p"))
            .with_true("p")
            .with_true("q");
        let c2 = BeliefBase::empty(2)
            .with_belief(1, f("p"))
            .with_belief(2, f("p"))
            .with_true("p")
            .with_true("q");
        let c3 = BeliefBase::empty(2).with_true("q");
        Mab::new(base.clone(), vec![base, c2, c3])
    }

    #[test]
    fn cmab_to_ndm_example() {
        let m = example_mab();
        let (n, w) = cmab_to_ndm(&m).unwrap();
        assert_eq!(n.world_count(), 3);
        assert_eq!(w, 0);
        let query = f("Box[1] (p & q) & Box[2] (p & q) & Box[1] Box[2] (p & q)");
        assert!(n.eval(w, &query));
        for g in subformulas(&query) {
            assert_eq!(n.eval(w, &g), eval_mab(&m, &g), "{g}");
        }
    }

    #[test]
    fn cmab_to_ndm_single_base() {
        let c = BeliefBase::empty(2).with_true("p");
        let (n, w) = cmab_to_ndm(&Mab::new(c.clone(), vec![c])).unwrap();
        assert_eq!(n.world_count(), 1);
        assert_eq!(*n.notional(a(1), w), BTreeSet::from([w]));
    }

    #[test]
    fn cmab_to_ndm_with_base_outside_context() {
        // Box[1] ~p holds in the belief model because the only context member
        // falsifies p, even though the base itself makes p true.
        let base = BeliefBase::empty(1).with_true("p");
        let other = BeliefBase::empty(1);
        let m = Mab::new(base, vec![other]);
        assert!(eval_mab(&m, &f("Box[1] ~p")));
        let (n, w) = cmab_to_ndm(&m).unwrap();
        assert_eq!(n.world_name(w), "base");
        assert!(n.eval(w, &f("Box[1] ~p")));
        assert!(n.eval(w, &f("p")));
        assert!(!n.eval(w, &f("Exp[1] p")));
    }

    #[test]
    fn cmab_to_ndm_rejects_inconsistent() {
        let m = Mab::new(BeliefBase::empty(1), vec![]);
        assert_eq!(cmab_to_ndm(&m).unwrap_err(), NdmError::NotConsistent);
    }

    #[test]
    fn ndm_to_cmab_single_world() {
        let mut m = DoxasticModel::with_world_count(2, 1).unwrap();
        m.set_true(atom("p"), 0);
        m.set_notional(a(1), 0, [0].into());
        m.set_notional(a(2), 0, [0].into());
        let mab = ndm_to_cmab(&m, 0).unwrap();
        let expected = BeliefBase::empty(2).with_true("p");
        assert_eq!(mab.context(), std::slice::from_ref(&expected));
        assert_eq!(*mab.base(), expected);
        assert!(is_cmab(&mab));
    }

    #[test]
    fn ndm_to_cmab_collapses_redundant_worlds() {
        let mut m = DoxasticModel::with_world_count(1, 3).unwrap();
        m.set_true(atom("p"), 0);
        m.set_true(atom("p"), 1);
        for w in 0..3 {
            m.set_notional(a(1), w, [0, 1, 2].into());
        }
        let mab = ndm_to_cmab(&m, 1).unwrap();
        assert_eq!(mab.context().len(), 2);
        for g in ["p", "Box[1] p", "~Box[1] ~p", "Box[1] Box[1] ~p"] {
            assert_eq!(m.eval(1, &f(g)), eval_mab(&mab, &f(g)), "{g}");
        }
    }

    #[test]
    fn ndm_to_cmab_requires_exact_conditions() {
        let mut m = two_world();
        m.set_notional(a(1), 1, [1].into());
        assert!(matches!(
            ndm_to_cmab(&m, 0),
            Err(NdmError::ConditionViolation(_))
        ));
    }
}

//! Semantic checks of the axiom schemas and the necessitation rule on
//! random instances.

use std::fmt;

use serde::Serialize;

use super::{check_validity, ModelViews, SolverConfig, SolverError};
use crate::gen::{self, FormulaShape};
use crate::syntax::{parse_formula, AgentId, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Schema {
    K,
    D,
    Int,
    Nec,
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `(Box[i] φ & Box[i] (φ -> ψ)) -> Box[i] ψ`
pub fn k_instance(i: AgentId, phi: Formula, psi: Formula) -> Formula {
    Formula::implies(
        Formula::and(
            Formula::boxed(i, phi.clone()),
            Formula::boxed(i, Formula::implies(phi, psi.clone())),
        ),
        Formula::boxed(i, psi),
    )
}

/// `~(Box[i] φ & Box[i] ~φ)`
pub fn d_instance(i: AgentId, phi: Formula) -> Formula {
    Formula::not(Formula::and(
        Formula::boxed(i, phi.clone()),
        Formula::boxed(i, Formula::not(phi)),
    ))
}

/// `Exp[i] α -> Box[i] α`. `None` unless `α` is Box-free.
pub fn int_instance(i: AgentId, alpha: Formula) -> Option<Formula> {
    let e = Formula::exp(i, alpha.clone()).ok()?;
    Some(Formula::implies(e, Formula::boxed(i, alpha)))
}

/// Fifty valid formulas over two agents: tautologies, instances of the
/// schemas, and necessitations of those.
pub fn known_validities() -> Vec<Formula> {
    const BASE: [&str; 25] = [
        "true",
        "p | ~p",
        "p -> p",
        "(p & q) -> (q & p)",
        "~(p & ~p)",
        "((p -> q) & (q -> r)) -> (p -> r)",
        "(p -> (q -> p))",
        "~~p <-> p",
        "Exp[1] p | ~Exp[1] p",
        "Exp[1] (p & q) -> Exp[1] (p & q)",
        "Box[1] (p -> p)",
        "Box[1] true",
        "Box[2] (p | ~p)",
        "(Box[1] p & Box[1] (p -> q)) -> Box[1] q",
        "~(Box[1] p & Box[1] ~p)",
        "~(Box[2] q & Box[2] ~q)",
        "Exp[1] p -> Box[1] p",
        "Exp[2] (p & q) -> Box[2] (p & q)",
        "Exp[1] Exp[2] p -> Box[1] Exp[2] p",
        "Box[1] p -> ~Box[1] ~p",
        "Box[1] (p & q) -> Box[1] p",
        "(Box[1] p & Box[1] q) -> Box[1] (p & q)",
        "Exp[1] p -> ~Box[1] ~p",
        "(Exp[1] p & Exp[1] q) -> Box[1] (p & q)",
        "Box[2] Box[1] true",
    ];
    let base: Vec<Formula> = BASE
        .iter()
        .map(|s| parse_formula(s, 2).expect("library formulas parse"))
        .collect();
    let mut out = base.clone();
    for (k, f) in base.into_iter().enumerate() {
        out.push(Formula::boxed(AgentId::new(1 + (k % 2) as u32), f));
    }
    out
}

#[derive(Debug, Clone)]
pub struct AxiomFailure {
    pub schema: Schema,
    pub instance: Formula,
    /// A model of the negated instance, when one was found.
    pub countermodel: Option<ModelViews>,
    pub error: Option<SolverError>,
}

#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub checked: Vec<(Schema, usize)>,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn total(&self) -> usize {
        self.checked.iter().map(|(_, n)| n).sum()
    }
}

fn check_one(report: &mut AxiomReport, schema: Schema, instance: Formula, cfg: &SolverConfig) {
    match check_validity(&instance, cfg) {
        Ok(res) if !res.is_sat() => {}
        Ok(res) => report.failures.push(AxiomFailure {
            schema,
            instance,
            countermodel: res.model,
            error: None,
        }),
        Err(e) => report.failures.push(AxiomFailure {
            schema,
            instance,
            countermodel: None,
            error: Some(e),
        }),
    }
}

/// Checks `trials` random instances of each of K, D and Int, with
/// placeholders of modal depth below `depth` over two agents and three
/// atoms, then necessitation on [`known_validities`].
pub fn check_axiom_schemas(
    depth: usize,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> AxiomReport {
    assert!(
        depth >= 1 && trials >= 1,
        "depth and trials must be positive"
    );
    let shape = FormulaShape::new(depth - 1, 2, 3);
    let mut rng = gen::rng(seed);
    let mut report = AxiomReport::default();
    let agent = |rng: &mut gen::GenRng| AgentId::new(rand::Rng::gen_range(rng, 1..=2));
    for _ in 0..trials {
        let i = agent(&mut rng);
        let phi = gen::formula(&mut rng, &shape);
        let psi = gen::formula(&mut rng, &shape);
        check_one(&mut report, Schema::K, k_instance(i, phi, psi), cfg);
    }
    for _ in 0..trials {
        let i = agent(&mut rng);
        let phi = gen::formula(&mut rng, &shape);
        check_one(&mut report, Schema::D, d_instance(i, phi), cfg);
    }
    for _ in 0..trials {
        let i = agent(&mut rng);
        let alpha = gen::l0_formula(&mut rng, &shape);
        let inst = int_instance(i, alpha).expect("generated body is Box-free");
        check_one(&mut report, Schema::Int, inst, cfg);
    }
    let library = known_validities();
    let mut nec = 0;
    for f in &library {
        // the premise must hold before the rule says anything
        let before = report.failures.len();
        check_one(&mut report, Schema::Nec, f.clone(), cfg);
        if report.failures.len() > before {
            continue;
        }
        for i in AgentId::all(2) {
            check_one(&mut report, Schema::Nec, Formula::boxed(i, f.clone()), cfg);
        }
        nec += 1;
    }
    report.checked = vec![
        (Schema::K, trials),
        (Schema::D, trials),
        (Schema::Int, trials),
        (Schema::Nec, nec),
    ];
    report
}

//! Satisfiability and validity.
//!
//! [`tableau_sat`] decides the awareness logic directly. [`sat_lda`] decides
//! the logic of explicit and implicit belief by translating into it, then
//! converts the tableau model back through quasi-NDMs and NDMs to a belief
//! base with its context. Every answer is checked before it is returned: SAT
//! models are re-evaluated in each view and UNSAT proofs are replayed.

pub mod axioms;
pub mod backend;
pub mod bounded;
pub mod nnf;
pub mod tableau;

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::awareness::{
    awareness_to_quasi_ndm, quasi_ndm_to_awareness, translate, AwarenessStructure, LgaFormula,
};
use crate::mab::{eval_mab, is_cmab, Mab};
use crate::ndm::{check_conditions, ndm_to_cmab, quasi_to_ndm, Ndm, QuasiNdm};
use crate::syntax::Formula;
use nnf::Nnf;
use tableau::{replay, Outcome, Proof, Tableau};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;
pub const DEFAULT_MAX_WORLDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub node_budget: usize,
    /// World bound for the bounded backend.
    pub max_worlds: usize,
    /// Lower bound on the number of agents in returned models; the formula's
    /// own agents are always covered.
    pub n_agents: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            max_worlds: DEFAULT_MAX_WORLDS,
            n_agents: 1,
        }
    }
}

impl SolverConfig {
    pub fn agents_for(&self, max_agent: u32) -> u32 {
        self.n_agents.max(max_agent).max(1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("node budget of {budget} exhausted")]
    ResourceLimit { budget: usize },
    #[error(
        "no model with at most {max_worlds} worlds, and the bound is not complete for this formula"
    )]
    Inconclusive { max_worlds: usize },
    #[error("formula has too many subformulas for exhaustive search")]
    SearchTooLarge,
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
}

/// The model behind a SAT answer, in every format available.
#[derive(Debug, Clone)]
pub struct ModelViews {
    pub awareness: Option<AwarenessStructure>,
    pub quasi: Option<QuasiNdm>,
    pub ndm: Option<Ndm>,
    pub cmab: Option<Mab>,
    /// State/world satisfying the query in `awareness`, `quasi` and `ndm`.
    pub root: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Closed tableau for the NNF of the query.
    Tableau { root: Nnf, proof: Proof },
    /// Type elimination removed every type containing the query.
    TypeElimination { subformulas: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes: usize,
    pub millis: u128,
    pub max_depth: usize,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub verdict: Verdict,
    pub model: Option<ModelViews>,
    pub certificate: Option<Certificate>,
    pub stats: Stats,
}

impl SolverResult {
    pub fn is_sat(&self) -> bool {
        self.verdict == Verdict::Sat
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), SolverError> {
    if ok {
        Ok(())
    } else {
        Err(SolverError::SelfCheck(what()))
    }
}

/// Tableau run on a single formula, proof replayed on UNSAT.
fn run_tableau(g: &LgaFormula, cfg: &SolverConfig) -> Result<(Outcome, Nnf, Stats), SolverError> {
    let start = Instant::now();
    let root = Nnf::from_lga(g);
    let mut tab = Tableau::new(cfg.node_budget);
    let outcome = tab
        .run(BTreeSet::from([root.clone()]))
        .map_err(|e| SolverError::ResourceLimit { budget: e.budget })?;
    if let Outcome::Closed(proof) = &outcome {
        replay(&BTreeSet::from([root.clone()]), proof)
            .map_err(|e| SolverError::SelfCheck(format!("proof does not replay: {e}")))?;
    }
    let stats = Stats {
        nodes: tab.nodes,
        millis: start.elapsed().as_millis(),
        max_depth: tab.max_depth,
    };
    Ok((outcome, root, stats))
}

/// Satisfiability over serial awareness structures.
pub fn tableau_sat(g: &LgaFormula, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
    let n_agents = cfg.agents_for(g.max_agent());
    let (outcome, root, stats) = run_tableau(g, cfg)?;
    match outcome {
        Outcome::Closed(proof) => Ok(SolverResult {
            verdict: Verdict::Unsat,
            model: None,
            certificate: Some(Certificate::Tableau { root, proof }),
            stats,
        }),
        Outcome::Open(node) => {
            let m = node.to_structure(n_agents);
            check(m.is_serial(), || "extracted structure is not serial".into())?;
            check(m.eval(0, g), || {
                format!("extracted structure does not satisfy {g}")
            })?;
            Ok(SolverResult {
                verdict: Verdict::Sat,
                model: Some(ModelViews {
                    awareness: Some(m),
                    quasi: None,
                    ndm: None,
                    cmab: None,
                    root: 0,
                }),
                certificate: None,
                stats,
            })
        }
    }
}

/// Confirms that every view present satisfies `f` and belongs to its class.
pub fn verify_views(f: &Formula, views: &ModelViews) -> Result<(), SolverError> {
    let w = views.root;
    if let Some(a) = &views.awareness {
        check(a.is_serial(), || "awareness view is not serial".into())?;
        check(a.eval(w, &translate(f)), || {
            format!("awareness view does not satisfy the translation of {f}")
        })?;
    }
    if let Some(q) = &views.quasi {
        let report = check_conditions(q);
        check(report.c1_star && report.c2, || {
            "quasi-NDM view violates C1*/C2".into()
        })?;
        check(q.eval(w, f), || {
            format!("quasi-NDM view does not satisfy {f}")
        })?;
    }
    if let Some(m) = &views.ndm {
        let report = check_conditions(m);
        check(report.c1_exact && report.c2, || {
            "NDM view violates C1/C2".into()
        })?;
        check(m.eval(w, f), || format!("NDM view does not satisfy {f}"))?;
    }
    if let Some(c) = &views.cmab {
        check(is_cmab(c), || "belief-base view is not a CMAB".into())?;
        check(eval_mab(c, f), || format!("CMAB view does not satisfy {f}"))?;
    }
    Ok(())
}

/// All views derived from an NDM and a world satisfying the query.
pub(crate) fn views_from_ndm(ndm: Ndm, root: usize) -> Result<ModelViews, SolverError> {
    let awareness = quasi_ndm_to_awareness(&ndm)
        .map_err(|e| SolverError::SelfCheck(format!("awareness view: {e}")))?;
    let cmab =
        ndm_to_cmab(&ndm, root).map_err(|e| SolverError::SelfCheck(format!("CMAB view: {e}")))?;
    Ok(ModelViews {
        awareness: Some(awareness),
        quasi: Some(ndm.to_quasi()),
        ndm: Some(ndm),
        cmab: Some(cmab),
        root,
    })
}

/// Satisfiability over CMABs (equivalently NDMs or quasi-NDMs), via the
/// translation into the awareness logic.
pub fn sat_lda(f: &Formula, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
    let g = translate(f);
    let cfg = SolverConfig {
        n_agents: cfg.agents_for(f.max_agent()),
        ..*cfg
    };
    let mut res = tableau_sat(&g, &cfg)?;
    if let Some(views) = res.model.take() {
        let aw = views
            .awareness
            .expect("tableau models carry an awareness view");
        let quasi = awareness_to_quasi_ndm(&aw)
            .map_err(|e| SolverError::SelfCheck(format!("quasi-NDM view: {e}")))?;
        let ndm = quasi_to_ndm(&quasi, f);
        let cmab = ndm_to_cmab(&ndm, views.root)
            .map_err(|e| SolverError::SelfCheck(format!("CMAB view: {e}")))?;
        let views = ModelViews {
            awareness: Some(aw),
            quasi: Some(quasi),
            ndm: Some(ndm),
            cmab: Some(cmab),
            root: views.root,
        };
        verify_views(f, &views)?;
        res.model = Some(views);
    }
    Ok(res)
}

/// `f` holds in every CMAB.
pub fn valid(f: &Formula, cfg: &SolverConfig) -> Result<bool, SolverError> {
    Ok(!sat_lda(&Formula::not(f.clone()), cfg)?.is_sat())
}

/// Like [`valid`], returning the countermodel (a model of `~f`) if any.
pub fn check_validity(f: &Formula, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
    sat_lda(&Formula::not(f.clone()), cfg)
}

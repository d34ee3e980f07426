//! Satisfiability backends, selectable by name.

use std::collections::BTreeMap;
use std::time::Instant;

use super::bounded::{satisfiable_by_types, search, SearchLimits, SearchOutcome};
use super::{
    sat_lda, verify_views, views_from_ndm, Certificate, SolverConfig, SolverError, SolverResult,
    Stats, Verdict,
};
use crate::syntax::Formula;

pub trait SatBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn check(&self, f: &Formula, cfg: &SolverConfig) -> Result<SolverResult, SolverError>;
}

pub struct TableauBackend;

impl SatBackend for TableauBackend {
    fn name(&self) -> &'static str {
        "tableau"
    }

    fn description(&self) -> &'static str {
        "tableau on the awareness translation"
    }

    fn check(&self, f: &Formula, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
        sat_lda(f, cfg)
    }
}

/// Exhaustive search for models of at most `max_worlds` worlds. When none
/// exists, type elimination decides whether the formula is unsatisfiable or
/// only needs more worlds.
pub struct BoundedBackend;

impl SatBackend for BoundedBackend {
    fn name(&self) -> &'static str {
        "bounded"
    }

    fn description(&self) -> &'static str {
        "exhaustive search over small quasi-NDMs"
    }

    fn check(&self, f: &Formula, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
        let start = Instant::now();
        let n_agents = cfg.agents_for(f.max_agent());
        let stats = |start: Instant| Stats {
            millis: start.elapsed().as_millis(),
            ..Stats::default()
        };
        match search(f, n_agents, cfg.max_worlds.max(1), SearchLimits::default()) {
            SearchOutcome::Found(ndm, w) => {
                let views = views_from_ndm(ndm, w)?;
                verify_views(f, &views)?;
                Ok(SolverResult {
                    verdict: Verdict::Sat,
                    model: Some(views),
                    certificate: None,
                    stats: stats(start),
                })
            }
            SearchOutcome::TooLarge => Err(SolverError::SearchTooLarge),
            SearchOutcome::NotFound => match satisfiable_by_types(f, n_agents) {
                Some(false) => Ok(SolverResult {
                    verdict: Verdict::Unsat,
                    model: None,
                    certificate: Some(Certificate::TypeElimination {
                        subformulas: crate::syntax::subformulas(f).len(),
                    }),
                    stats: stats(start),
                }),
                Some(true) => Err(SolverError::Inconclusive {
                    max_worlds: cfg.max_worlds,
                }),
                None => Err(SolverError::SearchTooLarge),
            },
        }
    }
}

/// Backends by name. [`BackendRegistry::default`] holds the built-in ones.
pub struct BackendRegistry {
    backends: BTreeMap<&'static str, Box<dyn SatBackend>>,
}

impl BackendRegistry {
    pub fn empty() -> Self {
        BackendRegistry {
            backends: BTreeMap::new(),
        }
    }

    /// Adds `backend`, replacing any backend with the same name.
    pub fn register(&mut self, backend: Box<dyn SatBackend>) {
        self.backends.insert(backend.name(), backend);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SatBackend> {
        self.backends.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.backends.keys().copied().collect()
    }
}

impl Default for BackendRegistry {
    fn default() -> Self {
        let mut r = BackendRegistry::empty();
        r.register(Box::new(TableauBackend));
        r.register(Box::new(BoundedBackend));
        r
    }
}

pub const DEFAULT_BACKEND: &str = "tableau";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn registry_lookup() {
        let r = BackendRegistry::default();
        assert_eq!(r.names(), vec!["bounded", "tableau"]);
        assert!(r.get(DEFAULT_BACKEND).is_some());
        assert!(r.get("resolution").is_none());
    }

    #[test]
    fn backends_agree_on_small_formulas() {
        let r = BackendRegistry::default();
        let cfg = SolverConfig::default();
        for s in [
            "p & ~p",
            "Box[1] false",
            "Exp[1] p & ~Box[1] p",
            "Exp[1] (p & q) & ~Exp[1] (q & p)",
            "Poss[1] p & Poss[1] ~p & Box[2] q",
        ] {
            let f = parse_formula(s, 2).unwrap();
            let a = r.get("tableau").unwrap().check(&f, &cfg).unwrap();
            let b = r.get("bounded").unwrap().check(&f, &cfg).unwrap();
            assert_eq!(a.verdict, b.verdict, "{s}");
        }
    }

    #[test]
    fn bound_too_small_is_inconclusive() {
        let f = parse_formula("Poss[1] p & Poss[1] ~p", 1).unwrap();
        let cfg = SolverConfig {
            max_worlds: 1,
            ..SolverConfig::default()
        };
        let err = BoundedBackend.check(&f, &cfg).unwrap_err();
        assert_eq!(err, SolverError::Inconclusive { max_worlds: 1 });
    }

    struct Never;

    impl SatBackend for Never {
        fn name(&self) -> &'static str {
            "never"
        }
        fn description(&self) -> &'static str {
            "always gives up"
        }
        fn check(&self, _: &Formula, _: &SolverConfig) -> Result<SolverResult, SolverError> {
            Err(SolverError::SearchTooLarge)
        }
    }

    #[test]
    fn custom_backends_register() {
        let mut r = BackendRegistry::default();
        r.register(Box::new(Never));
        assert_eq!(r.names().len(), 3);
        let f = parse_formula("p", 1).unwrap();
        assert!(r
            .get("never")
            .unwrap()
            .check(&f, &SolverConfig::default())
            .is_err());
    }
}

//! JSON formats for belief bases, (quasi-)NDMs, awareness structures and
//! solver results.
//!
//! Formulas are strings in the concrete syntax; agents are keys `"1"`,
//! `"2"`, ...; worlds and states are referred to by name. Atoms starting with
//! `_` (fresh atoms introduced by conversions) are accepted in model files.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::awareness::{parse_lga, AwarenessError, AwarenessStructure};
use crate::mab::{BeliefBase, Mab, MabError};
use crate::ndm::{DoxasticModel, FiltrationResult, NdmError};
use crate::solver::{Certificate, ModelViews, SolverError, SolverResult};
use crate::syntax::{parse_formula_with, AgentId, Atom, Formula, ParseError, ParseOptions};

pub const RESULT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in {context}: {error}")]
    Formula { context: String, error: ParseError },
    #[error("invalid agent key `{0}`")]
    AgentKey(String),
    #[error("invalid atom `{0}`")]
    Atom(String),
    #[error("`agents` must be at least 1")]
    NoAgents,
    #[error("cannot tell the model kind: expected a `base`, `worlds` or `states` key")]
    UnknownKind,
    #[error("expected {expected}, found {found}")]
    WrongKind {
        expected: ModelKind,
        found: ModelKind,
    },
    #[error(transparent)]
    Mab(#[from] MabError),
    #[error(transparent)]
    Ndm(#[from] NdmError),
    #[error(transparent)]
    Awareness(#[from] AwarenessError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Mab,
    Ndm,
    Awareness,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Mab => "a belief-base model",
            ModelKind::Ndm => "an NDM",
            ModelKind::Awareness => "an awareness structure",
        })
    }
}

type PerAgent<T> = BTreeMap<String, T>;
type PerWorld<T> = BTreeMap<String, T>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseJson {
    #[serde(default)]
    beliefs: PerAgent<Vec<String>>,
    #[serde(default)]
    valuation: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MabJson {
    agents: u32,
    base: BaseJson,
    #[serde(default)]
    context: Vec<BaseJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NdmJson {
    agents: u32,
    worlds: Vec<String>,
    #[serde(default)]
    doxastic: PerAgent<PerWorld<Vec<String>>>,
    #[serde(default)]
    notional: PerAgent<PerWorld<Vec<String>>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AwarenessJson {
    agents: u32,
    states: Vec<String>,
    #[serde(default)]
    access: PerAgent<PerWorld<Vec<String>>>,
    #[serde(default)]
    awareness: PerAgent<PerWorld<Vec<String>>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

/// Any of the three model formats.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Mab(Mab),
    Ndm(DoxasticModel),
    Awareness(AwarenessStructure),
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Mab(_) => ModelKind::Mab,
            AnyModel::Ndm(_) => ModelKind::Ndm,
            AnyModel::Awareness(_) => ModelKind::Awareness,
        }
    }

    pub fn n_agents(&self) -> u32 {
        match self {
            AnyModel::Mab(m) => m.n_agents(),
            AnyModel::Ndm(m) => m.n_agents(),
            AnyModel::Awareness(m) => m.n_agents(),
        }
    }
}

fn agent_key(key: &str, n_agents: u32) -> Result<AgentId, IoError> {
    match key.parse::<u32>() {
        Ok(i) if (1..=n_agents).contains(&i) => Ok(AgentId::new(i)),
        _ => Err(IoError::AgentKey(key.to_string())),
    }
}

fn atom(name: &str) -> Result<Atom, IoError> {
    Atom::any(name).map_err(|_| IoError::Atom(name.to_string()))
}

fn formula(
    text: &str,
    n_agents: u32,
    context: impl FnOnce() -> String,
) -> Result<Formula, IoError> {
    parse_formula_with(text, ParseOptions::model(n_agents)).map_err(|error| IoError::Formula {
        context: context(),
        error,
    })
}

fn check_agents(n: u32) -> Result<u32, IoError> {
    if n == 0 {
        Err(IoError::NoAgents)
    } else {
        Ok(n)
    }
}

pub fn detect_kind(v: &Value) -> Result<ModelKind, IoError> {
    let obj = v.as_object().ok_or(IoError::UnknownKind)?;
    if obj.contains_key("base") {
        Ok(ModelKind::Mab)
    } else if obj.contains_key("worlds") {
        Ok(ModelKind::Ndm)
    } else if obj.contains_key("states") {
        Ok(ModelKind::Awareness)
    } else {
        Err(IoError::UnknownKind)
    }
}

pub fn model_from_str(text: &str) -> Result<AnyModel, IoError> {
    let v: Value = serde_json::from_str(text)?;
    Ok(match detect_kind(&v)? {
        ModelKind::Mab => AnyModel::Mab(mab_from_value(v)?),
        ModelKind::Ndm => AnyModel::Ndm(ndm_from_value(v)?),
        ModelKind::Awareness => AnyModel::Awareness(awareness_from_value(v)?),
    })
}

fn base_from_json(b: BaseJson, n: u32, which: &str) -> Result<BeliefBase, IoError> {
    let mut out = BeliefBase::empty(n);
    for p in &b.valuation {
        out.set_true(atom(p)?);
    }
    for (key, list) in &b.beliefs {
        let i = agent_key(key, n)?;
        for text in list {
            let f = formula(text, n, || format!("{which}, beliefs of agent {i}"))?;
            out.believe(i, f)?;
        }
    }
    Ok(out)
}

fn mab_from_value(v: Value) -> Result<Mab, IoError> {
    let j: MabJson = serde_json::from_value(v)?;
    let n = check_agents(j.agents)?;
    let base = base_from_json(j.base, n, "base")?;
    let context = j
        .context
        .into_iter()
        .enumerate()
        .map(|(k, b)| base_from_json(b, n, &format!("context[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Mab::new(base, context))
}

pub fn mab_from_str(text: &str) -> Result<Mab, IoError> {
    mab_from_value(serde_json::from_str(text)?)
}

fn base_to_json(b: &BeliefBase) -> BaseJson {
    BaseJson {
        beliefs: AgentId::all(b.n_agents())
            .filter(|&i| !b.beliefs(i).is_empty())
            .map(|i| {
                (
                    i.to_string(),
                    b.beliefs(i).iter().map(|f| f.to_string()).collect(),
                )
            })
            .collect(),
        valuation: b.valuation().iter().map(|p| p.to_string()).collect(),
    }
}

pub fn mab_to_value(m: &Mab) -> Value {
    serde_json::to_value(MabJson {
        agents: m.n_agents(),
        base: base_to_json(m.base()),
        context: m.context().iter().map(base_to_json).collect(),
    })
    .expect("plain data serializes")
}

fn ndm_from_value(v: Value) -> Result<DoxasticModel, IoError> {
    let j: NdmJson = serde_json::from_value(v)?;
    let n = check_agents(j.agents)?;
    let mut m = DoxasticModel::new(n, j.worlds)?;
    for (key, per_world) in &j.doxastic {
        let i = agent_key(key, n)?;
        for (w, list) in per_world {
            let wi = m.world_index(w)?;
            for text in list {
                let f = formula(text, n, || format!("doxastic set of agent {i} at {w}"))?;
                m.add_belief(i, wi, f)?;
            }
        }
    }
    for (key, per_world) in &j.notional {
        let i = agent_key(key, n)?;
        for (w, list) in per_world {
            let wi = m.world_index(w)?;
            let ws = list
                .iter()
                .map(|v| m.world_index(v))
                .collect::<Result<BTreeSet<_>, _>>()?;
            m.set_notional(i, wi, ws);
        }
    }
    for (p, ws) in &j.valuation {
        let p = atom(p)?;
        for w in ws {
            let wi = m.world_index(w)?;
            m.set_true(p.clone(), wi);
        }
    }
    Ok(m)
}

pub fn ndm_from_str(text: &str) -> Result<DoxasticModel, IoError> {
    ndm_from_value(serde_json::from_str(text)?)
}

pub fn ndm_to_value(m: &DoxasticModel) -> Value {
    let names = |ws: &BTreeSet<usize>| -> Vec<String> {
        ws.iter().map(|&w| m.world_name(w).to_string()).collect()
    };
    let mut doxastic = BTreeMap::new();
    let mut notional = BTreeMap::new();
    for i in AgentId::all(m.n_agents()) {
        let mut d = BTreeMap::new();
        let mut nn = BTreeMap::new();
        for w in 0..m.world_count() {
            let name = m.world_name(w).to_string();
            if !m.doxastic(i, w).is_empty() {
                d.insert(
                    name.clone(),
                    m.doxastic(i, w).iter().map(|f| f.to_string()).collect(),
                );
            }
            nn.insert(name, names(m.notional(i, w)));
        }
        doxastic.insert(i.to_string(), d);
        notional.insert(i.to_string(), nn);
    }
    serde_json::to_value(NdmJson {
        agents: m.n_agents(),
        worlds: m.worlds().to_vec(),
        doxastic,
        notional,
        valuation: m
            .valuation()
            .iter()
            .filter(|(_, ws)| !ws.is_empty())
            .map(|(p, ws)| (p.to_string(), names(ws)))
            .collect(),
    })
    .expect("plain data serializes")
}

fn awareness_from_value(v: Value) -> Result<AwarenessStructure, IoError> {
    let j: AwarenessJson = serde_json::from_value(v)?;
    let n = check_agents(j.agents)?;
    let mut m = AwarenessStructure::new(n, j.states)?;
    for (key, per_state) in &j.access {
        let i = agent_key(key, n)?;
        for (s, list) in per_state {
            let si = m.state_index(s)?;
            let ts = list
                .iter()
                .map(|t| m.state_index(t))
                .collect::<Result<BTreeSet<_>, _>>()?;
            m.set_successors(i, si, ts);
        }
    }
    for (key, per_state) in &j.awareness {
        let i = agent_key(key, n)?;
        for (s, list) in per_state {
            let si = m.state_index(s)?;
            for text in list {
                let g =
                    parse_lga(text, ParseOptions::model(n)).map_err(|error| IoError::Formula {
                        context: format!("awareness set of agent {i} at {s}"),
                        error,
                    })?;
                m.add_awareness(i, si, g);
            }
        }
    }
    for (p, ss) in &j.valuation {
        let p = atom(p)?;
        for s in ss {
            let si = m.state_index(s)?;
            m.set_true(p.clone(), si);
        }
    }
    Ok(m)
}

pub fn awareness_from_str(text: &str) -> Result<AwarenessStructure, IoError> {
    awareness_from_value(serde_json::from_str(text)?)
}

pub fn awareness_to_value(m: &AwarenessStructure) -> Value {
    let names = |ss: &BTreeSet<usize>| -> Vec<String> {
        ss.iter().map(|&s| m.state_name(s).to_string()).collect()
    };
    let mut access = BTreeMap::new();
    let mut awareness = BTreeMap::new();
    for i in AgentId::all(m.n_agents()) {
        let mut r = BTreeMap::new();
        let mut a = BTreeMap::new();
        for s in 0..m.state_count() {
            let name = m.state_name(s).to_string();
            if !m.awareness(i, s).is_empty() {
                a.insert(
                    name.clone(),
                    m.awareness(i, s).iter().map(|g| g.to_string()).collect(),
                );
            }
            r.insert(name, names(m.successors(i, s)));
        }
        access.insert(i.to_string(), r);
        awareness.insert(i.to_string(), a);
    }
    serde_json::to_value(AwarenessJson {
        agents: m.n_agents(),
        states: m.states().to_vec(),
        access,
        awareness,
        valuation: m
            .valuation()
            .iter()
            .filter(|(_, ss)| !ss.is_empty())
            .map(|(p, ss)| (p.to_string(), names(ss)))
            .collect(),
    })
    .expect("plain data serializes")
}

pub fn model_to_value(m: &AnyModel) -> Value {
    match m {
        AnyModel::Mab(m) => mab_to_value(m),
        AnyModel::Ndm(m) => ndm_to_value(m),
        AnyModel::Awareness(m) => awareness_to_value(m),
    }
}

pub fn filtration_to_value(original: &DoxasticModel, r: &FiltrationResult) -> Value {
    let class_of: BTreeMap<&str, &str> = r
        .class_of
        .iter()
        .enumerate()
        .map(|(w, &c)| (original.world_name(w), r.model.world_name(c)))
        .collect();
    json!({
        "model": ndm_to_value(&r.model),
        "class_of": class_of,
        "sigma": r.sigma.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

pub fn views_to_value(v: &ModelViews) -> Value {
    let mut out = serde_json::Map::new();
    if let Some(a) = &v.awareness {
        out.insert("awareness".into(), awareness_to_value(a));
        out.insert("awareness_root".into(), json!(a.state_name(v.root)));
    }
    if let Some(q) = &v.quasi {
        out.insert("quasi_ndm".into(), ndm_to_value(q));
    }
    if let Some(m) = &v.ndm {
        out.insert("ndm".into(), ndm_to_value(m));
        out.insert("ndm_root".into(), json!(m.world_name(v.root)));
    }
    if let Some(c) = &v.cmab {
        out.insert("cmab".into(), mab_to_value(c));
    }
    Value::Object(out)
}

fn certificate_to_value(c: &Certificate) -> Value {
    serde_json::to_value(c).expect("certificates serialize")
}

/// Versioned result document for `sat` and `valid`.
pub fn result_to_value(res: &Result<SolverResult, SolverError>) -> Value {
    match res {
        Ok(r) => json!({
            "schema": RESULT_SCHEMA,
            "verdict": r.verdict,
            "model": r.model.as_ref().map(views_to_value),
            "certificate": r.certificate.as_ref().map(certificate_to_value),
            "stats": r.stats,
        }),
        Err(e) => json!({
            "schema": RESULT_SCHEMA,
            "verdict": "unknown",
            "reason": e.to_string(),
            "model": null,
            "certificate": null,
            "stats": null,
        }),
    }
}

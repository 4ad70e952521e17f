//! JSON forms of verdicts and witnesses.
//!
//! Naturals are JSON numbers when they fit in a `u64` and decimal strings
//! otherwise. Paths are arrays of steps (`"succ"`, `"add-left"`,
//! `"add-right"`, `"mul-left"`, `"mul-right"`). The published schema for
//! verdicts is [`VERDICT_SCHEMA`]; witness files follow [`WITNESS_SCHEMA`].

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::decide::{Certificate, Verdict, Witness};
use crate::descriptor::expand_within;
use crate::parse::{parse_term_with, ParseError};
use crate::term::{Path, VarId, VarTable};
use crate::Budget;

pub const VERDICT_SCHEMA: &str = include_str!("../schema/verdict.schema.json");
pub const WITNESS_SCHEMA: &str = include_str!("../schema/witness.schema.json");

#[derive(Debug, thiserror::Error)]
pub enum InterchangeError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("term {index}: {source}")]
    Term { index: usize, source: ParseError },
    #[error("not a natural number: {0}")]
    Number(String),
    #[error("label refers to equation {0}, which does not exist")]
    Equation(usize),
}

pub fn nat_to_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(k) => Value::from(k),
        None => Value::from(n.to_string()),
    }
}

/// A natural written as a JSON number or a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonNat {
    Number(u64),
    Text(String),
}

impl JsonNat {
    pub fn to_biguint(&self) -> Result<BigUint, InterchangeError> {
        match self {
            JsonNat::Number(k) => Ok(BigUint::from(*k)),
            JsonNat::Text(s) => s.parse().map_err(|_| InterchangeError::Number(s.clone())),
        }
    }
}

impl From<&BigUint> for JsonNat {
    fn from(n: &BigUint) -> JsonNat {
        match n.to_u64() {
            Some(k) => JsonNat::Number(k),
            None => JsonNat::Text(n.to_string()),
        }
    }
}

/// An assignment as a JSON object keyed by variable name.
pub fn assignment_json(a: &BTreeMap<VarId, BigUint>, names: &VarTable) -> Value {
    let mut m = Map::new();
    for (v, k) in a {
        m.insert(names.name(*v), nat_to_json(k));
    }
    Value::Object(m)
}

fn labels_json(w: &Witness) -> Value {
    let mut out = Vec::new();
    for (eq, labels) in w.labels.iter().enumerate() {
        for (path, k) in labels {
            out.push(json!({ "equation": eq, "path": path, "value": nat_to_json(k) }));
        }
    }
    Value::Array(out)
}

/// The JSON form of a verdict. Reduced-system terms are written out when
/// they fit in `budget`; the minimal descriptor is always included.
pub fn verdict_to_json(v: &Verdict, names: &VarTable, budget: &Budget) -> Value {
    let certificate = match &v.certificate {
        Certificate::Nat(a) => json!({ "kind": "nat", "assignment": assignment_json(a, names) }),
        Certificate::Infinity => json!({ "kind": "infinity" }),
        Certificate::Witness(cert) => {
            let system: Vec<Value> = cert
                .reduced_system
                .iter()
                .map(|(c, k)| {
                    let descriptor = c.render(names).to_string();
                    let term = match expand_within(c, budget) {
                        Ok(t) => Value::from(t.render(names).to_string()),
                        Err(_) => Value::Null,
                    };
                    json!({ "term": term, "descriptor": descriptor, "value": nat_to_json(k) })
                })
                .collect();
            json!({
                "kind": "witness",
                "assignment": assignment_json(&cert.assignment, names),
                "labels": labels_json(&cert.witness),
                "reduced_system": system,
            })
        }
        Certificate::Exhaustion(e) => json!({
            "kind": "exhaustion",
            "conjuncts": e.conjuncts,
            "refuted_by_constants": e.refuted_by_constants,
            "search_nodes": e.search_nodes,
            "labelling_space": e.labelling_space.as_ref().map(nat_to_json),
        }),
    };
    json!({
        "status": v.status,
        "theory": v.theory,
        "certificate": certificate,
        "stats": {
            "search_nodes": v.stats.search_nodes,
            "conjuncts": v.stats.conjuncts,
            "occurrences": v.stats.occurrences,
        },
    })
}

/// The JSON form of a failure, for any command.
pub fn error_to_json(message: &str) -> Value {
    json!({ "status": "error", "error": message })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub system: Vec<SystemEntry>,
    pub labels: Vec<LabelEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    pub term: String,
    pub value: JsonNat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelEntry {
    #[serde(default)]
    pub equation: usize,
    pub path: Path,
    pub value: JsonNat,
}

/// Reads a witness file, interning variable names into `vars`.
pub fn witness_from_json(text: &str, vars: &mut VarTable) -> Result<Witness, InterchangeError> {
    let file: WitnessFile = serde_json::from_str(text)?;
    let mut system = Vec::new();
    for (index, e) in file.system.iter().enumerate() {
        let t = parse_term_with(&e.term, vars).map_err(|source| InterchangeError::Term { index, source })?;
        system.push((t, e.value.to_biguint()?));
    }
    let mut labels = vec![BTreeMap::new(); system.len()];
    for l in &file.labels {
        let map = labels.get_mut(l.equation).ok_or(InterchangeError::Equation(l.equation))?;
        map.insert(l.path.clone(), l.value.to_biguint()?);
    }
    Ok(Witness { system, labels })
}

pub fn witness_to_json(w: &Witness, names: &VarTable) -> Value {
    let system: Vec<Value> = w
        .system
        .iter()
        .map(|(t, n)| json!({ "term": t.render(names).to_string(), "value": nat_to_json(n) }))
        .collect();
    json!({ "system": system, "labels": labels_json(w) })
}

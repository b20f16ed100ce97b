//! Model configuration files.
//!
//! ```json
//! {"kind": "algebra", "signature": {...}, "monad": {"kind": "pfin"},
//!  "bases": {"b": ["a", "b"]}, "consts": {"c": "a"}}
//! ```
//!
//! Storage models take `"states"` instead of `"monad"`, product models take
//! `"left"` and `"right"`. The signature may be omitted when one is supplied by
//! the caller.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use super::literal::parse_literal;
use super::model::{AlgebraModel, BaseAlgebra, ModelRef, ProductModel, StorageModel};
use super::monad::Monad;
use super::set::SemSet;
use super::value::SemVal;
use super::SemError;
use crate::syntax::Signature;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Algebra {
        #[serde(default)]
        signature: Option<serde_json::Value>,
        monad: MonadConfig,
        #[serde(default)]
        bases: BTreeMap<String, Vec<String>>,
        #[serde(default)]
        comp_bases: BTreeMap<String, AlgebraConfig>,
        #[serde(default)]
        consts: BTreeMap<String, String>,
    },
    Storage {
        #[serde(default)]
        signature: Option<serde_json::Value>,
        states: Vec<String>,
        #[serde(default)]
        bases: BTreeMap<String, Vec<String>>,
        #[serde(default)]
        comp_bases: BTreeMap<String, Vec<String>>,
        #[serde(default)]
        consts: BTreeMap<String, String>,
    },
    Product {
        left: Box<ModelConfig>,
        right: Box<ModelConfig>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MonadConfig {
    Pfin,
    List,
    Exception { errors: Vec<String> },
    State { states: Vec<String> },
    Free,
}

/// A finite algebra: carrier plus one entry per operation instance and argument tuple.
#[derive(Clone, Debug, Deserialize)]
pub struct AlgebraConfig {
    pub carrier: Vec<String>,
    #[serde(default)]
    pub ops: BTreeMap<String, Vec<OpEntry>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct OpEntry {
    #[serde(default)]
    pub param: Option<String>,
    #[serde(default)]
    pub args: Vec<String>,
    pub result: String,
}

fn literals(items: &[String]) -> Result<Vec<SemVal>, SemError> {
    items.iter().map(|s| parse_literal(s)).collect()
}

fn carrier(items: &[String]) -> Result<SemSet, SemError> {
    let elems = literals(items)?;
    let mut sorted = elems.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != elems.len() {
        return Err(SemError::Config(format!("duplicate element in [{}]", items.join(", "))));
    }
    Ok(SemSet::finite(elems))
}

fn bases_of(raw: &BTreeMap<String, Vec<String>>) -> Result<BTreeMap<String, SemSet>, SemError> {
    raw.iter().map(|(k, v)| Ok((k.clone(), carrier(v)?))).collect()
}

fn consts_of(raw: &BTreeMap<String, String>) -> Result<BTreeMap<String, SemVal>, SemError> {
    raw.iter().map(|(k, v)| Ok((k.clone(), parse_literal(v)?))).collect()
}

fn signature_of(own: &Option<serde_json::Value>, given: Option<&Signature>) -> Result<Signature, SemError> {
    match (own, given) {
        (Some(v), _) => Signature::from_json(&v.to_string()).map_err(|e| SemError::Config(e.to_string())),
        (None, Some(s)) => Ok(s.clone()),
        (None, None) => Err(SemError::Config("no signature given".into())),
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self, SemError> {
        serde_json::from_str(text).map_err(|e| SemError::Config(e.to_string()))
    }

    /// Builds the model; `sig` is used by components that declare no signature.
    pub fn build(&self, sig: Option<&Signature>) -> Result<ModelRef, SemError> {
        match self {
            ModelConfig::Algebra { signature, monad, bases, comp_bases, consts } => {
                let sig = signature_of(signature, sig)?;
                let bases = bases_of(bases)?;
                let monad = match monad {
                    MonadConfig::Pfin => Monad::pfin(),
                    MonadConfig::List => Monad::list(),
                    MonadConfig::Exception { errors } => Monad::exception(carrier(errors)?)?,
                    MonadConfig::State { states } => Monad::state(carrier(states)?)?,
                    MonadConfig::Free => AlgebraModel::free_monad(&sig, &bases)?,
                };
                let shared = Arc::new(monad.clone());
                let mut algebras = BTreeMap::new();
                for (name, cfg) in comp_bases {
                    algebras.insert(name.clone(), build_algebra(name, shared.clone(), cfg)?);
                }
                Ok(Arc::new(AlgebraModel::new(sig, monad, bases, algebras, consts_of(consts)?)?))
            }
            ModelConfig::Storage { signature, states, bases, comp_bases, consts } => {
                let sig = signature_of(signature, sig)?;
                Ok(Arc::new(StorageModel::new(
                    sig,
                    carrier(states)?,
                    bases_of(bases)?,
                    bases_of(comp_bases)?,
                    consts_of(consts)?,
                )?))
            }
            ModelConfig::Product { left, right } => {
                Ok(Arc::new(ProductModel::new(left.build(sig)?, right.build(sig)?)?))
            }
        }
    }
}

/// A finite algebra of `monad` from its tables.
pub fn build_algebra(name: &str, monad: Arc<Monad>, cfg: &AlgebraConfig) -> Result<BaseAlgebra, SemError> {
    let mut entries = Vec::new();
    for (op, rows) in &cfg.ops {
        for row in rows {
            let param = row.param.as_deref().map(parse_literal).transpose()?;
            let inst = monad.resolve(op, param.as_ref())?;
            entries.push((inst, literals(&row.args)?, parse_literal(&row.result)?));
        }
    }
    BaseAlgebra::new(name, monad, literals(&cfg.carrier)?, entries)
}

pub fn load_model(text: &str, sig: Option<&Signature>) -> Result<ModelRef, SemError> {
    ModelConfig::from_json(text)?.build(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semcore::model::interp_vtype;
    use crate::syntax::ValueType;

    const SIG: &str =
        r#"{"value_bases": ["b"], "operations": [{"name": "or", "arity": 2}, {"name": "fail", "arity": 0}]}"#;

    #[test]
    fn loads_algebra_model() {
        let text = format!(
            r#"{{"kind": "algebra", "signature": {SIG}, "monad": {{"kind": "pfin"}}, "bases": {{"b": ["a", "c"]}}}}"#
        );
        let m = load_model(&text, None).unwrap();
        assert_eq!(m.kind(), "algebra");
        assert_eq!(interp_vtype(m.as_ref(), &ValueType::base("b")).unwrap().size(), Some(2));
    }

    #[test]
    fn loads_product_with_shared_signature() {
        let sig = Signature::from_json(SIG).unwrap();
        let text = r#"{"kind": "product",
            "left": {"kind": "algebra", "monad": {"kind": "pfin"}, "bases": {"b": ["a"]}},
            "right": {"kind": "algebra", "monad": {"kind": "list"}, "bases": {"b": ["a"]}}}"#;
        let m = load_model(text, Some(&sig)).unwrap();
        assert!(m.components().is_some());
    }

    #[test]
    fn loads_algebra_with_base_type() {
        let text = r#"{"kind": "algebra",
            "signature": {"comp_bases": ["J"], "operations": [{"name": "raise_e", "arity": 0}]},
            "monad": {"kind": "exception", "errors": ["e"]},
            "comp_bases": {"J": {"carrier": ["p", "q"], "ops": {"raise_e": [{"result": "q"}]}}}}"#;
        assert!(load_model(text, None).is_ok());
    }

    #[test]
    fn reports_config_errors() {
        assert!(matches!(load_model("{}", None), Err(SemError::Config(_))));
        let text = r#"{"kind": "storage", "signature": {}, "states": []}"#;
        assert_eq!(load_model(text, None).unwrap_err(), SemError::EmptyState);
    }
}

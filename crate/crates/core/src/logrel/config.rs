//! Gluing configuration files.
//!
//! ```json
//! {"model": {"kind": "algebra", ...}, "mode": "unary",
//!  "lifting": {"kind": "exception", "errors": ["e1"]},
//!  "base_rels": {"b": {"members": ["a"]}}, "comp_base_rels": {}}
//! ```
//!
//! Binary relations list pairs: `{"left": "b", "right": "b", "pairs": [["a", "a"]]}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use super::{GluedModel, LogrelError, Mode};
use crate::relations::{
    em_pair_lifting, exception_lifting, free_lifting, pair_list_lifting, EmVariant, LiftingRef, Pred, TtLifting,
};
use crate::semcore::{
    build_algebra, interp_ctype, interp_vtype, parse_literal, AlgebraConfig, Model, ModelConfig, ModelRef, MonadKind,
    SemError, SemSet, SemVal,
};
use crate::syntax::{CompType, Signature, ValueType};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub signature: Option<serde_json::Value>,
    pub mode: ModeConfig,
    pub lifting: LiftingConfig,
    #[serde(default)]
    pub base_rels: BTreeMap<String, RelConfig>,
    #[serde(default)]
    pub comp_base_rels: BTreeMap<String, RelConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeConfig {
    Unary,
    Binary,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LiftingConfig {
    Free,
    /// `errors` lists the related exceptions.
    Exception {
        errors: Vec<String>,
    },
    /// Either `"preset": "erratic"` or a finite algebra with its predicate.
    Tt {
        #[serde(default)]
        preset: Option<String>,
        #[serde(default)]
        algebra: Option<AlgebraConfig>,
        #[serde(default)]
        pred: Vec<String>,
    },
    Em {
        #[serde(default)]
        variant: Option<String>,
    },
    List,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RelConfig {
    Unary {
        #[serde(default)]
        base: Option<String>,
        members: Vec<String>,
    },
    Binary {
        #[serde(default)]
        left: Option<String>,
        #[serde(default)]
        right: Option<String>,
        pairs: Vec<[String; 2]>,
    },
}

fn bad(msg: impl Into<String>) -> LogrelError {
    LogrelError::Config(msg.into())
}

fn literals(items: &[String]) -> Result<Vec<SemVal>, SemError> {
    items.iter().map(|s| parse_literal(s)).collect()
}

impl RelConfig {
    fn build(&self, name: &str, mode: Mode, carrier: SemSet) -> Result<Pred, LogrelError> {
        let named = |given: &Option<String>| match given {
            Some(b) if b != name => Err(bad(format!("relation for `{name}` names base `{b}`"))),
            _ => Ok(()),
        };
        match (self, mode) {
            (RelConfig::Unary { base, members }, Mode::Unary) => {
                named(base)?;
                Ok(Pred::from_members(carrier, literals(members)?)?)
            }
            (RelConfig::Binary { left, right, pairs }, Mode::Binary) => {
                named(left)?;
                named(right)?;
                let mut ps = Vec::with_capacity(pairs.len());
                for [a, b] in pairs {
                    ps.push(SemVal::pair(parse_literal(a)?, parse_literal(b)?));
                }
                Ok(Pred::from_members(carrier, ps)?)
            }
            _ => Err(bad(format!("relation for `{name}` does not match the gluing mode"))),
        }
    }
}

impl LiftingConfig {
    pub fn build(&self, base: &dyn Model, mode: Mode) -> Result<LiftingRef, LogrelError> {
        let monad = || base.monad().cloned().ok_or_else(|| bad("this lifting needs a single model with a monad"));
        let unary = || if mode == Mode::Unary { Ok(()) } else { Err(bad("this lifting is unary")) };
        let binary = || if mode == Mode::Binary { Ok(()) } else { Err(bad("this lifting is binary")) };
        Ok(match self {
            LiftingConfig::Free => {
                unary()?;
                Arc::new(free_lifting(monad()?)?)
            }
            LiftingConfig::Exception { errors } => {
                unary()?;
                let m = monad()?;
                let MonadKind::Exception(e) = m.kind() else {
                    return Err(bad("an exception lifting needs the exception monad"));
                };
                let ebar = Pred::from_members(e.clone(), literals(errors)?)?;
                Arc::new(exception_lifting(m, ebar)?)
            }
            LiftingConfig::Tt { preset, algebra, pred } => {
                unary()?;
                match (preset.as_deref(), algebra) {
                    (Some("erratic"), None) => Arc::new(TtLifting::erratic()),
                    (None, Some(cfg)) => {
                        let alg = Arc::new(build_algebra("tt parameter", monad()?, cfg)?);
                        let carrier = SemSet::finite(alg.carrier().to_vec());
                        let pbar = Pred::from_members(carrier, literals(pred)?)?;
                        Arc::new(TtLifting::from_base_algebra(alg, pbar)?)
                    }
                    (Some(p), None) => return Err(bad(format!("unknown tt preset `{p}`"))),
                    _ => return Err(bad("a tt lifting takes a preset or an algebra, not both")),
                }
            }
            LiftingConfig::Em { variant } => {
                binary()?;
                let v = match variant.as_deref().unwrap_or("full") {
                    "full" => EmVariant::Full,
                    "forward" => EmVariant::ForwardOnly,
                    "nonempty" => EmVariant::NoEmpty,
                    other => return Err(bad(format!("unknown em variant `{other}`"))),
                };
                Arc::new(em_pair_lifting(v))
            }
            LiftingConfig::List => {
                binary()?;
                Arc::new(pair_list_lifting())
            }
        })
    }
}

impl GlueConfig {
    pub fn from_json(text: &str) -> Result<Self, LogrelError> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn build(&self) -> Result<GluedModel, LogrelError> {
        let sig = match &self.signature {
            Some(v) => Some(Signature::from_json(&v.to_string()).map_err(|e| bad(e.to_string()))?),
            None => None,
        };
        let base: ModelRef = self.model.build(sig.as_ref())?;
        let mode = match self.mode {
            ModeConfig::Unary => Mode::Unary,
            ModeConfig::Binary => Mode::Binary,
        };
        let lifting = self.lifting.build(base.as_ref(), mode)?;
        let mut rels = BTreeMap::new();
        for (n, r) in &self.base_rels {
            let carrier = interp_vtype(base.as_ref(), &ValueType::base(n.as_str()))
                .map_err(|_| bad(format!("`{n}` is not a value base type")))?;
            rels.insert(n.clone(), r.build(n, mode, carrier)?);
        }
        let mut comp_rels = BTreeMap::new();
        for (n, r) in &self.comp_base_rels {
            let carrier = interp_ctype(base.as_ref(), &CompType::base(n.as_str()))
                .map_err(|_| bad(format!("`{n}` is not a computation base type")))?
                .carrier();
            comp_rels.insert(n.clone(), r.build(n, mode, carrier)?);
        }
        GluedModel::new(base, mode, rels, comp_rels, lifting)
    }
}

pub fn load_glue(text: &str) -> Result<GluedModel, LogrelError> {
    GlueConfig::from_json(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXC: &str = r#"{
        "model": {"kind": "algebra",
                  "signature": {"value_bases": ["b"], "operations": [{"name": "raise_e1", "arity": 0}]},
                  "monad": {"kind": "exception", "errors": ["e1", "e2"]},
                  "bases": {"b": ["a", "b"]}},
        "mode": "unary",
        "lifting": {"kind": "exception", "errors": ["e1"]},
        "base_rels": {"b": {"base": "b", "members": ["a"]}}
    }"#;

    #[test]
    fn loads_exception_gluing() {
        let g = load_glue(EXC).unwrap();
        let r = g.lift_ctype(&CompType::free(ValueType::base("b"))).unwrap();
        assert!(r.contains(&parse_literal("raise e1").unwrap()).unwrap());
        assert!(!r.contains(&parse_literal("raise e2").unwrap()).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        let missing = EXC.replace(r#""base_rels": {"b": {"base": "b", "members": ["a"]}}"#, r#""base_rels": {}"#);
        assert!(matches!(load_glue(&missing), Err(LogrelError::Config(_))));
        let outside = EXC.replace(r#"["a"]}}"#, r#"["z"]}}"#);
        assert!(load_glue(&outside).is_err());
        let wrong_mode = EXC.replace(r#""mode": "unary""#, r#""mode": "binary""#);
        assert!(load_glue(&wrong_mode).is_err());
        assert!(load_glue("{").is_err());
    }

    #[test]
    fn loads_binary_em_gluing() {
        let text = r#"{
            "signature": {"value_bases": ["b"], "operations": [{"name": "or", "arity": 2}, {"name": "fail", "arity": 0}]},
            "model": {"kind": "product",
                      "left": {"kind": "algebra", "monad": {"kind": "pfin"}, "bases": {"b": ["a", "b"]}},
                      "right": {"kind": "algebra", "monad": {"kind": "list"}, "bases": {"b": ["a", "b"]}}},
            "mode": "binary",
            "lifting": {"kind": "em"},
            "base_rels": {"b": {"left": "b", "right": "b", "pairs": [["a", "a"], ["b", "b"]]}}
        }"#;
        let g = load_glue(text).unwrap();
        let r = g.lift_ctype(&CompType::free(ValueType::base("b"))).unwrap();
        assert!(r.contains(&parse_literal("({a}, [a, a])").unwrap()).unwrap());
    }
}

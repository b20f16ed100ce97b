use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{AnyType, CompType, ValueType};
use super::lexer::is_keyword;
use super::parser;
use super::ParseError;

/// Constant name to its declared type.
pub type ConstEnv = BTreeMap<String, AnyType>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
    pub param: Option<ValueType>,
}

/// Base types, algebraic operations and typed constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub value_bases: Vec<String>,
    pub comp_bases: Vec<String>,
    pub operations: Vec<OpDecl>,
    pub constants: ConstEnv,
}

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("malformed signature JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate name `{0}` in signature")]
    Duplicate(String),
    #[error("`{0}` is a keyword and cannot be declared")]
    Keyword(String),
    #[error("invalid identifier `{0}`")]
    BadName(String),
    #[error("type of `{name}`: {err}")]
    Type { name: String, err: ParseError },
}

#[derive(Serialize, Deserialize)]
struct RawOp {
    name: String,
    arity: usize,
    #[serde(default)]
    param: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RawConst {
    name: String,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Serialize, Deserialize)]
struct RawSignature {
    #[serde(default)]
    value_bases: Vec<String>,
    #[serde(default)]
    comp_bases: Vec<String>,
    #[serde(default)]
    operations: Vec<RawOp>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constants: Vec<RawConst>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_value_base(mut self, name: &str) -> Self {
        self.value_bases.push(name.to_string());
        self
    }

    pub fn with_comp_base(mut self, name: &str) -> Self {
        self.comp_bases.push(name.to_string());
        self
    }

    pub fn with_op(mut self, name: &str, arity: usize, param: Option<ValueType>) -> Self {
        self.operations.push(OpDecl { name: name.to_string(), arity, param });
        self
    }

    pub fn with_const(mut self, name: &str, ty: AnyType) -> Self {
        self.constants.insert(name.to_string(), ty);
        self
    }

    pub fn op(&self, name: &str) -> Option<&OpDecl> {
        self.operations.iter().find(|o| o.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&AnyType> {
        self.constants.get(name)
    }

    pub fn is_value_base(&self, name: &str) -> bool {
        self.value_bases.iter().any(|b| b == name)
    }

    pub fn is_comp_base(&self, name: &str) -> bool {
        self.comp_bases.iter().any(|b| b == name)
    }

    /// Same bases and operations; constants may differ.
    pub fn same_effects(&self, other: &Signature) -> bool {
        self.value_bases == other.value_bases
            && self.comp_bases == other.comp_bases
            && self.operations == other.operations
    }

    pub fn validate(&self) -> Result<(), SignatureError> {
        let mut seen_bases = BTreeSet::new();
        for b in self.value_bases.iter().chain(&self.comp_bases) {
            check_name(b)?;
            if !seen_bases.insert(b.as_str()) {
                return Err(SignatureError::Duplicate(b.clone()));
            }
        }
        let mut seen_terms = BTreeSet::new();
        for name in self.operations.iter().map(|o| &o.name).chain(self.constants.keys()) {
            check_name(name)?;
            if !seen_terms.insert(name.as_str()) {
                return Err(SignatureError::Duplicate(name.clone()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SignatureError> {
        let raw: RawSignature = serde_json::from_str(text)?;
        let mut sig = Signature {
            value_bases: raw.value_bases,
            comp_bases: raw.comp_bases,
            operations: Vec::new(),
            constants: ConstEnv::new(),
        };
        for op in raw.operations {
            let param = match op.param {
                Some(t) => Some(
                    parser::parse_vtype(&t, &sig).map_err(|err| SignatureError::Type { name: op.name.clone(), err })?,
                ),
                None => None,
            };
            sig.operations.push(OpDecl { name: op.name, arity: op.arity, param });
        }
        for c in raw.constants {
            let ty = parser::parse_any_type(&c.ty, &sig)
                .map_err(|err| SignatureError::Type { name: c.name.clone(), err })?;
            if sig.constants.insert(c.name.clone(), ty).is_some() {
                return Err(SignatureError::Duplicate(c.name));
            }
        }
        sig.validate()?;
        Ok(sig)
    }

    pub fn to_json(&self) -> String {
        let raw = RawSignature {
            value_bases: self.value_bases.clone(),
            comp_bases: self.comp_bases.clone(),
            operations: self
                .operations
                .iter()
                .map(|o| RawOp { name: o.name.clone(), arity: o.arity, param: o.param.as_ref().map(|p| p.to_string()) })
                .collect(),
            constants: self.constants.iter().map(|(n, t)| RawConst { name: n.clone(), ty: t.to_string() }).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("signature serialises")
    }

    /// Value types mentioned by the signature, used to seed generator binder types.
    pub fn base_value_types(&self) -> Vec<ValueType> {
        self.value_bases.iter().map(ValueType::base).collect()
    }

    pub fn comp_constants_of(&self, ty: &CompType) -> Vec<&str> {
        self.constants
            .iter()
            .filter(|(_, t)| matches!(t, AnyType::Comp(b) if b == ty))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn value_constants_of(&self, ty: &ValueType) -> Vec<&str> {
        self.constants
            .iter()
            .filter(|(_, t)| matches!(t, AnyType::Value(a) if a == ty))
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

fn check_name(name: &str) -> Result<(), SignatureError> {
    if is_keyword(name) {
        return Err(SignatureError::Keyword(name.to_string()));
    }
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(super::lexer::is_ident_start) && chars.all(super::lexer::is_ident_continue);
    if ok {
        Ok(())
    } else {
        Err(SignatureError::BadName(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"value_bases":["b"],"comp_bases":[],"operations":[
            {"name":"or","arity":2,"param":null},{"name":"raise","arity":0,"param":"b"}],
            "constants":[{"name":"a","type":"b"},{"name":"k","type":"F b"}]}"#;
        let sig = Signature::from_json(text).unwrap();
        assert_eq!(sig.op("raise").unwrap().param, Some(ValueType::base("b")));
        assert_eq!(sig.constant("k"), Some(&AnyType::Comp(CompType::free(ValueType::base("b")))));
        let again = Signature::from_json(&sig.to_json()).unwrap();
        assert_eq!(sig, again);
    }

    #[test]
    fn rejects_duplicates_and_keywords() {
        let dup = r#"{"value_bases":["b","b"],"comp_bases":[],"operations":[]}"#;
        assert!(matches!(Signature::from_json(dup), Err(SignatureError::Duplicate(_))));
        let kw = r#"{"value_bases":[],"comp_bases":[],"operations":[{"name":"return","arity":0}]}"#;
        assert!(matches!(Signature::from_json(kw), Err(SignatureError::Keyword(_))));
    }

    #[test]
    fn unknown_base_in_param_is_reported() {
        let text = r#"{"value_bases":[],"comp_bases":[],"operations":[{"name":"w","arity":1,"param":"q"}]}"#;
        assert!(matches!(Signature::from_json(text), Err(SignatureError::Type { .. })));
    }
}

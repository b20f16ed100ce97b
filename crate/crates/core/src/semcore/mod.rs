//! The semantic universe: carriers, values, monads and models.

pub mod config;
pub mod laws;
pub mod literal;
pub mod model;
pub mod monad;
pub mod set;
pub mod value;

use thiserror::Error;

pub use config::{build_algebra, load_model, AlgebraConfig, ModelConfig};
pub use literal::parse_literal;
pub use model::{
    interp_ctype, interp_vtype, AlgebraModel, BaseAlgebra, CompObject, Kont, Model, ModelRef, ProductModel,
    StorageModel,
};
pub use monad::{Monad, MonadKind, OpInstance};
pub use set::{FreeOp, SemSet, ELEMENT_LIMIT};
pub use value::{sem_eq, FunVal, MonVal, SemVal};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemError {
    #[error("carrier {0} is not finite")]
    NotFinite(String),
    #[error("carrier {0} is too large to enumerate")]
    TooLarge(String),
    #[error("cannot compare intensional functions over a non-finite domain")]
    ClosureComparison,
    #[error("the state set must be nonempty")]
    EmptyState,
    #[error("the {monad} monad does not support operation `{op}`")]
    UnsupportedOp { monad: String, op: String },
    #[error("unknown base type `{0}`")]
    UnknownBase(String),
    #[error("no interpretation for constant `{0}`")]
    UnknownConst(String),
    #[error("value {value} is not in the carrier of {ty}")]
    NotInCarrier { value: String, ty: String },
    #[error("relation carrier {found} does not match {expected}")]
    CarrierMismatch { expected: String, found: String },
    #[error("bad literal: {0}")]
    Literal(String),
    #[error("model configuration: {0}")]
    Config(String),
    #[error("search budget of {0} exceeded")]
    BudgetExceeded(u64),
    /// Reached only on ill-typed input.
    #[error("internal evaluation error: {0}")]
    Defensive(String),
}

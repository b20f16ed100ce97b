pub mod cli;
pub mod eval;
pub mod lindcheck;
pub mod logrel;
pub mod relations;
pub mod semcore;
pub mod syntax;
pub mod typecheck;

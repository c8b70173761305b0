//! Syntax and statics.

pub mod enumerate;
pub mod parse;
pub mod term;
pub mod typeck;
pub mod types;

pub use term::{name, Class, Name, OpSym, Term};
pub use typeck::{infer, typecheck, typecheck_comp, typecheck_context, typecheck_value, TypeEnv, TypeError};
pub use types::{type_eq, Type};

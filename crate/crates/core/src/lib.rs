//! A toolchain for a linear call-by-value lambda calculus with algebraic
//! effects and an explicit copying modality.
//!
//! The pipeline: [`lang`] parses and typechecks, [`eval`] runs programs in one
//! of the monads of [`monad`], [`rts`] builds the resource transition system,
//! [`trace`] decides bounded trace equivalence and [`oracle`] tests bounded
//! contextual equivalence by brute force.

pub mod eval;
pub mod lang;
pub mod monad;
pub mod oracle;
pub mod prelude;
pub mod rts;
pub mod sample;
pub mod trace;

//! Step-indexed monadic evaluation.

use thiserror::Error;

use crate::lang::Term;
use crate::monad::{Monad, MonadError, MonadVal};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("stuck term `{0}`")]
    Stuck(String),
    #[error(transparent)]
    Monad(#[from] MonadError),
}

/// `[[e]]_k`. Values in the result are in canonical form, so alpha-equivalent
/// results are merged.
pub fn eval_fuel(monad: Monad, e: &Term, k: usize) -> Result<MonadVal<Term>, EvalError> {
    if k == 0 {
        return Ok(MonadVal::bottom(monad));
    }
    let k = k - 1;
    match e {
        Term::Return(v) => Ok(MonadVal::unit(monad, v.canonical())),
        Term::App(v, w) => match &**v {
            Term::Abs(x, body) => eval_fuel(monad, &body.subst_value(x, w), k),
            _ => Err(EvalError::Stuck(e.to_string())),
        },
        Term::Seq(e1, x, f) => {
            eval_fuel(monad, e1, k)?.try_bind(|v| eval_fuel(monad, &f.subst_value(x, v), k))
        }
        Term::CoSeq(v, a, f) => match &**v {
            Term::Bang(inner) => eval_fuel(monad, &f.subst_comp(a, inner), k),
            _ => Err(EvalError::Stuck(e.to_string())),
        },
        Term::Op(sym, args) => {
            let args = args.iter().map(|a| eval_fuel(monad, a, k)).collect::<Result<Vec<_>, _>>()?;
            Ok(MonadVal::apply_op(*sym, args)?)
        }
        _ => Err(EvalError::Stuck(e.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: MonadVal<Term>,
    pub fuel_used: usize,
    /// The result did not change with one more unit of fuel. This is only a
    /// hint: it does not imply the limit has been reached.
    pub stabilized: bool,
}

pub fn eval(monad: Monad, e: &Term, budget: usize) -> Result<EvalResult, EvalError> {
    let value = eval_fuel(monad, e, budget)?;
    let next = eval_fuel(monad, e, budget + 1)?;
    Ok(EvalResult { stabilized: value == next, value, fuel_used: budget })
}

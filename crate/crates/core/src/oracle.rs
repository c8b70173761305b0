//! Bounded contextual equivalence by exhaustive context enumeration, and the
//! cross-check against trace equivalence.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::eval::{eval_fuel, EvalError};
use crate::lang::enumerate::Generator;
use crate::lang::{typecheck_comp, Class, OpSym, Term, Type, TypeEnv, TypeError};
use crate::monad::{Monad, Observation};
use crate::rts::RtsError;
use crate::trace::{trace_equiv_comps, TraceBounds, TraceReport, Verdict};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("ill-typed program: {0}")]
    Type(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Rts(#[from] RtsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CtxBounds {
    pub ctx_size: usize,
    pub fuel: usize,
}

impl CtxBounds {
    pub fn to_json(&self) -> Json {
        json!({"ctx_size": self.ctx_size, "fuel": self.fuel})
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtxWitness {
    pub context: Term,
    pub lhs: Observation,
    pub rhs: Observation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtxReport {
    pub verdict: Verdict,
    pub bounds: CtxBounds,
    pub witness: Option<CtxWitness>,
    /// Number of contexts tried.
    pub explored: usize,
}

impl CtxReport {
    pub fn to_json(&self) -> Json {
        let witness = match &self.witness {
            None => Json::Null,
            Some(w) => json!({
                "context": w.context.to_string(),
                "lhs_obs": w.lhs.to_json_obs(),
                "rhs_obs": w.rhs.to_json_obs(),
            }),
        };
        json!({
            "verdict": self.verdict.as_str(),
            "bounds": self.bounds.to_json(),
            "witness": witness,
            "explored": self.explored,
        })
    }
}

/// Contexts for one hole type, grouped by size and generated on demand.
pub struct ContextCache {
    ops: Vec<OpSym>,
    by_type: HashMap<Type, (Generator, Vec<Vec<Term>>)>,
}

impl ContextCache {
    pub fn new(monad: Monad) -> Self {
        ContextCache { ops: monad.enum_ops(), by_type: HashMap::new() }
    }

    /// Contexts of exactly `size` nodes of any result type.
    pub fn of_size(&mut self, hole: &Type, size: usize) -> &[Term] {
        let ops = self.ops.clone();
        let (gen, sizes) = self.by_type.entry(hole.clone()).or_insert_with(|| (Generator::new(&ops), Vec::new()));
        while sizes.len() <= size {
            let s = sizes.len();
            let ctxs = if s == 0 {
                Vec::new()
            } else {
                gen.exact(&TypeEnv::empty(), Some(hole), Class::Computation, None, s)
            };
            sizes.push(ctxs);
        }
        &sizes[size]
    }
}

/// Compare `obs [[C[e]]]_k` with `obs [[C[f]]]_k` over every context up to
/// the size bound: by size, then in enumeration order.
pub fn ctx_equiv(monad: Monad, e: &Term, f: &Term, ty: &Type, bounds: CtxBounds) -> Result<CtxReport, OracleError> {
    ctx_equiv_cached(&mut ContextCache::new(monad), monad, e, f, ty, bounds)
}

pub fn ctx_equiv_cached(
    cache: &mut ContextCache,
    monad: Monad,
    e: &Term,
    f: &Term,
    ty: &Type,
    bounds: CtxBounds,
) -> Result<CtxReport, OracleError> {
    typecheck_comp(&TypeEnv::empty(), e, ty)?;
    typecheck_comp(&TypeEnv::empty(), f, ty)?;
    let mut explored = 0;
    for size in 1..=bounds.ctx_size {
        let ctxs = cache.of_size(ty, size);
        let found = ctxs
            .par_iter()
            .map(|c| -> Result<Option<CtxWitness>, OracleError> {
                let lhs = eval_fuel(monad, &c.plug(e), bounds.fuel)?.obs();
                let rhs = eval_fuel(monad, &c.plug(f), bounds.fuel)?.obs();
                Ok((lhs != rhs).then(|| CtxWitness { context: c.clone(), lhs, rhs }))
            })
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            });
        match found {
            Some(Ok(Some(w))) => {
                explored += ctxs.iter().position(|c| *c == w.context).expect("witness is enumerated") + 1;
                return Ok(CtxReport { verdict: Verdict::Distinguished, bounds, witness: Some(w), explored });
            }
            Some(Err(err)) => return Err(err),
            _ => explored += ctxs.len(),
        }
    }
    Ok(CtxReport { verdict: Verdict::EquivalentUpToBounds, bounds, witness: None, explored })
}

/// A pair of closed computations of one type.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub lhs: Term,
    pub rhs: Term,
    pub ty: Type,
}

#[derive(Clone, Debug)]
pub struct PairOutcome {
    pub pair: Pair,
    pub trace: TraceReport,
    pub ctx: CtxReport,
}

#[derive(Clone, Debug)]
pub struct CrossReport {
    pub outcomes: Vec<PairOutcome>,
    /// Trace-equivalent up to bounds, yet distinguished by a context.
    pub violations: Vec<usize>,
    /// Distinguished by traces, but no context within the bound tells them
    /// apart. Expected when the context bound is small.
    pub ctx_incomplete: Vec<usize>,
}

impl CrossReport {
    pub fn count(&self, trace: Verdict, ctx: Verdict) -> usize {
        self.outcomes.iter().filter(|o| o.trace.verdict == trace && o.ctx.verdict == ctx).count()
    }

    pub fn to_json(&self) -> Json {
        use Verdict::*;
        json!({
            "pairs": self.outcomes.len(),
            "violations": self.violations.iter().map(|&i| pair_json(&self.outcomes[i])).collect::<Vec<_>>(),
            "ctx_incomplete": self.ctx_incomplete.len(),
            "both_equivalent": self.count(EquivalentUpToBounds, EquivalentUpToBounds),
            "both_distinguished": self.count(Distinguished, Distinguished),
        })
    }
}

fn pair_json(o: &PairOutcome) -> Json {
    json!({
        "lhs": o.pair.lhs.to_string(),
        "rhs": o.pair.rhs.to_string(),
        "type": o.pair.ty.to_string(),
        "trace": o.trace.to_json(),
        "ctx": o.ctx.to_json(),
    })
}

/// Run both checkers on every pair with the same fuel.
pub fn cross_check(
    monad: Monad,
    corpus: &[Pair],
    trace_bounds: TraceBounds,
    ctx_bounds: CtxBounds,
) -> Result<CrossReport, OracleError> {
    assert_eq!(trace_bounds.fuel, ctx_bounds.fuel, "both checkers must use the same fuel");
    let mut cache = ContextCache::new(monad);
    let mut outcomes = Vec::with_capacity(corpus.len());
    for p in corpus {
        let trace = trace_equiv_comps(monad, &p.lhs, &p.ty, &p.rhs, &p.ty, trace_bounds)?;
        let ctx = ctx_equiv_cached(&mut cache, monad, &p.lhs, &p.rhs, &p.ty, ctx_bounds)?;
        outcomes.push(PairOutcome { pair: p.clone(), trace, ctx });
    }
    let pick = |t: Verdict, c: Verdict| {
        outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.trace.verdict == t && o.ctx.verdict == c)
            .map(|(i, _)| i)
            .collect::<Vec<_>>()
    };
    let violations = pick(Verdict::EquivalentUpToBounds, Verdict::Distinguished);
    let ctx_incomplete = pick(Verdict::Distinguished, Verdict::EquivalentUpToBounds);
    Ok(CrossReport { outcomes, violations, ctx_incomplete })
}

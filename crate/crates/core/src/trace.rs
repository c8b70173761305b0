//! Traces, the trace functional and bounded trace equivalence.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::lang::{Term, Type};
use crate::monad::{Monad, MonadVal, Observation};
use crate::rts::{b, check_config, enabled_actions, step, Action, ConfigType, Configuration, RtsError};

pub type Trace = Vec<Action>;

pub fn render_trace(t: &[Action]) -> String {
    if t.is_empty() {
        return "ε".into();
    }
    t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" · ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceBounds {
    pub depth: usize,
    pub ctx_size: usize,
    pub fuel: usize,
}

impl TraceBounds {
    pub fn to_json(&self) -> Json {
        json!({"depth": self.depth, "ctx_size": self.ctx_size, "fuel": self.fuel})
    }
}

/// Memoized action sets, keyed by configuration type.
pub struct ActionCache {
    monad: Monad,
    ctx_size: usize,
    table: HashMap<ConfigType, Vec<Action>>,
}

impl ActionCache {
    pub fn new(monad: Monad, ctx_size: usize) -> Self {
        ActionCache { monad, ctx_size, table: HashMap::new() }
    }

    pub fn actions(&mut self, alpha: &ConfigType) -> &[Action] {
        let (monad, ctx) = (self.monad, self.ctx_size);
        self.table.entry(alpha.clone()).or_insert_with(|| enabled_actions(alpha, ctx, monad))
    }
}

/// All traces of length at most `depth` that are coherent with `alpha`,
/// shortest first.
pub fn trace_set(alpha: &ConfigType, depth: usize, ctx_size: usize, monad: Monad) -> Vec<Trace> {
    let mut cache = ActionCache::new(monad, ctx_size);
    let mut out = vec![Vec::new()];
    let mut level: Vec<(Trace, ConfigType)> = vec![(Vec::new(), alpha.clone())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (t, ty) in &level {
            for a in cache.actions(ty).to_vec() {
                let beta = b(ty, &a).expect("enabled actions have successors");
                let mut u = t.clone();
                u.push(a);
                next.push((u, beta));
            }
        }
        out.extend(next.iter().map(|(t, _)| t.clone()));
        level = next;
    }
    out
}

/// `st(K, t)`, straight from the definition.
pub fn st(monad: Monad, k: &Configuration, t: &[Action], fuel: usize) -> Result<Observation, RtsError> {
    match t.split_first() {
        None => Ok(MonadVal::unit(monad, ())),
        Some((a, rest)) => step(monad, k, a, fuel)?.try_bind(|l| st(monad, l, rest, fuel)),
    }
}

/// One step of the determinized system.
pub fn step_star(
    kappa: &MonadVal<Configuration>,
    a: &Action,
    fuel: usize,
) -> Result<MonadVal<Configuration>, RtsError> {
    let monad = kappa.monad();
    kappa.try_bind(|k| step(monad, k, a, fuel))
}

pub fn st_star(kappa: &MonadVal<Configuration>, t: &[Action], fuel: usize) -> Result<Observation, RtsError> {
    let mut kappa = kappa.clone();
    for a in t {
        kappa = step_star(&kappa, a, fuel)?;
    }
    Ok(kappa.obs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    EquivalentUpToBounds,
    Distinguished,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::EquivalentUpToBounds => "equivalent-up-to-bounds",
            Verdict::Distinguished => "distinguished",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceWitness {
    /// The two configurations have different types, so their trace sets differ.
    Types { lhs: ConfigType, rhs: ConfigType },
    Trace { trace: Trace, lhs: Observation, rhs: Observation },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub verdict: Verdict,
    pub bounds: TraceBounds,
    pub witness: Option<TraceWitness>,
    /// Number of trace prefixes whose observations were compared.
    pub explored: usize,
}

impl TraceReport {
    pub fn to_json(&self) -> Json {
        let witness = match &self.witness {
            None => Json::Null,
            Some(TraceWitness::Types { lhs, rhs }) => {
                json!({"trace": [], "lhs_type": lhs.to_string(), "rhs_type": rhs.to_string()})
            }
            Some(TraceWitness::Trace { trace, lhs, rhs }) => json!({
                "trace": trace.iter().map(Action::to_json).collect::<Vec<_>>(),
                "lhs_obs": lhs.to_json_obs(),
                "rhs_obs": rhs.to_json_obs(),
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

struct Node {
    trace: Trace,
    ty: ConfigType,
    lhs: MonadVal<Configuration>,
    rhs: MonadVal<Configuration>,
}

/// Compare `st(K, t)` and `st(L, t)` for every trace up to the bounds,
/// breadth first. The first difference in that order is the witness.
///
/// Subtrees where both sides are equal elements of `T(Conf)` are skipped:
/// every extension yields equal observations there.
pub fn trace_equiv(
    monad: Monad,
    k: &Configuration,
    alpha: &ConfigType,
    l: &Configuration,
    beta: &ConfigType,
    bounds: TraceBounds,
) -> Result<TraceReport, RtsError> {
    check_config(k, alpha)?;
    check_config(l, beta)?;
    let report = |witness: Option<TraceWitness>, explored| TraceReport {
        verdict: if witness.is_some() { Verdict::Distinguished } else { Verdict::EquivalentUpToBounds },
        bounds,
        witness,
        explored,
    };
    if !alpha.type_eq(beta) {
        return Ok(report(Some(TraceWitness::Types { lhs: alpha.clone(), rhs: beta.clone() }), 0));
    }
    let mut cache = ActionCache::new(monad, bounds.ctx_size);
    let mut level = vec![Node {
        trace: Vec::new(),
        ty: alpha.clone(),
        lhs: MonadVal::unit(monad, k.canonical()),
        rhs: MonadVal::unit(monad, l.canonical()),
    }];
    let mut explored = 1;
    for _ in 0..bounds.depth {
        let mut tasks = Vec::new();
        for (n, node) in level.iter().enumerate() {
            if node.lhs == node.rhs {
                continue;
            }
            for a in cache.actions(&node.ty) {
                tasks.push((n, a.clone()));
            }
        }
        let next: Vec<Node> = tasks
            .into_par_iter()
            .map(|(n, a)| {
                let parent = &level[n];
                let lhs = step_star(&parent.lhs, &a, bounds.fuel)?;
                let rhs = step_star(&parent.rhs, &a, bounds.fuel)?;
                let ty = b(&parent.ty, &a).expect("enabled actions have successors");
                let mut trace = parent.trace.clone();
                trace.push(a);
                Ok(Node { trace, ty, lhs, rhs })
            })
            .collect::<Result<_, RtsError>>()?;
        explored += next.len();
        if let Some(node) = next.iter().find(|n| n.lhs.obs() != n.rhs.obs()) {
            // replay from the definition of st
            let lhs = st(monad, k, &node.trace, bounds.fuel)?;
            let rhs = st(monad, l, &node.trace, bounds.fuel)?;
            return Ok(report(Some(TraceWitness::Trace { trace: node.trace.clone(), lhs, rhs }), explored));
        }
        level = next;
    }
    Ok(report(None, explored))
}

/// Trace equivalence of two closed computations at declared types.
pub fn trace_equiv_comps(
    monad: Monad,
    e: &Term,
    sigma: &Type,
    f: &Term,
    tau: &Type,
    bounds: TraceBounds,
) -> Result<TraceReport, RtsError> {
    trace_equiv(
        monad,
        &Configuration::of_comp(e.clone()),
        &ConfigType::of_comp(sigma.clone()),
        &Configuration::of_comp(f.clone()),
        &ConfigType::of_comp(tau.clone()),
        bounds,
    )
}

//! The resource transition system: configurations, their types, actions and
//! the monadic transition function.
//!
//! Indices are 1-based throughout. In an application action, `l` indexes the
//! full linear sequence and `j` indexes it after position `l` is removed.

use std::fmt;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::eval::{eval_fuel, EvalError};
use crate::lang::enumerate::Generator;
use crate::lang::{infer, name, type_eq, typecheck_value, Class, Term, Type, TypeEnv, TypeError};
use crate::monad::{Monad, MonadVal};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RtsError {
    #[error("index {index} is out of range for a sequence of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("index sequence {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),
    #[error("action `{0}` is not enabled")]
    NotEnabled(String),
    #[error("ill-typed configuration: {0}")]
    IllTyped(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn check_indices(idx: &[usize], len: usize) -> Result<(), RtsError> {
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RtsError::NotIncreasing(idx.to_vec()));
    }
    match idx.iter().find(|&&i| i == 0 || i > len) {
        Some(&index) => Err(RtsError::OutOfRange { index, len }),
        None => Ok(()),
    }
}

/// `S[s]_i`: insert `s` so that it ends up at position `i`.
pub fn seq_insert<T: Clone>(s: &[T], x: T, i: usize) -> Result<Vec<T>, RtsError> {
    if i == 0 || i > s.len() + 1 {
        return Err(RtsError::OutOfRange { index: i, len: s.len() + 1 });
    }
    let mut out = s.to_vec();
    out.insert(i - 1, x);
    Ok(out)
}

/// `S ⊖ c`: drop the given positions.
pub fn seq_remove<T: Clone>(s: &[T], idx: &[usize]) -> Result<Vec<T>, RtsError> {
    check_indices(idx, s.len())?;
    Ok(s.iter().enumerate().filter(|(k, _)| !idx.contains(&(k + 1))).map(|(_, x)| x.clone()).collect())
}

/// `S_c`: keep the given positions, in order.
pub fn seq_select<T: Clone>(s: &[T], idx: &[usize]) -> Result<Vec<T>, RtsError> {
    check_indices(idx, s.len())?;
    Ok(idx.iter().map(|&i| s[i - 1].clone()).collect())
}

/// `<gamma | theta>` or `<gamma | theta ; tail>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    /// Closed computations that may be copied.
    pub gamma: Vec<Term>,
    /// Closed values, each usable once.
    pub theta: Vec<Term>,
    /// The computation under evaluation, if any.
    pub tail: Option<Term>,
}

impl Configuration {
    /// `<· | · ; e>`.
    pub fn of_comp(e: Term) -> Self {
        Configuration { gamma: vec![], theta: vec![], tail: Some(e) }
    }

    pub fn canonical(&self) -> Self {
        Configuration {
            gamma: self.gamma.iter().map(Term::canonical).collect(),
            theta: self.theta.iter().map(Term::canonical).collect(),
            tail: self.tail.as_ref().map(Term::canonical),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gamma.iter().map(|t| t.to_string()).collect();
        let d: Vec<String> = self.theta.iter().map(|t| t.to_string()).collect();
        write!(f, "<{} | {}", g.join(", "), d.join(", "))?;
        if let Some(e) = &self.tail {
            write!(f, " ; {e}")?;
        }
        write!(f, ">")
    }
}

/// The type of a configuration. A `Some` tail marks a computation state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigType {
    pub gamma: Vec<Type>,
    pub theta: Vec<Type>,
    pub tail: Option<Type>,
}

impl ConfigType {
    pub fn of_comp(ty: Type) -> Self {
        ConfigType { gamma: vec![], theta: vec![], tail: Some(ty) }
    }

    /// Componentwise equi-recursive equality.
    pub fn type_eq(&self, other: &ConfigType) -> bool {
        let all = |a: &[Type], b: &[Type]| a.len() == b.len() && a.iter().zip(b).all(|(s, t)| type_eq(s, t));
        all(&self.gamma, &other.gamma)
            && all(&self.theta, &other.theta)
            && match (&self.tail, &other.tail) {
                (None, None) => true,
                (Some(s), Some(t)) => type_eq(s, t),
                _ => false,
            }
    }
}

impl fmt::Display for ConfigType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gamma.iter().map(|t| t.to_string()).collect();
        let d: Vec<String> = self.theta.iter().map(|t| t.to_string()).collect();
        write!(f, "<{} | {}", g.join(", "), d.join(", "))?;
        if let Some(t) = &self.tail {
            write!(f, " ; {t}")?;
        }
        write!(f, ">")
    }
}

/// Infer the type of a configuration. Parts of a component's type that are
/// left unconstrained become the rigid variable `X`; use [`check_config`]
/// when the intended type is known.
pub fn config_type(k: &Configuration) -> Result<ConfigType, RtsError> {
    let inf = |t: &Term| infer(&TypeEnv::empty(), t, "X");
    Ok(ConfigType {
        gamma: k.gamma.iter().map(inf).collect::<Result<_, _>>()?,
        theta: k.theta.iter().map(inf).collect::<Result<_, _>>()?,
        tail: k.tail.as_ref().map(inf).transpose()?,
    })
}

/// Check that `k` has type `alpha`.
pub fn check_config(k: &Configuration, alpha: &ConfigType) -> Result<(), RtsError> {
    let env = TypeEnv::empty();
    if k.gamma.len() != alpha.gamma.len()
        || k.theta.len() != alpha.theta.len()
        || k.tail.is_some() != alpha.tail.is_some()
    {
        return Err(RtsError::IllTyped(TypeError::Mismatch {
            expected: alpha.to_string(),
            found: k.to_string(),
        }));
    }
    for (e, t) in k.gamma.iter().zip(&alpha.gamma) {
        crate::lang::typecheck_comp(&env, e, t)?;
    }
    for (v, t) in k.theta.iter().zip(&alpha.theta) {
        typecheck_value(&env, v, t)?;
    }
    if let (Some(e), Some(t)) = (&k.tail, &alpha.tail) {
        crate::lang::typecheck_comp(&env, e, t)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Eval,
    /// `?l`: open the bang at linear position `l`.
    Unbang(usize),
    /// `!l`: run a copy of the non-linear resource at position `l`.
    Dup(usize),
    /// Apply the abstraction at linear position `l` to the value context
    /// `t`, whose variables `a1..an` stand for `gamma_i` and `x1..xm` for
    /// `(theta ⊖ l)_j`.
    App { i: Vec<usize>, j: Vec<usize>, l: usize, t: Term },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Eval => write!(f, "eval"),
            Action::Unbang(l) => write!(f, "?{l}"),
            Action::Dup(l) => write!(f, "!{l}"),
            Action::App { i, j, l, t } => write!(f, "app(i={i:?},j={j:?},l={l},t={t})"),
        }
    }
}

impl Action {
    pub fn to_json(&self) -> Json {
        json!(self.to_string())
    }
}

fn ctx_var(stem: &str, k: usize) -> crate::lang::Name {
    name(&format!("{stem}{k}"))
}

/// The environment under which an application context is typed.
fn app_env(gamma: &[Type], rest: &[Type], i: &[usize], j: &[usize]) -> Result<TypeEnv, RtsError> {
    let mut env = TypeEnv::empty();
    for (k, ty) in seq_select(gamma, i)?.into_iter().enumerate() {
        env.nonlinear.push((ctx_var("a", k + 1), ty));
    }
    for (k, ty) in seq_select(rest, j)?.into_iter().enumerate() {
        env.linear.push((ctx_var("x", k + 1), ty));
    }
    Ok(env)
}

/// The successor type of `alpha` under `action`, if the action is enabled.
pub fn b(alpha: &ConfigType, action: &Action) -> Option<ConfigType> {
    match action {
        Action::Eval => {
            let tail = alpha.tail.clone()?;
            let mut theta = alpha.theta.clone();
            theta.push(tail);
            Some(ConfigType { gamma: alpha.gamma.clone(), theta, tail: None })
        }
        _ if alpha.tail.is_some() => None,
        Action::Unbang(l) => {
            let inner = alpha.theta.get(l.checked_sub(1)?)?.as_bang()?;
            let mut gamma = alpha.gamma.clone();
            gamma.push(inner);
            Some(ConfigType { gamma, theta: seq_remove(&alpha.theta, &[*l]).ok()?, tail: None })
        }
        Action::Dup(l) => {
            let ty = alpha.gamma.get(l.checked_sub(1)?)?.clone();
            Some(ConfigType { gamma: alpha.gamma.clone(), theta: alpha.theta.clone(), tail: Some(ty) })
        }
        Action::App { i, j, l, t } => {
            let (arg, res) = alpha.theta.get(l.checked_sub(1)?)?.as_lolli()?;
            let rest = seq_remove(&alpha.theta, &[*l]).ok()?;
            let env = app_env(&alpha.gamma, &rest, i, j).ok()?;
            if !t.is_value() || typecheck_value(&env, t, &arg).is_err() {
                return None;
            }
            Some(ConfigType { gamma: alpha.gamma.clone(), theta: seq_remove(&rest, j).ok()?, tail: Some(res) })
        }
    }
}

/// One transition. Only the shape of the configuration is checked; the
/// caller is responsible for the action being enabled at its type.
pub fn step(monad: Monad, k: &Configuration, action: &Action, fuel: usize) -> Result<MonadVal<Configuration>, RtsError> {
    let not_enabled = || RtsError::NotEnabled(action.to_string());
    match action {
        Action::Eval => {
            let e = k.tail.as_ref().ok_or_else(not_enabled)?;
            Ok(eval_fuel(monad, e, fuel)?.map(|v| {
                let mut theta = k.theta.clone();
                theta.push(v.clone());
                Configuration { gamma: k.gamma.clone(), theta, tail: None }
            }))
        }
        _ if k.tail.is_some() => Err(not_enabled()),
        Action::Unbang(l) => match k.theta.get(l.wrapping_sub(1)) {
            Some(Term::Bang(e)) => {
                let mut gamma = k.gamma.clone();
                gamma.push(e.canonical());
                let theta = seq_remove(&k.theta, &[*l])?;
                Ok(MonadVal::unit(monad, Configuration { gamma, theta, tail: None }))
            }
            _ => Err(not_enabled()),
        },
        Action::Dup(l) => {
            let e = k.gamma.get(l.wrapping_sub(1)).ok_or_else(not_enabled)?;
            Ok(MonadVal::unit(
                monad,
                Configuration { gamma: k.gamma.clone(), theta: k.theta.clone(), tail: Some(e.clone()) },
            ))
        }
        Action::App { i, j, l, t } => match k.theta.get(l.wrapping_sub(1)) {
            Some(Term::Abs(x, f)) => {
                let rest = seq_remove(&k.theta, &[*l])?;
                let mut arg = t.clone();
                for (n, e) in seq_select(&k.gamma, i)?.iter().enumerate() {
                    arg = arg.subst_comp(&ctx_var("a", n + 1), e);
                }
                for (n, v) in seq_select(&rest, j)?.iter().enumerate() {
                    arg = arg.subst_value(&ctx_var("x", n + 1), v);
                }
                let tail = f.subst_value(x, &arg).canonical();
                let theta = seq_remove(&rest, j)?;
                Ok(MonadVal::unit(monad, Configuration { gamma: k.gamma.clone(), theta, tail: Some(tail) }))
            }
            _ => Err(not_enabled()),
        },
    }
}

/// Strictly increasing subsequences of `1..=n`, shortest first.
fn index_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u64..1 << n)
        .map(|m| (1..=n).filter(|&k| m & (1 << (k - 1)) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every action enabled at `alpha`, with application contexts of at most
/// `ctx_size` nodes. The order is: eval, unbangs, duplications, then
/// applications by position, linear selection and context.
pub fn enabled_actions(alpha: &ConfigType, ctx_size: usize, monad: Monad) -> Vec<Action> {
    if alpha.tail.is_some() {
        return vec![Action::Eval];
    }
    let mut out = Vec::new();
    for (k, ty) in alpha.theta.iter().enumerate() {
        if ty.as_bang().is_some() {
            out.push(Action::Unbang(k + 1));
        }
    }
    out.extend((1..=alpha.gamma.len()).map(Action::Dup));
    if ctx_size == 0 {
        return out;
    }
    let mut gen = Generator::new(&monad.enum_ops());
    for (k, ty) in alpha.theta.iter().enumerate() {
        let Some((arg, _)) = ty.as_lolli() else { continue };
        let l = k + 1;
        let rest = seq_remove(&alpha.theta, &[l]).expect("l in range");
        let all: Vec<usize> = (1..=alpha.gamma.len()).collect();
        for j in index_subsets(rest.len()) {
            let env = app_env(&alpha.gamma, &rest, &all, &j).expect("valid indices");
            for size in 1..=ctx_size {
                for t in gen.exact(&env, None, Class::Value, Some(&arg), size) {
                    let used = t.free_nonlin_vars();
                    let i: Vec<usize> = all.iter().copied().filter(|&g| used.contains(&ctx_var("a", g))).collect();
                    let mut t = t;
                    for (n, &g) in i.iter().enumerate() {
                        if n + 1 != g {
                            t = t.subst_comp(&ctx_var("a", g), &Term::NonLinVar(ctx_var("a", n + 1)));
                        }
                    }
                    out.push(Action::App { i, j: j.clone(), l, t });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::term::*;
    use crate::lang::types::*;
    use crate::prelude::identity;
    use num_rational::BigRational;

    fn sigma() -> Type {
        lolli(tvar("X"), tvar("X"))
    }

    #[test]
    fn sequences() {
        assert_eq!(seq_insert(&['a', 'b'], 'x', 1).unwrap(), vec!['x', 'a', 'b']);
        assert_eq!(seq_remove(&['a', 'b', 'c'], &[1, 3]).unwrap(), vec!['b']);
        assert_eq!(seq_select(&['a', 'b', 'c'], &[1, 3]).unwrap(), vec!['a', 'c']);
        let s = ['a', 'b', 'c'];
        for i in 1..=4 {
            let ins = seq_insert(&s, 'x', i).unwrap();
            assert_eq!(seq_remove(&ins, &[i]).unwrap(), s.to_vec());
        }
        assert!(seq_remove(&s, &[2, 1]).is_err());
        assert!(seq_select(&s, &[4]).is_err());
    }

    #[test]
    fn configuration_types() {
        let id = identity();
        let k = Configuration::of_comp(ret(id.clone()));
        assert_eq!(check_config(&k, &ConfigType::of_comp(sigma())), Ok(()));
        let k = Configuration { gamma: vec![ret(id.clone())], theta: vec![id.clone()], tail: None };
        let alpha = ConfigType { gamma: vec![sigma()], theta: vec![sigma()], tail: None };
        assert_eq!(check_config(&k, &alpha), Ok(()));
        let k = Configuration { gamma: vec![], theta: vec![bang(ret(id))], tail: None };
        let t = config_type(&k).unwrap();
        assert!(t.type_eq(&ConfigType { gamma: vec![], theta: vec![tbang(sigma())], tail: None }));
    }

    #[test]
    fn successor_types() {
        let tau = sigma();
        assert_eq!(
            b(&ConfigType::of_comp(tau.clone()), &Action::Eval),
            Some(ConfigType { gamma: vec![], theta: vec![tau.clone()], tail: None })
        );
        let bang_state = ConfigType { gamma: vec![], theta: vec![tbang(tau.clone())], tail: None };
        assert_eq!(
            b(&bang_state, &Action::Unbang(1)),
            Some(ConfigType { gamma: vec![tau.clone()], theta: vec![], tail: None })
        );
        assert_eq!(b(&bang_state, &Action::Eval), None);
    }

    #[test]
    fn enabled_action_sets() {
        let tau = sigma();
        assert_eq!(enabled_actions(&ConfigType::of_comp(tau.clone()), 3, Monad::Dist), vec![Action::Eval]);
        let bang_state = ConfigType { gamma: vec![], theta: vec![tbang(tau.clone())], tail: None };
        assert_eq!(enabled_actions(&bang_state, 3, Monad::Dist), vec![Action::Unbang(1)]);
        let arrow = ConfigType { gamma: vec![], theta: vec![lolli(tau.clone(), tau.clone())], tail: None };
        let acts = enabled_actions(&arrow, 3, Monad::Dist);
        assert_eq!(acts.len(), 1);
        assert!(matches!(&acts[0], Action::App { i, j, l: 1, t } if i.is_empty() && j.is_empty() && t.alpha_eq(&identity())));
    }

    #[test]
    fn transitions() {
        let id = identity().canonical();
        let unbang = Configuration { gamma: vec![], theta: vec![id.clone(), bang(ret(id.clone()))], tail: None };
        let r = step(Monad::Maybe, &unbang, &Action::Unbang(2), 5).unwrap();
        assert_eq!(r, MonadVal::Maybe(Some(Configuration { gamma: vec![ret(id.clone())], theta: vec![id.clone()], tail: None })));

        let dup = Configuration { gamma: vec![ret(id.clone())], theta: vec![], tail: None };
        let r = step(Monad::Maybe, &dup, &Action::Dup(1), 5).unwrap();
        assert_eq!(r, MonadVal::Maybe(Some(Configuration { tail: Some(ret(id.clone())), ..dup })));

        let u = abs("u", ret(lvar("u"))).canonical();
        let w = abs("w", ret(abs("q", ret(lvar("q"))))).canonical();
        let choice = Configuration::of_comp(op(OpSym::Choice, vec![ret(u.clone()), ret(w.clone())]));
        let r = step(Monad::Dist, &choice, &Action::Eval, 5).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let at = |v: &Term| Configuration { gamma: vec![], theta: vec![v.clone()], tail: None };
        assert_eq!(r, MonadVal::dist([(at(&u), half.clone()), (at(&w), half)]));
    }

    #[test]
    fn application_uses_resources() {
        // <ret id | \f. f x0 , id>  applied with t = x1 : the remaining id
        let id = identity();
        let fun = abs("f", app(lvar("f"), abs("z", ret(lvar("z")))));
        let k = Configuration { gamma: vec![ret(id.clone())], theta: vec![fun, id.clone()], tail: None };
        let act = Action::App { i: vec![], j: vec![1], l: 1, t: lvar("x1") };
        let alpha = ConfigType {
            gamma: vec![sigma()],
            theta: vec![lolli(sigma(), sigma()), sigma()],
            tail: None,
        };
        let beta = b(&alpha, &act).unwrap();
        assert_eq!(beta, ConfigType { gamma: vec![sigma()], theta: vec![], tail: Some(sigma()) });
        let r = step(Monad::Maybe, &k, &act, 5).unwrap();
        let MonadVal::Maybe(Some(next)) = r else { panic!() };
        assert_eq!(check_config(&next, &beta), Ok(()));
        assert!(next.theta.is_empty());
    }
}

//! Exhaustive, size-ordered enumeration of well-typed terms and contexts.
//!
//! Terms are built top-down. Every subterm is given the exact set of linear
//! variables it must consume, so linearity holds by construction, and every
//! candidate is checked against its expected type by unification before it
//! is combined further. Binder types that are not yet known are wildcards.
//! Binder names are a function of the scope, so two outputs are never
//! alpha-equivalent unless they are identical.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::term::{name, Class, Name, OpSym, Term};
use super::typeck::{Checker, TypeEnv, WILDCARD};
use super::types::{tvar, Type};

fn wild() -> Type {
    tvar(WILDCARD)
}

fn is_wild(t: &Type) -> bool {
    matches!(t, Type::Var(x) if &**x == WILDCARD)
}

const HOLE: &str = "[-]";

#[derive(Clone)]
struct Scope {
    nonlin: Vec<(Name, Type)>,
    lin: Vec<(Name, Type)>,
}

impl Scope {
    fn names(&self) -> impl Iterator<Item = &Name> {
        self.nonlin.iter().chain(&self.lin).map(|(n, _)| n)
    }

    fn fresh(&self, stem: &str, start: usize) -> Name {
        (start..)
            .map(|k| name(&format!("{stem}{k}")))
            .find(|n| self.names().all(|m| m != n))
            .expect("infinite supply of names")
    }

    fn key(&self) -> String {
        let nl: Vec<String> = self.nonlin.iter().map(|(n, t)| format!("{n}:{t}")).collect();
        let l: Vec<String> = self.lin.iter().map(|(n, t)| format!("{n}:{t}")).collect();
        format!("{}|{}", nl.join(","), l.join(","))
    }
}

/// A memoizing term generator. One generator serves any number of queries
/// over the same operation set.
pub struct Generator {
    ops: Vec<OpSym>,
    memo: HashMap<String, Rc<Vec<Term>>>,
}

fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sub = mask;
    loop {
        out.push(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    out.reverse();
    out
}

impl Generator {
    pub fn new(ops: &[OpSym]) -> Self {
        Generator { ops: ops.to_vec(), memo: HashMap::new() }
    }

    /// Loosely check `t` in `scope` restricted to `mask`, and return its
    /// type with unknown parts as wildcards.
    fn check(&self, scope: &Scope, mask: u64, t: &Term, expect: Option<&Type>) -> Option<Type> {
        let mut env = TypeEnv { nonlinear: scope.nonlin.clone(), linear: Vec::new() };
        let mut hole = None;
        for (i, (n, ty)) in scope.lin.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if &**n == HOLE {
                    hole = Some(ty);
                } else {
                    env.linear.push((n.clone(), ty.clone()));
                }
            }
        }
        let mut c = Checker::new(&env, hole).ok()?;
        let found = if t.is_value() { c.value(t).ok()? } else { c.comp(t).ok()? };
        if let Some(ty) = expect {
            c.expect(found, ty).ok()?;
        }
        c.finish().ok()?;
        Some(c.graph.read_back(found, &name(WILDCARD)))
    }

    fn gen(&mut self, scope: &Scope, mask: u64, class: Class, expect: Option<&Type>, size: usize) -> Rc<Vec<Term>> {
        if size == 0 || (mask.count_ones() as usize) > size {
            return Rc::new(Vec::new());
        }
        let expect = expect.filter(|t| !is_wild(t));
        let key = format!(
            "{class:?}|{size}|{mask}|{}|{}",
            expect.map(|t| t.to_string()).unwrap_or_default(),
            scope.key()
        );
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let out = Rc::new(match class {
            Class::Value => self.gen_value(scope, mask, expect, size),
            Class::Computation => self.gen_comp(scope, mask, expect, size),
        });
        self.memo.insert(key, out.clone());
        out
    }

    fn keep(&self, scope: &Scope, mask: u64, t: Term, expect: Option<&Type>, out: &mut Vec<Term>) {
        if self.check(scope, mask, &t, expect).is_some() {
            out.push(t);
        }
    }

    fn gen_value(&mut self, scope: &Scope, mask: u64, expect: Option<&Type>, size: usize) -> Vec<Term> {
        let mut out = Vec::new();
        if size == 1 && mask.count_ones() == 1 {
            let i = mask.trailing_zeros() as usize;
            let (n, _) = &scope.lin[i];
            if &**n != HOLE {
                self.keep(scope, mask, Term::LinVar(n.clone()), expect, &mut out);
            }
        }
        if size >= 2 {
            let (arg, res) = match expect {
                None => (Some(wild()), None),
                Some(t) => match t.as_lolli() {
                    Some((a, b)) => (Some(a), Some(b)),
                    None => (None, None),
                },
            };
            if let Some(arg) = arg {
                let x = scope.fresh("x", scope.lin.len() + 1);
                let mut inner = scope.clone();
                inner.lin.push((x.clone(), arg));
                let bit = 1 << (inner.lin.len() - 1);
                for body in self.gen(&inner, mask | bit, Class::Computation, res.as_ref(), size - 1).iter() {
                    self.keep(scope, mask, Term::Abs(x.clone(), Box::new(body.clone())), expect, &mut out);
                }
            }
            if mask == 0 {
                let inner_ty = match expect {
                    None => Some(None),
                    Some(t) => t.as_bang().map(Some),
                };
                if let Some(inner_ty) = inner_ty {
                    for body in self.gen(scope, 0, Class::Computation, inner_ty.as_ref(), size - 1).iter() {
                        self.keep(scope, mask, Term::Bang(Box::new(body.clone())), expect, &mut out);
                    }
                }
            }
        }
        out
    }

    fn gen_comp(&mut self, scope: &Scope, mask: u64, expect: Option<&Type>, size: usize) -> Vec<Term> {
        let mut out = Vec::new();
        if size == 1 {
            if mask == 0 {
                for (a, _) in scope.nonlin.iter().rev() {
                    // shadowed names are unreachable
                    if scope.nonlin.iter().filter(|(b, _)| b == a).count() == 1 {
                        self.keep(scope, 0, Term::NonLinVar(a.clone()), expect, &mut out);
                    }
                }
                out.sort();
            }
            if mask.count_ones() == 1 && &*scope.lin[mask.trailing_zeros() as usize].0 == HOLE {
                self.keep(scope, mask, Term::Hole, expect, &mut out);
            }
            return out;
        }
        // return v
        for v in self.gen(scope, mask, Class::Value, expect, size - 1).iter() {
            out.push(Term::Return(Box::new(v.clone())));
        }
        // v w
        for s1 in 1..size - 1 {
            let s2 = size - 1 - s1;
            for m1 in submasks(mask) {
                let m2 = mask & !m1;
                let fun_ty = Type::Lolli(Box::new(wild()), Box::new(expect.cloned().unwrap_or_else(wild)));
                let funs = self.gen(scope, m1, Class::Value, Some(&fun_ty), s1);
                let groups = self.group_by_type(scope, m1, &funs, |t| t.as_lolli().map(|(a, _)| a));
                for (arg_ty, fs) in groups {
                    let args = self.gen(scope, m2, Class::Value, Some(&arg_ty), s2);
                    for f in &fs {
                        for a in args.iter() {
                            let t = Term::App(Box::new(f.clone()), Box::new(a.clone()));
                            self.keep(scope, mask, t, expect, &mut out);
                        }
                    }
                }
            }
        }
        // let x = e in f
        for s1 in 1..size - 1 {
            let s2 = size - 1 - s1;
            for m1 in submasks(mask) {
                let m2 = mask & !m1;
                let firsts = self.gen(scope, m1, Class::Computation, None, s1);
                let groups = self.group_by_type(scope, m1, &firsts, |t| Some(t.clone()));
                let x = scope.fresh("x", scope.lin.len() + 1);
                for (ty, es) in groups {
                    let mut inner = scope.clone();
                    inner.lin.push((x.clone(), ty));
                    let bit = 1 << (inner.lin.len() - 1);
                    let bodies = self.gen(&inner, m2 | bit, Class::Computation, expect, s2);
                    for e in &es {
                        for f in bodies.iter() {
                            let t = Term::Seq(Box::new(e.clone()), x.clone(), Box::new(f.clone()));
                            self.keep(scope, mask, t, expect, &mut out);
                        }
                    }
                }
            }
        }
        // let !a = v in f
        for s1 in 1..size - 1 {
            let s2 = size - 1 - s1;
            for m1 in submasks(mask) {
                let m2 = mask & !m1;
                let bang_ty = Type::Bang(Box::new(wild()));
                let firsts = self.gen(scope, m1, Class::Value, Some(&bang_ty), s1);
                let groups = self.group_by_type(scope, m1, &firsts, |t| {
                    if is_wild(t) { Some(wild()) } else { t.as_bang() }
                });
                let a = scope.fresh("a", scope.nonlin.len() + 1);
                for (ty, vs) in groups {
                    let mut inner = scope.clone();
                    inner.nonlin.push((a.clone(), ty));
                    let bodies = self.gen(&inner, m2, Class::Computation, expect, s2);
                    for v in &vs {
                        for f in bodies.iter() {
                            let t = Term::CoSeq(Box::new(v.clone()), a.clone(), Box::new(f.clone()));
                            self.keep(scope, mask, t, expect, &mut out);
                        }
                    }
                }
            }
        }
        // operations; every argument consumes the same linear variables, so
        // only a unary operation can hold the single hole
        let holds_hole = scope.lin.iter().enumerate().any(|(i, (n, _))| &**n == HOLE && mask & (1 << i) != 0);
        let ops: Vec<OpSym> = self.ops.iter().copied().filter(|o| !holds_hole || o.arity() == 1).collect();
        for sym in ops {
            for sizes in compositions(size - 1, sym.arity()) {
                let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
                for s in sizes {
                    let args = self.gen(scope, mask, Class::Computation, expect, s);
                    partial = partial
                        .into_iter()
                        .flat_map(|p| {
                            args.iter().map(move |a| {
                                let mut p = p.clone();
                                p.push(a.clone());
                                p
                            })
                        })
                        .collect();
                }
                for args in partial {
                    self.keep(scope, mask, Term::Op(sym, args), expect, &mut out);
                }
            }
        }
        out
    }

    /// Group terms by a type derived from their own type, in first-seen order.
    fn group_by_type(
        &self,
        scope: &Scope,
        mask: u64,
        terms: &[Term],
        derive: impl Fn(&Type) -> Option<Type>,
    ) -> Vec<(Type, Vec<Term>)> {
        let mut index: BTreeMap<Type, usize> = BTreeMap::new();
        let mut groups: Vec<(Type, Vec<Term>)> = Vec::new();
        for t in terms {
            let Some(ty) = self.check(scope, mask, t, None).and_then(|ty| derive(&ty)) else {
                continue;
            };
            match index.get(&ty) {
                Some(&i) => groups[i].1.push(t.clone()),
                None => {
                    index.insert(ty.clone(), groups.len());
                    groups.push((ty, vec![t.clone()]));
                }
            }
        }
        groups
    }

    /// Terms of exactly `size` nodes of the given class, well-typed at `ty`
    /// under `env`, using every linear variable of `env` exactly once. With
    /// `hole`, the result is a context using a hole of that type once.
    pub fn exact(
        &mut self,
        env: &TypeEnv,
        hole: Option<&Type>,
        class: Class,
        ty: Option<&Type>,
        size: usize,
    ) -> Vec<Term> {
        let mut scope = Scope { nonlin: env.nonlinear.clone(), lin: env.linear.clone() };
        if let Some(h) = hole {
            scope.lin.push((name(HOLE), h.clone()));
        }
        assert!(scope.lin.len() < 64, "too many linear variables");
        let mask = (1u64 << scope.lin.len()) - 1;
        self.gen(&scope, mask, class, ty, size).as_ref().clone()
    }
}

/// Ordered ways of writing `n` as a sum of `k` positive parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All terms of type `ty` under `env` with at most `budget` nodes: smaller
/// first, values before computations within one size.
pub fn enumerate_terms<'a>(
    env: &'a TypeEnv,
    ty: &'a Type,
    budget: usize,
    ops: &[OpSym],
) -> impl Iterator<Item = Term> + 'a {
    let mut g = Generator::new(ops);
    (1..=budget).flat_map(move |s| {
        let mut v = g.exact(env, None, Class::Value, Some(ty), s);
        v.extend(g.exact(env, None, Class::Computation, Some(ty), s));
        v
    })
}

/// Values of type `ty` with at most `budget` nodes.
pub fn enumerate_values(env: &TypeEnv, ty: &Type, budget: usize, ops: &[OpSym]) -> Vec<Term> {
    let mut g = Generator::new(ops);
    (1..=budget).flat_map(|s| g.exact(env, None, Class::Value, Some(ty), s)).collect()
}

/// Computations of type `ty` with at most `budget` nodes.
pub fn enumerate_comps(env: &TypeEnv, ty: &Type, budget: usize, ops: &[OpSym]) -> Vec<Term> {
    let mut g = Generator::new(ops);
    (1..=budget).flat_map(|s| g.exact(env, None, Class::Computation, Some(ty), s)).collect()
}

/// Closed single-hole computation contexts with at most `budget` nodes. The
/// hole stands for a computation of type `hole`; with `result` the context
/// must have that type, otherwise any type.
pub fn enumerate_contexts<'a>(
    hole: &'a Type,
    result: Option<&'a Type>,
    budget: usize,
    ops: &[OpSym],
) -> impl Iterator<Item = Term> + 'a {
    let mut g = Generator::new(ops);
    let env = TypeEnv::empty();
    (1..=budget).flat_map(move |s| g.exact(&env, Some(hole), Class::Computation, result, s))
}

//! Terms of the calculus: values and computations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Operation symbols. Which ones are available depends on the monad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpSym {
    /// Fair binary probabilistic choice.
    Choice,
    /// Unary output of one character.
    Print(char),
    /// Binary read of one boolean input: left is `true`, right is `false`.
    Read,
}

impl OpSym {
    pub fn arity(self) -> usize {
        match self {
            OpSym::Choice | OpSym::Read => 2,
            OpSym::Print(_) => 1,
        }
    }
}

impl fmt::Display for OpSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpSym::Choice => write!(f, "choice"),
            OpSym::Print(c) => write!(f, "print_{c}"),
            OpSym::Read => write!(f, "read"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Value,
    Computation,
}

/// A term. Values are `LinVar`, `Abs` and `Bang`; everything else is a
/// computation. `Hole` is the computation placeholder of a context.
///
/// The derived equality is syntactic. Use [`Term::alpha_eq`] or compare
/// [`Term::canonical`] forms for equality up to renaming of bound variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    LinVar(Name),
    Abs(Name, Box<Term>),
    Bang(Box<Term>),
    NonLinVar(Name),
    Return(Box<Term>),
    App(Box<Term>, Box<Term>),
    Seq(Box<Term>, Name, Box<Term>),
    CoSeq(Box<Term>, Name, Box<Term>),
    Op(OpSym, Vec<Term>),
    Hole,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarKind {
    Lin,
    NonLin,
}

// Smart constructors, mostly for tests and the prelude.
pub fn lvar(x: &str) -> Term {
    Term::LinVar(name(x))
}
pub fn nvar(a: &str) -> Term {
    Term::NonLinVar(name(a))
}
pub fn abs(x: &str, body: Term) -> Term {
    Term::Abs(name(x), Box::new(body))
}
pub fn bang(e: Term) -> Term {
    Term::Bang(Box::new(e))
}
pub fn ret(v: Term) -> Term {
    Term::Return(Box::new(v))
}
pub fn app(v: Term, w: Term) -> Term {
    Term::App(Box::new(v), Box::new(w))
}
pub fn seq(e: Term, x: &str, f: Term) -> Term {
    Term::Seq(Box::new(e), name(x), Box::new(f))
}
pub fn coseq(v: Term, a: &str, f: Term) -> Term {
    Term::CoSeq(Box::new(v), name(a), Box::new(f))
}
pub fn op(sym: OpSym, args: Vec<Term>) -> Term {
    Term::Op(sym, args)
}

impl Term {
    pub fn class(&self) -> Class {
        match self {
            Term::LinVar(_) | Term::Abs(..) | Term::Bang(_) => Class::Value,
            _ => Class::Computation,
        }
    }

    pub fn is_value(&self) -> bool {
        self.class() == Class::Value
    }

    /// Number of AST nodes. Variables and the hole count one each.
    pub fn size(&self) -> usize {
        match self {
            Term::LinVar(_) | Term::NonLinVar(_) | Term::Hole => 1,
            Term::Abs(_, e) | Term::Bang(e) | Term::Return(e) => 1 + e.size(),
            Term::App(v, w) => 1 + v.size() + w.size(),
            Term::Seq(e, _, f) | Term::CoSeq(e, _, f) => 1 + e.size() + f.size(),
            Term::Op(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn hole_count(&self) -> usize {
        match self {
            Term::Hole => 1,
            Term::LinVar(_) | Term::NonLinVar(_) => 0,
            Term::Abs(_, e) | Term::Bang(e) | Term::Return(e) => e.hole_count(),
            Term::App(v, w) => v.hole_count() + w.hole_count(),
            Term::Seq(e, _, f) | Term::CoSeq(e, _, f) => e.hole_count() + f.hole_count(),
            Term::Op(_, args) => args.iter().map(Term::hole_count).sum(),
        }
    }

    pub fn free_lin_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(VarKind::Lin, &mut Vec::new(), &mut out);
        out
    }

    pub fn free_nonlin_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(VarKind::NonLin, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_lin_vars().is_empty() && self.free_nonlin_vars().is_empty()
    }

    fn collect_free(&self, kind: VarKind, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::LinVar(x) => {
                if kind == VarKind::Lin && !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::NonLinVar(a) => {
                if kind == VarKind::NonLin && !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
            Term::Hole => {}
            Term::Abs(x, e) => {
                with_binder(kind == VarKind::Lin, x, bound, |b| e.collect_free(kind, b, out))
            }
            Term::Bang(e) | Term::Return(e) => e.collect_free(kind, bound, out),
            Term::App(v, w) => {
                v.collect_free(kind, bound, out);
                w.collect_free(kind, bound, out);
            }
            Term::Seq(e, x, f) => {
                e.collect_free(kind, bound, out);
                with_binder(kind == VarKind::Lin, x, bound, |b| f.collect_free(kind, b, out));
            }
            Term::CoSeq(v, a, f) => {
                v.collect_free(kind, bound, out);
                with_binder(kind == VarKind::NonLin, a, bound, |b| {
                    f.collect_free(kind, b, out)
                });
            }
            Term::Op(_, args) => args.iter().for_each(|t| t.collect_free(kind, bound, out)),
        }
    }

    /// Alpha-normal form: every binder is renamed to `x<k>` (linear) or
    /// `a<k>` (non-linear), where `k` exceeds the index of every binder in
    /// its scope. Two terms are alpha-equivalent iff their canonical forms
    /// are syntactically equal.
    pub fn canonical(&self) -> Term {
        let offset = canonical_offset(&[self]);
        self.canonical_with(offset)
    }

    fn canonical_with(&self, offset: usize) -> Term {
        let mut env = Vec::new();
        self.rename_canonical(offset, &mut env)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        let offset = canonical_offset(&[self, other]);
        self.canonical_with(offset) == other.canonical_with(offset)
    }

    fn binder_height(&self) -> usize {
        match self {
            Term::LinVar(_) | Term::NonLinVar(_) | Term::Hole => 0,
            Term::Abs(_, e) => 1 + e.binder_height(),
            Term::Bang(e) | Term::Return(e) => e.binder_height(),
            Term::App(v, w) => v.binder_height().max(w.binder_height()),
            Term::Seq(e, _, f) | Term::CoSeq(e, _, f) => {
                e.binder_height().max(1 + f.binder_height())
            }
            Term::Op(_, args) => args.iter().map(Term::binder_height).max().unwrap_or(0),
        }
    }

    fn rename_canonical(&self, offset: usize, env: &mut Vec<(VarKind, Name, Name)>) -> Term {
        let lookup = |env: &Vec<(VarKind, Name, Name)>, kind: VarKind, n: &Name| {
            env.iter()
                .rev()
                .find(|(k, from, _)| *k == kind && from == n)
                .map(|(_, _, to)| to.clone())
                .unwrap_or_else(|| n.clone())
        };
        let under = |kind: VarKind, binder: &Name, body: &Term, env: &mut Vec<_>| {
            let k = offset + 1 + body.binder_height();
            let fresh = name(&match kind {
                VarKind::Lin => format!("x{k}"),
                VarKind::NonLin => format!("a{k}"),
            });
            env.push((kind, binder.clone(), fresh.clone()));
            let body = body.rename_canonical(offset, env);
            env.pop();
            (fresh, body)
        };
        match self {
            Term::LinVar(x) => Term::LinVar(lookup(env, VarKind::Lin, x)),
            Term::NonLinVar(a) => Term::NonLinVar(lookup(env, VarKind::NonLin, a)),
            Term::Hole => Term::Hole,
            Term::Abs(x, e) => {
                let (x, e) = under(VarKind::Lin, x, e, env);
                Term::Abs(x, Box::new(e))
            }
            Term::Bang(e) => Term::Bang(Box::new(e.rename_canonical(offset, env))),
            Term::Return(v) => Term::Return(Box::new(v.rename_canonical(offset, env))),
            Term::App(v, w) => Term::App(
                Box::new(v.rename_canonical(offset, env)),
                Box::new(w.rename_canonical(offset, env)),
            ),
            Term::Seq(e, x, f) => {
                let e = e.rename_canonical(offset, env);
                let (x, f) = under(VarKind::Lin, x, f, env);
                Term::Seq(Box::new(e), x, Box::new(f))
            }
            Term::CoSeq(v, a, f) => {
                let v = v.rename_canonical(offset, env);
                let (a, f) = under(VarKind::NonLin, a, f, env);
                Term::CoSeq(Box::new(v), a, Box::new(f))
            }
            Term::Op(sym, args) => {
                Term::Op(*sym, args.iter().map(|t| t.rename_canonical(offset, env)).collect())
            }
        }
    }

    /// Capture-avoiding substitution of the value `v` for the linear variable `x`.
    pub fn subst_value(&self, x: &Name, v: &Term) -> Term {
        let fv = FreeVars::of(v);
        self.subst(VarKind::Lin, x, v, &fv)
    }

    /// Capture-avoiding substitution of the computation `e` for the
    /// non-linear variable `a`. May duplicate `e`.
    pub fn subst_comp(&self, a: &Name, e: &Term) -> Term {
        let fv = FreeVars::of(e);
        self.subst(VarKind::NonLin, a, e, &fv)
    }

    fn subst(&self, kind: VarKind, target: &Name, repl: &Term, fv: &FreeVars) -> Term {
        match self {
            Term::LinVar(x) if kind == VarKind::Lin && x == target => repl.clone(),
            Term::NonLinVar(a) if kind == VarKind::NonLin && a == target => repl.clone(),
            Term::LinVar(_) | Term::NonLinVar(_) | Term::Hole => self.clone(),
            Term::Abs(x, e) => {
                let (x, e) = subst_under(VarKind::Lin, x, e, kind, target, repl, fv);
                Term::Abs(x, Box::new(e))
            }
            Term::Bang(e) => Term::Bang(Box::new(e.subst(kind, target, repl, fv))),
            Term::Return(v) => Term::Return(Box::new(v.subst(kind, target, repl, fv))),
            Term::App(v, w) => Term::App(
                Box::new(v.subst(kind, target, repl, fv)),
                Box::new(w.subst(kind, target, repl, fv)),
            ),
            Term::Seq(e, x, f) => {
                let e = e.subst(kind, target, repl, fv);
                let (x, f) = subst_under(VarKind::Lin, x, f, kind, target, repl, fv);
                Term::Seq(Box::new(e), x, Box::new(f))
            }
            Term::CoSeq(v, a, f) => {
                let v = v.subst(kind, target, repl, fv);
                let (a, f) = subst_under(VarKind::NonLin, a, f, kind, target, repl, fv);
                Term::CoSeq(Box::new(v), a, Box::new(f))
            }
            Term::Op(sym, args) => {
                Term::Op(*sym, args.iter().map(|t| t.subst(kind, target, repl, fv)).collect())
            }
        }
    }

    /// Rename the free variable `from` of the given kind to `to`. `to` must be
    /// fresh for the term.
    fn rename_free(&self, kind: VarKind, from: &Name, to: &Name) -> Term {
        let repl = match kind {
            VarKind::Lin => Term::LinVar(to.clone()),
            VarKind::NonLin => Term::NonLinVar(to.clone()),
        };
        let fv = FreeVars::of(&repl);
        self.subst(kind, from, &repl, &fv)
    }

    /// Replace the hole by `e`. Free variables of `e` may be captured by
    /// binders of the context, which is the intended behaviour of contexts.
    pub fn plug(&self, e: &Term) -> Term {
        match self {
            Term::Hole => e.clone(),
            Term::LinVar(_) | Term::NonLinVar(_) => self.clone(),
            Term::Abs(x, b) => Term::Abs(x.clone(), Box::new(b.plug(e))),
            Term::Bang(b) => Term::Bang(Box::new(b.plug(e))),
            Term::Return(b) => Term::Return(Box::new(b.plug(e))),
            Term::App(v, w) => Term::App(Box::new(v.plug(e)), Box::new(w.plug(e))),
            Term::Seq(a, x, b) => Term::Seq(Box::new(a.plug(e)), x.clone(), Box::new(b.plug(e))),
            Term::CoSeq(a, x, b) => {
                Term::CoSeq(Box::new(a.plug(e)), x.clone(), Box::new(b.plug(e)))
            }
            Term::Op(sym, args) => Term::Op(*sym, args.iter().map(|t| t.plug(e)).collect()),
        }
    }

    pub fn ops(&self) -> BTreeSet<OpSym> {
        let mut out = BTreeSet::new();
        self.collect_ops(&mut out);
        out
    }

    fn collect_ops(&self, out: &mut BTreeSet<OpSym>) {
        match self {
            Term::LinVar(_) | Term::NonLinVar(_) | Term::Hole => {}
            Term::Abs(_, e) | Term::Bang(e) | Term::Return(e) => e.collect_ops(out),
            Term::App(v, w) => {
                v.collect_ops(out);
                w.collect_ops(out);
            }
            Term::Seq(e, _, f) | Term::CoSeq(e, _, f) => {
                e.collect_ops(out);
                f.collect_ops(out);
            }
            Term::Op(sym, args) => {
                out.insert(*sym);
                args.iter().for_each(|t| t.collect_ops(out));
            }
        }
    }
}

fn with_binder<R>(
    binds: bool,
    x: &Name,
    bound: &mut Vec<Name>,
    f: impl FnOnce(&mut Vec<Name>) -> R,
) -> R {
    if binds {
        bound.push(x.clone());
        let r = f(bound);
        bound.pop();
        r
    } else {
        f(bound)
    }
}

struct FreeVars {
    lin: BTreeSet<Name>,
    nonlin: BTreeSet<Name>,
}

impl FreeVars {
    fn of(t: &Term) -> Self {
        FreeVars { lin: t.free_lin_vars(), nonlin: t.free_nonlin_vars() }
    }

    fn contains(&self, kind: VarKind, n: &Name) -> bool {
        match kind {
            VarKind::Lin => self.lin.contains(n),
            VarKind::NonLin => self.nonlin.contains(n),
        }
    }
}

fn subst_under(
    binder_kind: VarKind,
    binder: &Name,
    body: &Term,
    kind: VarKind,
    target: &Name,
    repl: &Term,
    fv: &FreeVars,
) -> (Name, Term) {
    if binder_kind == kind && binder == target {
        return (binder.clone(), body.clone());
    }
    if fv.contains(binder_kind, binder) {
        let mut avoid: BTreeSet<Name> = match binder_kind {
            VarKind::Lin => fv.lin.iter().cloned().chain(body.free_lin_vars()).collect(),
            VarKind::NonLin => fv.nonlin.iter().cloned().chain(body.free_nonlin_vars()).collect(),
        };
        if binder_kind == kind {
            avoid.insert(target.clone());
        }
        let fresh = fresh_name(binder, &avoid);
        let body = body.rename_free(binder_kind, binder, &fresh);
        let body = body.subst(kind, target, repl, fv);
        (fresh, body)
    } else {
        (binder.clone(), body.subst(kind, target, repl, fv))
    }
}

pub(crate) fn fresh_name(base: &Name, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    (0..)
        .map(|i| name(&format!("{stem}{i}")))
        .find(|n| !avoid.contains(n))
        .expect("infinite supply of names")
}

fn canonical_offset(terms: &[&Term]) -> usize {
    let mut offset = 0;
    for t in terms {
        for n in t.free_lin_vars().into_iter().chain(t.free_nonlin_vars()) {
            if let Some(rest) = n.strip_prefix('x').or_else(|| n.strip_prefix('a')) {
                if let Ok(k) = rest.parse::<usize>() {
                    offset = offset.max(k);
                }
            }
        }
    }
    offset
}

// ---------------------------------------------------------------------------
// Printing. The output is accepted by the parser.

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::LinVar(x) | Term::NonLinVar(x) => write!(f, "{x}"),
            Term::Hole => write!(f, "[-]"),
            Term::Abs(x, e) => write!(f, "\\{x}. {e}"),
            Term::Bang(e) => {
                write!(f, "!")?;
                fmt_comp_atom(e, f)
            }
            Term::Return(v) => write!(f, "return {v}"),
            Term::App(v, w) => {
                fmt_value_atom(v, f)?;
                write!(f, " ")?;
                fmt_value_atom(w, f)
            }
            Term::Seq(e, x, body) => write!(f, "let {x} = {e} in {body}"),
            Term::CoSeq(v, a, body) => write!(f, "let !{a} = {v} in {body}"),
            Term::Op(sym, args) => {
                write!(f, "{sym}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn fmt_value_atom(v: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match v {
        Term::Abs(..) => write!(f, "({v})"),
        _ => write!(f, "{v}"),
    }
}

fn fmt_comp_atom(e: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Term::NonLinVar(_) | Term::Op(..) | Term::Hole => write!(f, "{e}"),
        _ => write!(f, "({e})"),
    }
}

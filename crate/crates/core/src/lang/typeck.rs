//! The linear type system.
//!
//! Checking synthesizes types with unification variables over a graph of
//! type nodes. Unification never performs an occurs check, so solutions are
//! regular (possibly cyclic) trees, which are exactly the equi-recursive
//! types. Linearity is tracked alongside by resource passing.

use std::fmt;

use thiserror::Error;

use super::term::{name, Name, Term};
use super::types::Type;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TypeEnv {
    pub nonlinear: Vec<(Name, Type)>,
    pub linear: Vec<(Name, Type)>,
}

impl TypeEnv {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_nonlinear(mut self, a: &str, ty: Type) -> Self {
        self.nonlinear.push((name(a), ty));
        self
    }

    pub fn with_linear(mut self, x: &str, ty: Type) -> Self {
        self.linear.push((name(x), ty));
        self
    }

    fn check_distinct(&self) -> Result<(), TypeError> {
        for list in [&self.nonlinear, &self.linear] {
            for (i, (n, _)) in list.iter().enumerate() {
                if list[..i].iter().any(|(m, _)| m == n) {
                    return Err(TypeError::RepeatedName(n.clone()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("linear variable `{0}` is never used")]
    LinearUnused(Name),
    #[error("linear variable `{0}` is used more than once")]
    LinearUsedTwice(Name),
    #[error("linear variable `{0}` occurs under a bang")]
    LinearUnderBang(Name),
    #[error("the arguments of `{0}` do not use the same linear variables")]
    SplitMismatch(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("expected a {expected}, found `{term}`")]
    WrongClass { expected: &'static str, term: String },
    #[error("the context hole is not used exactly once")]
    HoleMisuse,
    #[error("name `{0}` is repeated in the environment")]
    RepeatedName(Name),
}

// ---------------------------------------------------------------------------
// Type graphs

pub(crate) type NodeId = usize;

/// A type variable with this name stands for an unknown type rather than a
/// rigid one. It cannot be written in source programs.
pub const WILDCARD: &str = "?";

#[derive(Clone, Debug)]
enum Node {
    Unknown,
    Rigid(Name),
    Bang(NodeId),
    Lolli(NodeId, NodeId),
    Link(NodeId),
}

#[derive(Default)]
pub(crate) struct TypeGraph {
    nodes: Vec<Node>,
}

impl TypeGraph {
    fn fresh(&mut self) -> NodeId {
        self.nodes.push(Node::Unknown);
        self.nodes.len() - 1
    }

    fn add(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn find(&mut self, mut n: NodeId) -> NodeId {
        let mut path = Vec::new();
        while let Node::Link(next) = self.nodes[n] {
            path.push(n);
            n = next;
        }
        for p in path {
            self.nodes[p] = Node::Link(n);
        }
        n
    }

    pub(crate) fn add_type(&mut self, ty: &Type) -> NodeId {
        self.add_type_in(ty, &mut Vec::new())
    }

    fn add_type_in(&mut self, ty: &Type, scope: &mut Vec<(Name, NodeId)>) -> NodeId {
        match ty {
            Type::Var(x) if &**x == WILDCARD => self.fresh(),
            Type::Var(x) => match scope.iter().rev().find(|(y, _)| y == x) {
                Some((_, n)) => *n,
                None => self.add(Node::Rigid(x.clone())),
            },
            Type::Bang(t) => {
                let inner = self.add_type_in(t, scope);
                self.add(Node::Bang(inner))
            }
            Type::Lolli(a, b) => {
                let a = self.add_type_in(a, scope);
                let b = self.add_type_in(b, scope);
                self.add(Node::Lolli(a, b))
            }
            Type::MuLolli(x, a, b) => {
                let me = self.fresh();
                scope.push((x.clone(), me));
                let a = self.add_type_in(a, scope);
                let b = self.add_type_in(b, scope);
                scope.pop();
                self.nodes[me] = Node::Lolli(a, b);
                me
            }
            Type::MuBang(x, a) => {
                let me = self.fresh();
                scope.push((x.clone(), me));
                let a = self.add_type_in(a, scope);
                scope.pop();
                self.nodes[me] = Node::Bang(a);
                me
            }
        }
    }

    /// Merge two nodes. Classes are linked before their children are
    /// visited, so cycles are handled coinductively.
    fn unify(&mut self, a: NodeId, b: NodeId) -> Result<(), (NodeId, NodeId)> {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return Ok(());
        }
        match (self.nodes[a].clone(), self.nodes[b].clone()) {
            (Node::Unknown, _) => {
                self.nodes[a] = Node::Link(b);
                Ok(())
            }
            (_, Node::Unknown) => {
                self.nodes[b] = Node::Link(a);
                Ok(())
            }
            (Node::Rigid(x), Node::Rigid(y)) if x == y => {
                self.nodes[a] = Node::Link(b);
                Ok(())
            }
            (Node::Bang(x), Node::Bang(y)) => {
                self.nodes[a] = Node::Link(b);
                self.unify(x, y)
            }
            (Node::Lolli(x1, y1), Node::Lolli(x2, y2)) => {
                self.nodes[a] = Node::Link(b);
                self.unify(x1, x2)?;
                self.unify(y1, y2)
            }
            _ => Err((a, b)),
        }
    }

    /// Read a node back as a surface type. Cycles become `mu` binders;
    /// unresolved unknowns become the rigid variable `default`.
    pub(crate) fn read_back(&mut self, n: NodeId, default: &Name) -> Type {
        let mut stack = Vec::new();
        let mut counter = 0;
        self.decode(n, default, &mut stack, &mut counter)
    }

    fn decode(
        &mut self,
        n: NodeId,
        default: &Name,
        stack: &mut Vec<(NodeId, Name, bool)>,
        counter: &mut usize,
    ) -> Type {
        let n = self.find(n);
        if let Some(entry) = stack.iter_mut().find(|(m, _, _)| *m == n) {
            entry.2 = true;
            return Type::Var(entry.1.clone());
        }
        match self.nodes[n].clone() {
            Node::Unknown => Type::Var(default.clone()),
            Node::Rigid(x) => Type::Var(x),
            Node::Link(_) => unreachable!("find returns a root"),
            Node::Bang(inner) => {
                let binder = self.binder_name(counter);
                stack.push((n, binder.clone(), false));
                let inner = self.decode(inner, default, stack, counter);
                let (_, _, used) = stack.pop().expect("pushed above");
                if used {
                    Type::MuBang(binder, Box::new(inner))
                } else {
                    Type::Bang(Box::new(inner))
                }
            }
            Node::Lolli(a, b) => {
                let binder = self.binder_name(counter);
                stack.push((n, binder.clone(), false));
                let a = self.decode(a, default, stack, counter);
                let b = self.decode(b, default, stack, counter);
                let (_, _, used) = stack.pop().expect("pushed above");
                if used {
                    Type::MuLolli(binder, Box::new(a), Box::new(b))
                } else {
                    Type::Lolli(Box::new(a), Box::new(b))
                }
            }
        }
    }

    fn binder_name(&self, counter: &mut usize) -> Name {
        *counter += 1;
        name(&format!("R{counter}"))
    }

    fn describe(&mut self, n: NodeId) -> String {
        self.read_back(n, &name("_")).to_string()
    }
}

// ---------------------------------------------------------------------------
// Checking

#[derive(Clone, Debug)]
struct LinEntry {
    name: Name,
    ty: NodeId,
    used: bool,
    hole: bool,
}

pub(crate) struct Checker {
    pub(crate) graph: TypeGraph,
    nonlin: Vec<(Name, NodeId)>,
    lin: Vec<LinEntry>,
    floor: usize,
}

impl Checker {
    pub(crate) fn new(env: &TypeEnv, hole: Option<&Type>) -> Result<Self, TypeError> {
        env.check_distinct()?;
        let mut graph = TypeGraph::default();
        let nonlin = env.nonlinear.iter().map(|(n, t)| (n.clone(), graph.add_type(t))).collect();
        let mut lin: Vec<LinEntry> = env
            .linear
            .iter()
            .map(|(n, t)| LinEntry { name: n.clone(), ty: graph.add_type(t), used: false, hole: false })
            .collect();
        if let Some(h) = hole {
            lin.push(LinEntry { name: name("[-]"), ty: graph.add_type(h), used: false, hole: true });
        }
        Ok(Checker { graph, nonlin, lin, floor: 0 })
    }

    pub(crate) fn expect(&mut self, found: NodeId, expected: &Type) -> Result<(), TypeError> {
        let want = self.graph.add_type(expected);
        self.unify_or_mismatch(want, found)
    }

    fn unify_or_mismatch(&mut self, expected: NodeId, found: NodeId) -> Result<(), TypeError> {
        let e = self.graph.describe(expected);
        let f = self.graph.describe(found);
        self.graph
            .unify(expected, found)
            .map_err(|_| TypeError::Mismatch { expected: e, found: f })
    }

    pub(crate) fn finish(&self) -> Result<(), TypeError> {
        match self.lin.iter().find(|e| !e.used) {
            Some(e) if e.hole => Err(TypeError::HoleMisuse),
            Some(e) => Err(TypeError::LinearUnused(e.name.clone())),
            None => Ok(()),
        }
    }

    fn use_linear(&mut self, x: &Name, hole: bool) -> Result<NodeId, TypeError> {
        let idx = self
            .lin
            .iter()
            .rposition(|e| e.hole == hole && (hole || &e.name == x))
            .ok_or_else(|| if hole { TypeError::HoleMisuse } else { TypeError::Unbound(x.clone()) })?;
        if idx < self.floor {
            return Err(if hole { TypeError::HoleMisuse } else { TypeError::LinearUnderBang(x.clone()) });
        }
        let entry = &mut self.lin[idx];
        if entry.used {
            return Err(if hole { TypeError::HoleMisuse } else { TypeError::LinearUsedTwice(x.clone()) });
        }
        entry.used = true;
        Ok(entry.ty)
    }

    fn bind_linear<R>(
        &mut self,
        x: &Name,
        ty: NodeId,
        body: impl FnOnce(&mut Self) -> Result<R, TypeError>,
    ) -> Result<R, TypeError> {
        self.lin.push(LinEntry { name: x.clone(), ty, used: false, hole: false });
        let r = body(self);
        let entry = self.lin.pop().expect("pushed above");
        let r = r?;
        if !entry.used {
            return Err(TypeError::LinearUnused(x.clone()));
        }
        Ok(r)
    }

    pub(crate) fn value(&mut self, v: &Term) -> Result<NodeId, TypeError> {
        match v {
            Term::LinVar(x) => self.use_linear(x, false),
            Term::Abs(x, e) => {
                let arg = self.graph.fresh();
                let res = self.bind_linear(x, arg, |c| c.comp(e))?;
                Ok(self.graph.add(Node::Lolli(arg, res)))
            }
            Term::Bang(e) => {
                let saved = self.floor;
                self.floor = self.lin.len();
                let r = self.comp(e);
                self.floor = saved;
                let inner = r?;
                Ok(self.graph.add(Node::Bang(inner)))
            }
            other => Err(TypeError::WrongClass { expected: "value", term: other.to_string() }),
        }
    }

    pub(crate) fn comp(&mut self, e: &Term) -> Result<NodeId, TypeError> {
        match e {
            Term::NonLinVar(a) => self
                .nonlin
                .iter()
                .rev()
                .find(|(b, _)| b == a)
                .map(|(_, t)| *t)
                .ok_or_else(|| TypeError::Unbound(a.clone())),
            Term::Hole => self.use_linear(&name("[-]"), true),
            Term::Return(v) => self.value(v),
            Term::App(v, w) => {
                let fun = self.value(v)?;
                let arg = self.value(w)?;
                let res = self.graph.fresh();
                let want = self.graph.add(Node::Lolli(arg, res));
                self.unify_or_mismatch(want, fun)?;
                Ok(res)
            }
            Term::Seq(e1, x, f) => {
                let t = self.comp(e1)?;
                self.bind_linear(x, t, |c| c.comp(f))
            }
            Term::CoSeq(v, a, f) => {
                let t = self.value(v)?;
                let inner = self.graph.fresh();
                let want = self.graph.add(Node::Bang(inner));
                self.unify_or_mismatch(want, t)?;
                self.nonlin.push((a.clone(), inner));
                let r = self.comp(f);
                self.nonlin.pop();
                r
            }
            Term::Op(sym, args) => {
                let start: Vec<bool> = self.lin.iter().map(|e| e.used).collect();
                let res = self.graph.fresh();
                let mut after: Option<Vec<bool>> = None;
                for arg in args {
                    for (entry, used) in self.lin.iter_mut().zip(&start) {
                        entry.used = *used;
                    }
                    let t = self.comp(arg)?;
                    self.unify_or_mismatch(res, t)?;
                    let now: Vec<bool> = self.lin.iter().map(|e| e.used).collect();
                    match &after {
                        None => after = Some(now),
                        Some(prev) if *prev == now => {}
                        Some(_) => return Err(TypeError::SplitMismatch(sym.to_string())),
                    }
                }
                if let Some(now) = after {
                    for (entry, used) in self.lin.iter_mut().zip(now) {
                        entry.used = used;
                    }
                }
                Ok(res)
            }
            other => Err(TypeError::WrongClass { expected: "computation", term: other.to_string() }),
        }
    }
}

pub fn typecheck_value(env: &TypeEnv, v: &Term, ty: &Type) -> Result<(), TypeError> {
    let mut c = Checker::new(env, None)?;
    let found = c.value(v)?;
    c.expect(found, ty)?;
    c.finish()
}

pub fn typecheck_comp(env: &TypeEnv, e: &Term, ty: &Type) -> Result<(), TypeError> {
    let mut c = Checker::new(env, None)?;
    let found = c.comp(e)?;
    c.expect(found, ty)?;
    c.finish()
}

/// Check a term of either class.
pub fn typecheck(env: &TypeEnv, t: &Term, ty: &Type) -> Result<(), TypeError> {
    if t.is_value() {
        typecheck_value(env, t, ty)
    } else {
        typecheck_comp(env, t, ty)
    }
}

/// Check a single-hole context `ctx` whose hole stands for a computation of
/// type `hole`.
pub fn typecheck_context(ctx: &Term, hole: &Type, ty: &Type) -> Result<(), TypeError> {
    if ctx.hole_count() != 1 {
        return Err(TypeError::HoleMisuse);
    }
    let mut c = Checker::new(&TypeEnv::empty(), Some(hole))?;
    let found = if ctx.is_value() { c.value(ctx)? } else { c.comp(ctx)? };
    c.expect(found, ty)?;
    c.finish()
}

/// Synthesize a type. Parts of the type left unconstrained are instantiated
/// with the rigid variable `default`.
pub fn infer(env: &TypeEnv, t: &Term, default: &str) -> Result<Type, TypeError> {
    let mut c = Checker::new(env, None)?;
    let found = if t.is_value() { c.value(t)? } else { c.comp(t)? };
    c.finish()?;
    Ok(c.graph.read_back(found, &name(default)))
}

/// Decide type equality by unifying the two regular trees. Independent of
/// [`super::types::type_eq`], which works on the syntax directly.
pub fn type_eq_by_unification(s: &Type, t: &Type) -> bool {
    let mut g = TypeGraph::default();
    let a = g.add_type(s);
    let b = g.add_type(t);
    // rigid variables only unify with equal rigid variables, so success
    // means the two trees coincide
    g.unify(a, b).is_ok()
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nl: Vec<String> = self.nonlinear.iter().map(|(n, t)| format!("{n}: {t}")).collect();
        let l: Vec<String> = self.linear.iter().map(|(n, t)| format!("{n}: {t}")).collect();
        write!(f, "{} | {}", nl.join(", "), l.join(", "))
    }
}

/// Synthesize the result type of a context whose hole has type `hole`.
pub fn infer_context(ctx: &Term, hole: &Type, default: &str) -> Result<Type, TypeError> {
    if ctx.hole_count() != 1 {
        return Err(TypeError::HoleMisuse);
    }
    let mut c = Checker::new(&TypeEnv::empty(), Some(hole))?;
    let found = if ctx.is_value() { c.value(ctx)? } else { c.comp(ctx)? };
    c.finish()?;
    Ok(c.graph.read_back(found, &name(default)))
}

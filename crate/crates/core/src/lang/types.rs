//! Linear types with equi-recursive `mu` forms.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::term::{fresh_name, name, Name};

/// `mu` only ever binds over an arrow or a bang.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Var(Name),
    Bang(Box<Type>),
    Lolli(Box<Type>, Box<Type>),
    MuLolli(Name, Box<Type>, Box<Type>),
    MuBang(Name, Box<Type>),
}

pub fn tvar(x: &str) -> Type {
    Type::Var(name(x))
}
pub fn tbang(t: Type) -> Type {
    Type::Bang(Box::new(t))
}
pub fn lolli(a: Type, b: Type) -> Type {
    Type::Lolli(Box::new(a), Box::new(b))
}
pub fn mu_lolli(x: &str, a: Type, b: Type) -> Type {
    Type::MuLolli(name(x), Box::new(a), Box::new(b))
}
pub fn mu_bang(x: &str, a: Type) -> Type {
    Type::MuBang(name(x), Box::new(a))
}

/// Head constructor of a type after unfolding a leading `mu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    Var(Name),
    Bang(Type),
    Lolli(Type, Type),
}

impl Type {
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Type::Bang(t) => t.collect_free(bound, out),
            Type::Lolli(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Type::MuLolli(x, a, b) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                bound.pop();
            }
            Type::MuBang(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Var(_) => 1,
            Type::Bang(t) | Type::MuBang(_, t) => 1 + t.size(),
            Type::Lolli(a, b) | Type::MuLolli(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Capture-avoiding `self[repl/x]`.
    pub fn subst(&self, x: &Name, repl: &Type) -> Type {
        let fv = repl.free_vars();
        self.subst_with(x, repl, &fv)
    }

    fn subst_with(&self, x: &Name, repl: &Type, fv: &BTreeSet<Name>) -> Type {
        match self {
            Type::Var(y) if y == x => repl.clone(),
            Type::Var(_) => self.clone(),
            Type::Bang(t) => Type::Bang(Box::new(t.subst_with(x, repl, fv))),
            Type::Lolli(a, b) => Type::Lolli(
                Box::new(a.subst_with(x, repl, fv)),
                Box::new(b.subst_with(x, repl, fv)),
            ),
            Type::MuLolli(y, _, _) | Type::MuBang(y, _) if y == x => self.clone(),
            Type::MuLolli(y, a, b) => {
                let (y, a, b) = if fv.contains(y) {
                    let fresh = self.fresh_binder(y, fv, x);
                    let v = Type::Var(fresh.clone());
                    (fresh, a.subst(y, &v), b.subst(y, &v))
                } else {
                    (y.clone(), (**a).clone(), (**b).clone())
                };
                Type::MuLolli(
                    y,
                    Box::new(a.subst_with(x, repl, fv)),
                    Box::new(b.subst_with(x, repl, fv)),
                )
            }
            Type::MuBang(y, a) => {
                let (y, a) = if fv.contains(y) {
                    let fresh = self.fresh_binder(y, fv, x);
                    (fresh.clone(), a.subst(y, &Type::Var(fresh)))
                } else {
                    (y.clone(), (**a).clone())
                };
                Type::MuBang(y, Box::new(a.subst_with(x, repl, fv)))
            }
        }
    }

    fn fresh_binder(&self, y: &Name, fv: &BTreeSet<Name>, x: &Name) -> Name {
        let mut avoid = fv.clone();
        avoid.extend(self.free_vars());
        avoid.insert(x.clone());
        avoid.insert(y.clone());
        fresh_name(y, &avoid)
    }

    /// Unfold a leading `mu` once (at most one unfolding is ever needed).
    pub fn unfold(&self) -> Type {
        match self {
            Type::MuLolli(x, a, b) => {
                Type::Lolli(Box::new(a.subst(x, self)), Box::new(b.subst(x, self)))
            }
            Type::MuBang(x, a) => Type::Bang(Box::new(a.subst(x, self))),
            _ => self.clone(),
        }
    }

    pub fn head(&self) -> Head {
        match self.unfold() {
            Type::Var(x) => Head::Var(x),
            Type::Bang(t) => Head::Bang(*t),
            Type::Lolli(a, b) => Head::Lolli(*a, *b),
            Type::MuLolli(..) | Type::MuBang(..) => unreachable!("unfold removes the leading mu"),
        }
    }

    pub fn as_bang(&self) -> Option<Type> {
        match self.head() {
            Head::Bang(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_lolli(&self) -> Option<(Type, Type)> {
        match self.head() {
            Head::Lolli(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// The set of types reachable by taking components after unfolding,
    /// deduplicated up to [`type_eq`]. Always finite for regular types.
    pub fn component_closure(&self) -> Vec<Type> {
        let mut out: Vec<Type> = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if out.iter().any(|u| type_eq(u, &t)) {
                continue;
            }
            match t.head() {
                Head::Var(_) => {}
                Head::Bang(a) => stack.push(a),
                Head::Lolli(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
            out.push(t);
        }
        out
    }
}

/// Decide equality of two types under the equi-recursive reading: both
/// `mu` unfolding equations plus coinduction. Pairs already under
/// consideration are assumed equal; the candidate pairs range over a finite
/// set, so this terminates.
pub fn type_eq(s: &Type, t: &Type) -> bool {
    let mut assumed = HashSet::new();
    eq_assuming(s, t, &mut assumed)
}

fn eq_assuming(s: &Type, t: &Type, assumed: &mut HashSet<(Type, Type)>) -> bool {
    if s == t {
        return true;
    }
    if !assumed.insert((s.clone(), t.clone())) {
        return true;
    }
    match (s.head(), t.head()) {
        (Head::Var(x), Head::Var(y)) => x == y,
        (Head::Bang(a), Head::Bang(b)) => eq_assuming(&a, &b, assumed),
        (Head::Lolli(a1, b1), Head::Lolli(a2, b2)) => {
            eq_assuming(&a1, &a2, assumed) && eq_assuming(&b1, &b2, assumed)
        }
        _ => false,
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(x) => write!(f, "{x}"),
            Type::Bang(t) => {
                write!(f, "!")?;
                fmt_atom(t, f)
            }
            Type::Lolli(a, b) => {
                match **a {
                    Type::Lolli(..) | Type::MuLolli(..) | Type::MuBang(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " -o {b}")
            }
            Type::MuLolli(x, a, b) => {
                write!(f, "mu {x}. ")?;
                match **a {
                    Type::Lolli(..) | Type::MuLolli(..) | Type::MuBang(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " -o {b}")
            }
            Type::MuBang(x, a) => {
                write!(f, "mu {x}. !")?;
                fmt_atom(a, f)
            }
        }
    }
}

fn fmt_atom(t: &Type, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Type::Var(_) | Type::Bang(_) => write!(f, "{t}"),
        _ => write!(f, "({t})"),
    }
}

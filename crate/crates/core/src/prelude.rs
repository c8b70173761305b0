//! Standard definitions and the running example programs.

use crate::lang::term::*;
use crate::lang::types::*;
use crate::lang::Type;

/// `\x. let !a = x in let z = a in z (!a)`, of type `mu S. !S -o t` for any `t`.
pub fn omega_half() -> Term {
    abs("x", coseq(lvar("x"), "a", seq(nvar("a"), "z", app(lvar("z"), bang(nvar("a"))))))
}

/// A closed computation that diverges at every type.
pub fn omega() -> Term {
    let w = omega_half();
    app(w.clone(), bang(ret(w)))
}

pub fn identity() -> Term {
    abs("y", ret(lvar("y")))
}

/// The base type used to instantiate the examples.
pub fn base() -> Type {
    lolli(tvar("X"), tvar("X"))
}

/// Two programs of the same type, with a known relationship.
#[derive(Clone, Debug)]
pub struct ExamplePair {
    pub name: &'static str,
    pub lhs: Term,
    pub rhs: Term,
    pub ty: Type,
}

/// Abstraction distributes over choice: equivalent.
pub fn lambda_dist() -> ExamplePair {
    let e = ret(lvar("x"));
    let f = seq(omega(), "z", app(lvar("z"), lvar("x")));
    ExamplePair {
        name: "lambda-dist",
        lhs: ret(abs("x", op(OpSym::Choice, vec![e.clone(), f.clone()]))),
        rhs: op(OpSym::Choice, vec![ret(abs("x", e)), ret(abs("x", f))]),
        ty: lolli(base(), base()),
    }
}

/// Bang does not distribute over choice: a context that runs the copied
/// computation twice observes 1/4 on the left and 1/2 on the right.
pub fn bang_dist() -> ExamplePair {
    let e = ret(bang(ret(identity())));
    let f = omega();
    ExamplePair {
        name: "bang-dist",
        lhs: ret(bang(op(OpSym::Choice, vec![e.clone(), f.clone()]))),
        rhs: op(OpSym::Choice, vec![ret(bang(e)), ret(bang(f))]),
        ty: tbang(tbang(base())),
    }
}

/// `let x = [-] in let !a = x in let y = a in let !b = y in a`: run the
/// copied computation, discard its result, then run it again.
pub fn copy_twice_context() -> Term {
    seq(Term::Hole, "x", coseq(lvar("x"), "a", seq(nvar("a"), "y", coseq(lvar("y"), "b", nvar("a")))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::typeck::{typecheck_comp, typecheck_context, TypeEnv};

    #[test]
    fn examples_typecheck() {
        for p in [lambda_dist(), bang_dist()] {
            assert_eq!(typecheck_comp(&TypeEnv::empty(), &p.lhs, &p.ty), Ok(()), "{}", p.name);
            assert_eq!(typecheck_comp(&TypeEnv::empty(), &p.rhs, &p.ty), Ok(()), "{}", p.name);
        }
        let c = copy_twice_context();
        assert_eq!(c.size(), 9);
        assert_eq!(typecheck_context(&c, &bang_dist().ty, &tbang(base())), Ok(()));
    }
}

mod common;

use std::sync::OnceLock;

use lambang::lang::enumerate::{enumerate_comps, enumerate_contexts, enumerate_terms, enumerate_values};
use lambang::lang::parse::{parse_comp, parse_context, parse_type, parse_value};
use lambang::lang::typeck::type_eq_by_unification;
use lambang::lang::types::{lolli, tbang, tvar, Type};
use lambang::lang::{name, typecheck, typecheck_comp, typecheck_context, OpSym, Term, TypeEnv};
use lambang::monad::Monad;
use lambang::sample::type_pool;
use proptest::prelude::*;

fn types8() -> &'static [Type] {
    static T: OnceLock<Vec<Type>> = OnceLock::new();
    T.get_or_init(|| common::types_up_to(8))
}

fn types5() -> &'static [Type] {
    static T: OnceLock<Vec<Type>> = OnceLock::new();
    T.get_or_init(|| common::types_up_to(5))
}

/// Unfold the `mu` nodes selected by `bits`, anywhere in the type.
fn unfold_at(t: &Type, bits: &mut impl Iterator<Item = bool>) -> Type {
    let t = if bits.next().unwrap_or(false) { t.unfold() } else { t.clone() };
    match t {
        Type::Var(_) => t,
        Type::Bang(a) => tbang(unfold_at(&a, bits)),
        Type::Lolli(a, b) => lolli(unfold_at(&a, bits), unfold_at(&b, bits)),
        Type::MuLolli(..) | Type::MuBang(..) => t,
    }
}

#[test]
fn every_mu_type_equals_its_unfolding() {
    let mut n = 0;
    for t in types8() {
        if matches!(t, Type::MuLolli(..) | Type::MuBang(..)) {
            assert!(type_eq(t, &t.unfold()), "{t}");
            n += 1;
        }
    }
    assert!(n > 10_000, "{n}");
}

#[test]
fn reflexive_on_all_enumerated_types() {
    for t in types8() {
        assert!(type_eq(t, t), "{t}");
    }
}

use lambang::lang::type_eq;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn symmetric_and_agrees_with_unification(i in 0..types5().len(), j in 0..types5().len()) {
        let (s, t) = (&types5()[i], &types5()[j]);
        let st = type_eq(s, t);
        prop_assert_eq!(st, type_eq(t, s));
        prop_assert_eq!(st, type_eq_by_unification(s, t));
    }

    #[test]
    fn transitive_through_unfoldings(
        i in 0..types8().len(),
        b1 in proptest::collection::vec(any::<bool>(), 16),
        b2 in proptest::collection::vec(any::<bool>(), 16),
        k in 0..types8().len(),
    ) {
        let a = &types8()[i];
        let b = unfold_at(a, &mut b1.into_iter());
        let c = unfold_at(&b, &mut b2.into_iter());
        prop_assert!(type_eq(a, &b));
        prop_assert!(type_eq(&b, &c));
        prop_assert!(type_eq(a, &c));
        prop_assert!(type_eq(&c, a));
        let d = &types8()[k];
        // equal types are interchangeable on either side
        prop_assert_eq!(type_eq(a, d), type_eq(&c, d));
    }

    #[test]
    fn types_print_and_parse_back(i in 0..types8().len()) {
        let t = &types8()[i];
        let back = parse_type(&t.to_string()).unwrap();
        prop_assert!(type_eq(t, &back));
        prop_assert_eq!(back.to_string(), t.to_string());
    }
}

fn op_sets() -> Vec<Vec<OpSym>> {
    Monad::ALL.iter().map(|m| m.enum_ops()).collect()
}

#[test]
fn enumerated_terms_print_and_parse_back() {
    let envs = [
        TypeEnv::empty(),
        TypeEnv::empty().with_linear("x", tvar("X")).with_nonlinear("a", lolli(tvar("X"), tvar("X"))),
    ];
    let mut n = 0;
    for ops in op_sets() {
        for env in &envs {
            for ty in type_pool().iter().chain([tvar("X")].iter()) {
                for t in enumerate_terms(env, ty, 8, &ops) {
                    let parse = if t.is_value() { parse_value } else { parse_comp };
                    let back = parse(&t.to_string(), None).unwrap_or_else(|e| panic!("{t}: {e}"));
                    assert!(back.alpha_eq(&t), "{t} came back as {back}");
                    n += 1;
                }
            }
        }
    }
    assert!(n > 1500, "{n}");
}

#[test]
fn enumerated_contexts_print_and_parse_back() {
    for hole in type_pool() {
        for c in enumerate_contexts(&hole, None, 7, &[OpSym::Choice]) {
            let back = parse_context(&c.to_string(), None).unwrap();
            assert!(back.alpha_eq(&c), "{c}");
        }
    }
}

#[test]
fn enumeration_is_distinct_and_well_typed() {
    let env = TypeEnv::empty().with_linear("x", lolli(tvar("X"), tvar("X")));
    for ops in op_sets() {
        for ty in type_pool() {
            for env in [TypeEnv::empty(), env.clone()] {
                let terms: Vec<Term> = enumerate_terms(&env, &ty, 7, &ops).collect();
                let mut canon: Vec<Term> = terms.iter().map(Term::canonical).collect();
                canon.sort();
                canon.dedup();
                assert_eq!(canon.len(), terms.len(), "duplicates at {ty}");
                for t in &terms {
                    assert_eq!(typecheck(&env, t, &ty), Ok(()), "{t}");
                    assert!(t.size() <= 7);
                }
            }
        }
    }
}

#[test]
fn contexts_use_their_hole_once_and_typecheck() {
    for hole in type_pool() {
        for c in enumerate_contexts(&hole, Some(&hole), 7, &[OpSym::Choice]) {
            assert_eq!(c.hole_count(), 1);
            assert!(c.is_closed());
            assert_eq!(typecheck_context(&c, &hole, &hole), Ok(()), "{c}");
        }
    }
}

#[test]
fn substituting_a_value_preserves_typing() {
    let mut n = 0;
    for sigma in type_pool() {
        let vs = enumerate_values(&TypeEnv::empty(), &sigma, 6, &[OpSym::Choice]);
        let env = TypeEnv::empty().with_linear("x", sigma.clone());
        for tau in type_pool() {
            for e in enumerate_comps(&env, &tau, 8, &[OpSym::Choice]) {
                for v in &vs {
                    let s = e.subst_value(&name("x"), v);
                    assert_eq!(typecheck_comp(&TypeEnv::empty(), &s, &tau), Ok(()), "{e} [x := {v}]");
                    n += 1;
                }
            }
        }
    }
    assert!(n > 500, "{n}");
}

#[test]
fn substituting_a_computation_preserves_typing() {
    let mut n = 0;
    for sigma in type_pool() {
        let es = enumerate_comps(&TypeEnv::empty(), &sigma, 5, &[OpSym::Choice]);
        let env = TypeEnv::empty().with_nonlinear("a", sigma.clone());
        for tau in type_pool() {
            for f in enumerate_terms(&env, &tau, 7, &[OpSym::Choice]) {
                for e in &es {
                    let s = f.subst_comp(&name("a"), e);
                    assert_eq!(typecheck(&TypeEnv::empty(), &s, &tau), Ok(()), "{f} [a := {e}]");
                    n += 1;
                }
            }
        }
    }
    assert!(n > 300, "{n}");
}

#[test]
fn plugging_preserves_typing() {
    let hole = tbang(lolli(tvar("X"), tvar("X")));
    let es = enumerate_comps(&TypeEnv::empty(), &hole, 5, &[OpSym::Choice]);
    for c in enumerate_contexts(&hole, Some(&hole), 6, &[OpSym::Choice]) {
        for e in &es {
            assert_eq!(typecheck_comp(&TypeEnv::empty(), &c.plug(e), &hole), Ok(()), "{c} [{e}]");
        }
    }
}

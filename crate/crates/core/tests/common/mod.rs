#![allow(dead_code)]

use lambang::lang::types::{lolli, mu_bang, mu_lolli, tbang, tvar};
use lambang::lang::{Term, Type};
use lambang::monad::Monad;
use lambang::lang::enumerate::enumerate_values;
use lambang::lang::TypeEnv;
use lambang::rts::{b, enabled_actions, step, ConfigType, Configuration};
use lambang::sample::{program_pool, rng, type_pool};
use rand::seq::SliceRandom;
use rand::Rng;

/// Every type with exactly `size` nodes over the free variables `X`, `Y`
/// and the binders in scope.
fn types_exact(size: usize, bound: &mut Vec<String>, out: &mut Vec<Type>) {
    if size == 0 {
        return;
    }
    if size == 1 {
        out.push(tvar("X"));
        out.push(tvar("Y"));
        out.extend(bound.iter().map(|r| tvar(r)));
        return;
    }
    let mut sub = Vec::new();
    types_exact(size - 1, bound, &mut sub);
    out.extend(sub.into_iter().map(tbang));
    for l in 1..size - 1 {
        let (mut a, mut c) = (Vec::new(), Vec::new());
        types_exact(l, bound, &mut a);
        types_exact(size - 1 - l, bound, &mut c);
        for x in &a {
            for y in &c {
                out.push(lolli(x.clone(), y.clone()));
            }
        }
    }
    if bound.len() < 2 {
        let r = format!("R{}", bound.len());
        bound.push(r.clone());
        let mut sub = Vec::new();
        types_exact(size - 1, bound, &mut sub);
        out.extend(sub.into_iter().map(|t| mu_bang(&r, t)));
        for l in 1..size - 1 {
            let (mut a, mut c) = (Vec::new(), Vec::new());
            types_exact(l, bound, &mut a);
            types_exact(size - 1 - l, bound, &mut c);
            for x in &a {
                for y in &c {
                    out.push(mu_lolli(&r, x.clone(), y.clone()));
                }
            }
        }
        bound.pop();
    }
}

/// Closed types up to `max` nodes.
pub fn types_up_to(max: usize) -> Vec<Type> {
    let mut out = Vec::new();
    for s in 1..=max {
        types_exact(s, &mut Vec::new(), &mut out);
    }
    out
}

/// Program pools across all sample types, with their types.
pub fn corpus(monad: Monad, max_size: usize) -> Vec<(Term, Type)> {
    type_pool()
        .into_iter()
        .flat_map(|ty| program_pool(monad, &ty, max_size).into_iter().map(move |t| (t, ty.clone())))
        .collect()
}

/// Types used to build configurations.
fn config_types() -> Vec<Type> {
    let base = lolli(tvar("X"), tvar("X"));
    let mut out = type_pool();
    out.push(lolli(tbang(base.clone()), base.clone()));
    out.push(lolli(base.clone(), tbang(base.clone())));
    out.push(tbang(lolli(base.clone(), base)));
    out
}

/// Seeded random typed configurations: up to two copyable computations, up
/// to two linear values and sometimes a computation under evaluation, plus
/// their successors along every enabled action.
pub fn configurations(monad: Monad, count: usize, seed: u64) -> Vec<(Configuration, ConfigType)> {
    let ops = monad.enum_ops();
    let values: Vec<(Term, Type)> = config_types()
        .into_iter()
        .flat_map(|ty| enumerate_values(&TypeEnv::empty(), &ty, 6, &ops).into_iter().map(move |v| (v, ty.clone())))
        .collect();
    let comps: Vec<(Term, Type)> = config_types()
        .into_iter()
        .flat_map(|ty| program_pool(monad, &ty, 5).into_iter().map(move |e| (e, ty.clone())))
        .collect();
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..count {
        let (mut k, mut a) = (
            Configuration { gamma: vec![], theta: vec![], tail: None },
            ConfigType { gamma: vec![], theta: vec![], tail: None },
        );
        for _ in 0..r.gen_range(0..=2) {
            let (e, ty) = comps.choose(&mut r).unwrap().clone();
            k.gamma.push(e);
            a.gamma.push(ty);
        }
        for _ in 0..r.gen_range(0..=2) {
            let (v, ty) = values.choose(&mut r).unwrap().clone();
            k.theta.push(v);
            a.theta.push(ty);
        }
        if r.gen_bool(0.3) {
            let (e, ty) = comps.choose(&mut r).unwrap().clone();
            k.tail = Some(e);
            a.tail = Some(ty);
        }
        out.push((k, a));
    }
    let mut next = Vec::new();
    for (k, a) in &out {
        for act in enabled_actions(a, 2, monad) {
            let beta = b(a, &act).unwrap();
            for l in step(monad, k, &act, 20).unwrap().support() {
                next.push((l.clone(), beta.clone()));
            }
        }
    }
    out.extend(next);
    out.sort();
    out.dedup();
    out
}

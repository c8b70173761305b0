//! Seeded random generation of monad elements and program pairs.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::eval_fuel;
use crate::lang::enumerate::enumerate_comps;
use crate::lang::types::{lolli, tbang, tvar};
use crate::lang::{name, Term, Type, TypeEnv};
use crate::monad::{InputTree, Monad, MonadVal};
use crate::oracle::Pair;
use crate::prelude::{base, omega};

/// Default seed, overridable through `LAMBANG_SEED`.
pub fn seed_from_env() -> u64 {
    std::env::var("LAMBANG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0x5eed)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random element of `T(X)` built from `leaf`.
pub fn random_mval<R: Rng, X: Ord + Clone>(
    monad: Monad,
    rng: &mut R,
    leaf: &mut impl FnMut(&mut R) -> X,
) -> MonadVal<X> {
    match monad {
        Monad::Maybe => MonadVal::Maybe(if rng.gen_bool(0.8) { Some(leaf(rng)) } else { None }),
        Monad::Dist => {
            let n = rng.gen_range(0..=4);
            let weights: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
            let total: u32 = weights.iter().sum::<u32>() + rng.gen_range(0..=3);
            MonadVal::dist(
                weights.into_iter().map(|w| (leaf(rng), BigRational::new(w.into(), total.max(1).into()))),
            )
        }
        Monad::Output => {
            let len = rng.gen_range(0..=3);
            let prefix: String = (0..len).map(|_| *b"abc".choose(rng).unwrap() as char).collect();
            let tail = if rng.gen_bool(0.8) { Some(leaf(rng)) } else { None };
            MonadVal::Output { prefix, tail }
        }
        Monad::Input => MonadVal::Input(random_tree(rng, 3, leaf)),
    }
}

fn random_tree<R: Rng, X>(rng: &mut R, depth: usize, leaf: &mut impl FnMut(&mut R) -> X) -> InputTree<X> {
    match rng.gen_range(0..10) {
        0 | 1 => InputTree::Div,
        2..=5 if depth > 0 => {
            let l = random_tree(rng, depth - 1, leaf);
            let r = random_tree(rng, depth - 1, leaf);
            InputTree::Read(Box::new(l), Box::new(r))
        }
        _ => InputTree::Leaf(leaf(rng)),
    }
}

/// A random Kleisli arrow on `0..n`, as a lookup table.
pub fn random_kleisli<R: Rng>(monad: Monad, rng: &mut R, n: u8) -> BTreeMap<u8, MonadVal<u8>> {
    (0..n).map(|x| (x, random_mval(monad, rng, &mut |r: &mut R| r.gen_range(0..n)))).collect()
}

/// Types that random programs are drawn at.
pub fn type_pool() -> Vec<Type> {
    vec![
        base(),
        tbang(base()),
        lolli(base(), base()),
        lolli(tbang(tvar("X")), tbang(tvar("X"))),
        tbang(tbang(base())),
    ]
}

/// Every closed computation of the pool type with at most `max_size` nodes,
/// drawn from an environment with a non-linear divergent computation `d` of
/// the same type; `d` is then replaced by the divergent term.
pub fn program_pool(monad: Monad, ty: &Type, max_size: usize) -> Vec<Term> {
    let env = TypeEnv::empty().with_nonlinear("d", ty.clone());
    let d = name("d");
    enumerate_comps(&env, ty, max_size, &monad.enum_ops())
        .into_iter()
        .map(|t| t.subst_comp(&d, &omega()))
        .collect()
}

/// `count` random pairs at types from [`type_pool`]. Every other pair is
/// chosen among programs with the same top-level observation.
pub fn random_pairs(monad: Monad, seed: u64, count: usize, max_size: usize, fuel: usize) -> Vec<Pair> {
    let mut rng = rng(seed);
    let pools: Vec<(Type, Vec<Term>)> =
        type_pool().into_iter().map(|ty| (ty.clone(), program_pool(monad, &ty, max_size))).collect();
    let groups: Vec<(usize, Vec<Vec<usize>>)> = pools
        .iter()
        .enumerate()
        .map(|(p, (_, terms))| {
            let mut by_obs: Vec<(crate::monad::Observation, Vec<usize>)> = Vec::new();
            for (i, t) in terms.iter().enumerate() {
                let o = eval_fuel(monad, t, fuel).expect("pool terms are well-typed").obs();
                match by_obs.iter_mut().find(|(q, _)| *q == o) {
                    Some((_, v)) => v.push(i),
                    None => by_obs.push((o, vec![i])),
                }
            }
            (p, by_obs.into_iter().map(|(_, v)| v).filter(|v| v.len() > 1).collect())
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = rng.gen_range(0..pools.len());
        let (ty, terms) = &pools[p];
        if terms.len() < 2 {
            continue;
        }
        let (a, b) = if out.len() % 2 == 1 && !groups[p].1.is_empty() {
            let g = groups[p].1.choose(&mut rng).expect("non-empty");
            let picked: Vec<usize> = g.choose_multiple(&mut rng, 2).copied().collect();
            (picked[0], picked[1])
        } else {
            let picked: Vec<usize> = (0..terms.len()).collect::<Vec<_>>().choose_multiple(&mut rng, 2).copied().collect();
            (picked[0], picked[1])
        };
        out.push(Pair { lhs: terms[a].clone(), rhs: terms[b].clone(), ty: ty.clone() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::typecheck_comp;

    #[test]
    fn pairs_are_reproducible_and_well_typed() {
        let a = random_pairs(Monad::Dist, 7, 10, 5, 20);
        let b = random_pairs(Monad::Dist, 7, 10, 5, 20);
        assert_eq!(a, b);
        for p in &a {
            assert_eq!(typecheck_comp(&TypeEnv::empty(), &p.lhs, &p.ty), Ok(()));
            assert_eq!(typecheck_comp(&TypeEnv::empty(), &p.rhs, &p.ty), Ok(()));
        }
    }

    #[test]
    fn random_dist_is_a_subdistribution() {
        let mut r = rng(1);
        for _ in 0..200 {
            let m = random_mval(Monad::Dist, &mut r, &mut |r: &mut ChaCha8Rng| r.gen_range(0u8..5));
            assert!(m.mass().unwrap() <= BigRational::from_integer(1.into()));
        }
    }
}

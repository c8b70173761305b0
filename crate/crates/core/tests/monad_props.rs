use std::collections::BTreeMap;

use lambang::lang::OpSym;
use lambang::monad::{InputTree, Monad, MonadVal};
use lambang::sample::{random_kleisli, random_mval, rng};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type K = BTreeMap<u8, MonadVal<u8>>;

fn val(monad: Monad, r: &mut ChaCha8Rng) -> MonadVal<u8> {
    random_mval(monad, r, &mut |r: &mut ChaCha8Rng| r.gen_range(0u8..4))
}

fn kl(monad: Monad, r: &mut ChaCha8Rng) -> K {
    random_kleisli(monad, r, 4)
}

fn apply(f: &K) -> impl Fn(&u8) -> MonadVal<u8> + '_ {
    move |x| f[x].clone()
}

/// A random element below `m` in the monad's order.
fn below<X: Ord + Clone>(m: &MonadVal<X>, r: &mut ChaCha8Rng) -> MonadVal<X> {
    match m {
        MonadVal::Maybe(x) => MonadVal::Maybe(if r.gen_bool(0.5) { x.clone() } else { None }),
        MonadVal::Dist(d) => MonadVal::dist(d.iter().filter_map(|(x, p)| {
            let keep = BigRational::new(r.gen_range(0..=3).into(), 3.into());
            r.gen_bool(0.7).then(|| (x.clone(), p * keep))
        })),
        MonadVal::Output { prefix, .. } => {
            if r.gen_bool(0.5) {
                m.clone()
            } else {
                let cut = r.gen_range(0..=prefix.len());
                MonadVal::Output { prefix: prefix[..cut].to_string(), tail: None }
            }
        }
        MonadVal::Input(t) => MonadVal::Input(tree_below(t, r)),
    }
}

fn tree_below<X: Clone>(t: &InputTree<X>, r: &mut ChaCha8Rng) -> InputTree<X> {
    if r.gen_bool(0.25) {
        return InputTree::Div;
    }
    match t {
        InputTree::Read(a, b) => InputTree::Read(Box::new(tree_below(a, r)), Box::new(tree_below(b, r))),
        _ => t.clone(),
    }
}

fn op_for(monad: Monad, r: &mut ChaCha8Rng) -> Option<OpSym> {
    match monad {
        Monad::Maybe => None,
        Monad::Dist => Some(OpSym::Choice),
        Monad::Output => Some(OpSym::Print(['a', 'b', 'z'][r.gen_range(0..3)])),
        Monad::Input => Some(OpSym::Read),
    }
}

fn monad_strategy() -> impl Strategy<Value = Monad> {
    prop::sample::select(Monad::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kleisli_laws(monad in monad_strategy(), seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (m, f, g) = (val(monad, r), kl(monad, r), kl(monad, r));
        let x = r.gen_range(0u8..4);
        prop_assert_eq!(MonadVal::unit(monad, x).bind(apply(&f)), f[&x].clone());
        prop_assert_eq!(m.bind(|x| MonadVal::unit(monad, *x)), m.clone());
        prop_assert_eq!(
            m.bind(apply(&f)).bind(apply(&g)),
            m.bind(|x| f[x].bind(apply(&g)))
        );
    }

    #[test]
    fn operations_are_algebraic(monad in monad_strategy(), seed in any::<u64>()) {
        let r = &mut rng(seed);
        let Some(op) = op_for(monad, r) else { return Ok(()) };
        let args: Vec<_> = (0..op.arity()).map(|_| val(monad, r)).collect();
        let f = kl(monad, r);
        let lhs = MonadVal::apply_op(op, args.clone()).unwrap().bind(apply(&f));
        let rhs = MonadVal::apply_op(op, args.iter().map(|m| m.bind(apply(&f))).collect()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bind_is_monotone_and_strict(monad in monad_strategy(), seed in any::<u64>()) {
        let r = &mut rng(seed);
        let (n, f) = (val(monad, r), kl(monad, r));
        let m = below(&n, r);
        prop_assert!(m.leq(&n));
        prop_assert!(m.bind(apply(&f)).leq(&n.bind(apply(&f))));
        let g: K = f.iter().map(|(x, v)| (*x, below(v, r))).collect();
        prop_assert!(n.bind(apply(&g)).leq(&n.bind(apply(&f))));
        prop_assert!(MonadVal::<u8>::bottom(monad).bind(apply(&f)).is_bottom());
        prop_assert!(MonadVal::<u8>::bottom(monad).leq(&n));
    }

    #[test]
    fn obs_is_monotone(monad in monad_strategy(), seed in any::<u64>()) {
        let r = &mut rng(seed);
        let n = val(monad, r);
        let m = below(&n, r);
        prop_assert!(m.obs().leq(&n.obs()));
        prop_assert!(MonadVal::<u8>::bottom(monad).obs().is_bottom());
        prop_assert_eq!(MonadVal::unit(monad, 3u8).obs(), MonadVal::unit(monad, ()));
    }

    #[test]
    fn order_is_a_partial_order(monad in monad_strategy(), seed in any::<u64>()) {
        let r = &mut rng(seed);
        let c = val(monad, r);
        let b = below(&c, r);
        let a = below(&b, r);
        prop_assert!(c.leq(&c));
        prop_assert!(a.leq(&c));
        let d = val(monad, r);
        if c.leq(&d) && d.leq(&c) {
            prop_assert_eq!(c, d);
        }
    }

    #[test]
    fn dist_mass_stays_below_one(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let one = BigRational::one();
        let (m, n, f) = (val(Monad::Dist, r), val(Monad::Dist, r), kl(Monad::Dist, r));
        prop_assert!(m.bind(apply(&f)).mass().unwrap() <= one);
        prop_assert!(MonadVal::apply_op(OpSym::Choice, vec![m, n]).unwrap().mass().unwrap() <= one);
    }
}

#[test]
fn mixing_monads_is_an_error() {
    let a = MonadVal::unit(Monad::Dist, 1u8);
    let b = MonadVal::unit(Monad::Maybe, 1u8);
    assert!(MonadVal::apply_op(OpSym::Choice, vec![a.clone(), b]).is_err());
    assert!(MonadVal::apply_op(OpSym::Read, vec![a.clone(), a.clone()]).is_err());
    assert!(MonadVal::apply_op(OpSym::Choice, vec![a]).is_err());
}

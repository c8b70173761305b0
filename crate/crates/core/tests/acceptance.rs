//! One line per acceptance criterion. All comparisons are exact (tolerance 0).

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use lambang::eval::eval;
use lambang::lang::parse::parse_comp;
use lambang::lang::OpSym;
use lambang::monad::{mval_eq, InputTree, Monad, MonadVal};
use lambang::oracle::{cross_check, ctx_equiv, CtxBounds};
use lambang::prelude::{bang_dist, copy_twice_context, lambda_dist};
use lambang::rts::{ConfigType, Configuration};
use lambang::sample::{random_kleisli, random_mval, random_pairs, rng, seed_from_env};
use lambang::trace::{render_trace, st, st_star, trace_equiv_comps, trace_set, TraceBounds, TraceWitness, Verdict};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn ratio(n: i64, d: i64) -> MonadVal<()> {
    MonadVal::dist([((), BigRational::new(n.into(), d.into()))])
}

fn lambda_dist_check() -> Result<String, String> {
    let p = lambda_dist();
    let tb = TraceBounds { depth: 6, ctx_size: 3, fuel: 50 };
    let t = trace_equiv_comps(Monad::Dist, &p.lhs, &p.ty, &p.rhs, &p.ty, tb).map_err(|e| e.to_string())?;
    let c = ctx_equiv(Monad::Dist, &p.lhs, &p.rhs, &p.ty, CtxBounds { ctx_size: 7, fuel: 50 }).map_err(|e| e.to_string())?;
    let msg = format!("trace {} ({} nodes), ctx {} ({} contexts)", t.verdict.as_str(), t.explored, c.verdict.as_str(), c.explored);
    if t.verdict == Verdict::EquivalentUpToBounds && c.verdict == Verdict::EquivalentUpToBounds {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bang_dist_check() -> Result<String, String> {
    let p = bang_dist();
    let (quarter, half) = (ratio(1, 4), ratio(1, 2));
    let tb = TraceBounds { depth: 6, ctx_size: 3, fuel: 50 };
    let t = trace_equiv_comps(Monad::Dist, &p.lhs, &p.ty, &p.rhs, &p.ty, tb).map_err(|e| e.to_string())?;
    let Some(TraceWitness::Trace { trace, lhs, rhs }) = &t.witness else {
        return Err(format!("trace checker: {}", t.verdict.as_str()));
    };
    let c = ctx_equiv(Monad::Dist, &p.lhs, &p.rhs, &p.ty, CtxBounds { ctx_size: 9, fuel: 50 }).map_err(|e| e.to_string())?;
    let Some(w) = &c.witness else {
        return Err(format!("context oracle: {}", c.verdict.as_str()));
    };
    let msg = format!(
        "trace {} gives {} vs {}; context `{}` (size {}) gives {} vs {}",
        render_trace(trace),
        lhs,
        rhs,
        w.context,
        w.context.size(),
        w.lhs,
        w.rhs
    );
    let copy_twice = copy_twice_context();
    let ok = *lhs == quarter
        && *rhs == half
        && w.lhs == quarter
        && w.rhs == half
        && w.context.size() <= copy_twice.size();
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn monad_laws() -> Result<String, String> {
    const N: usize = 1000;
    let mut r = rng(seed_from_env());
    let mut checked = 0;
    for monad in Monad::ALL {
        for _ in 0..N {
            let m = random_mval(monad, &mut r, &mut |r: &mut ChaCha8Rng| r.gen_range(0u8..4));
            let f = random_kleisli(monad, &mut r, 4);
            let g = random_kleisli(monad, &mut r, 4);
            let x = r.gen_range(0u8..4);
            let app = |k: &BTreeMap<u8, MonadVal<u8>>, x: &u8| k[x].clone();
            if !mval_eq(&MonadVal::unit(monad, x).bind(|y| app(&f, y)), &f[&x]) {
                return Err(format!("{monad}: left unit fails"));
            }
            if !mval_eq(&m.bind(|y| MonadVal::unit(monad, *y)), &m) {
                return Err(format!("{monad}: right unit fails"));
            }
            let l = m.bind(|y| app(&f, y)).bind(|y| app(&g, y));
            let rr = m.bind(|y| f[y].bind(|z| app(&g, z)));
            if !mval_eq(&l, &rr) {
                return Err(format!("{monad}: associativity fails"));
            }
            let op = match monad {
                Monad::Maybe => None,
                Monad::Dist => Some(OpSym::Choice),
                Monad::Output => Some(OpSym::Print('a')),
                Monad::Input => Some(OpSym::Read),
            };
            if let Some(op) = op {
                let args: Vec<_> = (0..op.arity())
                    .map(|_| random_mval(monad, &mut r, &mut |r: &mut ChaCha8Rng| r.gen_range(0u8..4)))
                    .collect();
                let lhs = MonadVal::apply_op(op, args.clone()).map_err(|e| e.to_string())?.bind(|y| app(&f, y));
                let rhs = MonadVal::apply_op(op, args.iter().map(|a| a.bind(|y| app(&f, y))).collect())
                    .map_err(|e| e.to_string())?;
                if !mval_eq(&lhs, &rhs) {
                    return Err(format!("{monad}: {op} is not algebraic"));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} elements, {N} per monad, 3 laws + algebraicity"))
}

fn omega_chain() -> Result<String, String> {
    let mut counts = Vec::new();
    for monad in Monad::ALL {
        let size = if monad == Monad::Maybe { 8 } else { 7 };
        let corpus = common::corpus(monad, size);
        if corpus.len() < 200 {
            return Err(format!("{monad}: only {} terms", corpus.len()));
        }
        for (e, _) in &corpus {
            let mut prev = lambang::eval::eval_fuel(monad, e, 0).map_err(|x| x.to_string())?;
            for k in 0..=30 {
                let next = lambang::eval::eval_fuel(monad, e, k + 1).map_err(|x| x.to_string())?;
                if !prev.leq(&next) {
                    return Err(format!("{monad}: {e} decreases at fuel {k}"));
                }
                prev = next;
            }
        }
        counts.push(format!("{monad} {}", corpus.len()));
    }
    Ok(format!("k = 0..30 on {} terms", counts.join(", ")))
}

fn pointwise_st() -> Result<String, String> {
    const N: usize = 500;
    const FUEL: usize = 15;
    let mut r = rng(seed_from_env());
    let mut total = 0;
    for monad in Monad::ALL {
        let mut by_type: BTreeMap<ConfigType, Vec<Configuration>> = BTreeMap::new();
        for (k, a) in common::configurations(monad, 200, seed_from_env()) {
            by_type.entry(a).or_default().push(k);
        }
        let groups: Vec<(Vec<Configuration>, Vec<Vec<_>>)> =
            by_type.into_iter().map(|(a, ks)| (ks, trace_set(&a, 3, 2, monad))).collect();
        for _ in 0..N {
            let (ks, traces) = groups.choose(&mut r).unwrap();
            let t = traces.choose(&mut r).unwrap();
            let kappa = random_mval(monad, &mut r, &mut |r: &mut ChaCha8Rng| ks.choose(r).unwrap().clone());
            let lhs = st_star(&kappa, t, FUEL).map_err(|e| e.to_string())?;
            let rhs = kappa.try_bind(|k| st(monad, k, t, FUEL)).map_err(|e| e.to_string())?;
            if !mval_eq(&lhs, &rhs) {
                return Err(format!("{monad}: differs on {}", render_trace(t)));
            }
            total += 1;
        }
    }
    Ok(format!("{total} (kappa, t) pairs, {N} per monad"))
}

fn cross_check_run() -> Result<String, String> {
    let seed = seed_from_env();
    let pairs = random_pairs(Monad::Dist, seed, 200, 6, 40);
    let r = cross_check(
        Monad::Dist,
        &pairs,
        TraceBounds { depth: 5, ctx_size: 3, fuel: 40 },
        CtxBounds { ctx_size: 6, fuel: 40 },
    )
    .map_err(|e| e.to_string())?;
    let ctx_distinguished = r.outcomes.iter().filter(|o| o.ctx.verdict == Verdict::Distinguished).count();
    let msg = format!(
        "seed {seed}: {} pairs, {} soundness violations; {} context-distinguished, all trace-distinguished at depth 5 / ctx 3: {}; {} trace-only distinctions",
        r.outcomes.len(),
        r.violations.len(),
        ctx_distinguished,
        r.violations.is_empty(),
        r.ctx_incomplete.len()
    );
    if r.violations.is_empty() && r.outcomes.len() == 200 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn output_input() -> Result<String, String> {
    let parse = |s: &str| parse_comp(s, None).map_err(|e| e.to_string());
    let val = |s: &str| -> Result<_, String> {
        let r = eval(Monad::Maybe, &parse(s)?, 5).map_err(|e| e.to_string())?;
        r.value.support().first().map(|v| (*v).clone()).ok_or_else(|| format!("{s} diverges"))
    };
    let (v, u, w) = (val("return \\y. return y")?, val("return \\y. return y")?, val("return \\y. let z = return y in return z")?);
    let out = eval(Monad::Output, &parse("print_a(print_b(return \\y. return y))")?, 10).map_err(|e| e.to_string())?;
    let inp = eval(Monad::Input, &parse("read(return \\y. return y, return \\y. let z = return y in return z)")?, 10)
        .map_err(|e| e.to_string())?;
    let want_out = MonadVal::Output { prefix: "ab".into(), tail: Some(v) };
    let want_in = MonadVal::Input(InputTree::Read(Box::new(InputTree::Leaf(u)), Box::new(InputTree::Leaf(w))));
    let show = |t: &lambang::lang::Term| t.to_string();
    let msg = format!("{} ; {}", out.value.render(&show), inp.value.render(&show));
    if out.value == want_out && inp.value == want_in {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    type Check = fn() -> Result<String, String>;
    let criteria: [(&str, Check, Duration); 7] = [
        ("1 lambda-dist equivalent", lambda_dist_check, Duration::from_secs(300)),
        ("2 bang-dist 1/4 vs 1/2", bang_dist_check, Duration::from_secs(600)),
        ("3 monad laws", monad_laws, Duration::from_secs(60)),
        ("4 fuel omega-chain", omega_chain, Duration::from_secs(120)),
        ("5 pointwise st", pointwise_st, Duration::from_secs(120)),
        ("6 cross-check soundness", cross_check_run, Duration::from_secs(1800)),
        ("7 output/input values", output_input, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took longer than {limit:?}")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{name}] {detail} ({:.2}s, limit {}s, tolerance 0)", took.as_secs_f64(), limit.as_secs());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lambang::eval::eval;
use lambang::lang::parse::{parse_program_with, Def, Program};
use lambang::lang::Term;
use lambang::monad::{Alphabet, Monad};
use lambang::oracle::{cross_check, ctx_equiv, CtxBounds, Pair};
use lambang::rts::ConfigType;
use lambang::sample::random_pairs;
use lambang::trace::{render_trace, trace_equiv_comps, trace_set, TraceBounds, TraceWitness, Verdict};

#[derive(Parser)]
#[command(name = "lambang", version, about = "Typecheck, run and compare programs of a linear effectful lambda calculus")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Letters that `print_c` may use.
    #[arg(long, global = true, default_value_t = Alphabet::default())]
    alphabet: Alphabet,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and typecheck every definition of a file.
    Check {
        file: PathBuf,
        #[arg(long)]
        monad: Option<Monad>,
    },
    /// Evaluate the main definition with a fuel budget.
    Eval {
        file: PathBuf,
        #[arg(long, default_value = "dist")]
        monad: Monad,
        #[arg(long, default_value_t = 100)]
        fuel: usize,
    },
    /// List the traces of the main definition's configuration type.
    Traces {
        file: PathBuf,
        #[arg(long, default_value = "dist")]
        monad: Monad,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        ctx_size: usize,
    },
    /// Bounded trace equivalence of the main definitions of two files.
    TraceEquiv {
        lhs: PathBuf,
        rhs: PathBuf,
        #[arg(long, default_value = "dist")]
        monad: Monad,
        #[command(flatten)]
        bounds: TraceArgs,
    },
    /// Bounded contextual equivalence of the main definitions of two files.
    CtxEquiv {
        lhs: PathBuf,
        rhs: PathBuf,
        #[arg(long, default_value = "dist")]
        monad: Monad,
        #[arg(long, default_value_t = 7)]
        ctx_size: usize,
        #[arg(long, default_value_t = 50)]
        fuel: usize,
    },
    /// Run both equivalence checkers on a corpus and report disagreements.
    CrossCheck {
        /// File with one pair of program paths per line. Without it, random
        /// pairs are generated.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, env = "LAMBANG_SEED", default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Largest random program, in AST nodes.
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value = "dist")]
        monad: Monad,
        #[command(flatten)]
        bounds: CrossArgs,
        /// Largest context tried by the contextual oracle.
        #[arg(long, default_value_t = 6)]
        oracle_size: usize,
    },
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 3)]
    ctx_size: usize,
    #[arg(long, default_value_t = 50)]
    fuel: usize,
}

impl TraceArgs {
    fn bounds(&self) -> TraceBounds {
        TraceBounds { depth: self.depth, ctx_size: self.ctx_size, fuel: self.fuel }
    }
}

#[derive(Args)]
struct CrossArgs {
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[arg(long, default_value_t = 3)]
    ctx_size: usize,
    /// Shared by both checkers.
    #[arg(long, default_value_t = 40)]
    fuel: usize,
}

impl CrossArgs {
    fn bounds(&self) -> TraceBounds {
        TraceBounds { depth: self.depth, ctx_size: self.ctx_size, fuel: self.fuel }
    }
}

/// A failure that maps to exit code 2.
struct Failure(String);

fn load_program(path: &Path, monad: Option<Monad>, alphabet: &Alphabet) -> Result<Program, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let prog =
        parse_program_with(&src, monad, alphabet).map_err(|e| Failure(format!("{}:{e}", path.display())))?;
    prog.check()
        .map_err(|(name, e)| Failure(format!("{}: definition `{name}`: {e}", path.display())))?;
    Ok(prog)
}

/// The main definition, as a computation.
fn load(path: &Path, monad: Option<Monad>, alphabet: &Alphabet) -> Result<Def, Failure> {
    let prog = load_program(path, monad, alphabet)?;
    let mut main = prog.main().expect("non-empty program").clone();
    if main.term.is_value() {
        main.term = Term::Return(Box::new(main.term));
    }
    Ok(main)
}

fn show_term(t: &Term) -> serde_json::Value {
    json!(t.to_string())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let out = |text: String, value: serde_json::Value| {
        if cli.json {
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        } else {
            println!("{text}");
        }
    };
    let ab = &cli.alphabet;
    match &cli.cmd {
        Cmd::Check { file, monad } => {
            let prog = load_program(file, *monad, ab)?;
            let lines: Vec<String> = prog.defs.iter().map(|d| format!("{} : {}", d.name, d.ty)).collect();
            let defs: Vec<_> = prog.defs.iter().map(|d| json!({"name": d.name, "type": d.ty.to_string()})).collect();
            out(format!("ok\n{}", lines.join("\n")), json!({"ok": true, "defs": defs}));
            Ok(true)
        }
        Cmd::Eval { file, monad, fuel } => {
            let main = load(file, Some(*monad), ab)?;
            let r = eval(*monad, &main.term, *fuel).map_err(|e| Failure(e.to_string()))?;
            let text = format!(
                "{}\nfuel {}{}",
                r.value.render(&|t: &Term| t.to_string()),
                r.fuel_used,
                if r.stabilized { ", stabilized" } else { "" }
            );
            out(
                text,
                json!({"result": r.value.to_json(&show_term), "fuel": r.fuel_used, "stabilized": r.stabilized}),
            );
            Ok(true)
        }
        Cmd::Traces { file, monad, depth, ctx_size } => {
            let main = load(file, Some(*monad), ab)?;
            let traces = trace_set(&ConfigType::of_comp(main.ty.clone()), *depth, *ctx_size, *monad);
            let text = traces.iter().map(|t| render_trace(t)).collect::<Vec<_>>().join("\n");
            let value: Vec<Vec<String>> =
                traces.iter().map(|t| t.iter().map(|a| a.to_string()).collect()).collect();
            out(text, json!({"traces": value}));
            Ok(true)
        }
        Cmd::TraceEquiv { lhs, rhs, monad, bounds } => {
            let (a, b) = (load(lhs, Some(*monad), ab)?, load(rhs, Some(*monad), ab)?);
            let r = trace_equiv_comps(*monad, &a.term, &a.ty, &b.term, &b.ty, bounds.bounds())
                .map_err(|e| Failure(e.to_string()))?;
            let mut text = r.verdict.as_str().to_string();
            match &r.witness {
                Some(TraceWitness::Trace { trace, lhs, rhs }) => {
                    text += &format!("\ntrace: {}\nlhs: {lhs}\nrhs: {rhs}", render_trace(trace));
                }
                Some(TraceWitness::Types { lhs, rhs }) => {
                    text += &format!("\ntypes differ: {lhs} vs {rhs}");
                }
                None => {}
            }
            out(text, r.to_json());
            Ok(r.verdict == Verdict::EquivalentUpToBounds)
        }
        Cmd::CtxEquiv { lhs, rhs, monad, ctx_size, fuel } => {
            let (a, b) = (load(lhs, Some(*monad), ab)?, load(rhs, Some(*monad), ab)?);
            if !lambang::lang::type_eq(&a.ty, &b.ty) {
                return Err(Failure(format!("the programs have different types: {} and {}", a.ty, b.ty)));
            }
            let r = ctx_equiv(*monad, &a.term, &b.term, &a.ty, CtxBounds { ctx_size: *ctx_size, fuel: *fuel })
                .map_err(|e| Failure(e.to_string()))?;
            let mut text = r.verdict.as_str().to_string();
            if let Some(w) = &r.witness {
                text += &format!("\ncontext: {}\nlhs: {}\nrhs: {}", w.context, w.lhs, w.rhs);
            }
            out(text, r.to_json());
            Ok(r.verdict == Verdict::EquivalentUpToBounds)
        }
        Cmd::CrossCheck { corpus, seed, count, max_size, monad, bounds, oracle_size } => {
            let pairs = match corpus {
                Some(path) => read_corpus(path, *monad, ab)?,
                None => random_pairs(*monad, *seed, *count, *max_size, bounds.fuel),
            };
            let ctx = CtxBounds { ctx_size: *oracle_size, fuel: bounds.fuel };
            let r = cross_check(*monad, &pairs, bounds.bounds(), ctx).map_err(|e| Failure(e.to_string()))?;
            let mut text = format!(
                "pairs: {}\nsoundness violations: {}\ntrace-distinguished only: {}\nboth equivalent: {}\nboth distinguished: {}",
                r.outcomes.len(),
                r.violations.len(),
                r.ctx_incomplete.len(),
                r.count(Verdict::EquivalentUpToBounds, Verdict::EquivalentUpToBounds),
                r.count(Verdict::Distinguished, Verdict::Distinguished),
            );
            for &i in &r.violations {
                let p = &r.outcomes[i].pair;
                text += &format!("\nviolation: {} vs {} : {}", p.lhs, p.rhs, p.ty);
            }
            let mut value = r.to_json();
            value["seed"] = json!(seed);
            out(text, value);
            Ok(r.violations.is_empty())
        }
    }
}

fn read_corpus(path: &Path, monad: Monad, ab: &Alphabet) -> Result<Vec<Pair>, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut pairs = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let files: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = files[..] else {
            return Err(Failure(format!("{}:{}: expected two paths", path.display(), n + 1)));
        };
        let (a, b) = (load(&dir.join(a), Some(monad), ab)?, load(&dir.join(b), Some(monad), ab)?);
        if !lambang::lang::type_eq(&a.ty, &b.ty) {
            return Err(Failure(format!("{}:{}: the programs have different types", path.display(), n + 1)));
        }
        pairs.push(Pair { lhs: a.term, rhs: b.term, ty: a.ty });
    }
    Ok(pairs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

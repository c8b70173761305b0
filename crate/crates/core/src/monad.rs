//! The four effect monads, each with finite normal forms.
//!
//! Elements are ordered (every monad here is an ω-cppo) and every monad
//! comes with its own operation symbols. Probabilities are exact rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::convert::Infallible;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::lang::OpSym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Monad {
    Maybe,
    Dist,
    Output,
    Input,
}

impl Monad {
    pub const ALL: [Monad; 4] = [Monad::Maybe, Monad::Dist, Monad::Output, Monad::Input];

    pub fn supports(self, op: OpSym, alphabet: &Alphabet) -> bool {
        match (self, op) {
            (Monad::Dist, OpSym::Choice) | (Monad::Input, OpSym::Read) => true,
            (Monad::Output, OpSym::Print(c)) => alphabet.contains(c),
            _ => false,
        }
    }

    /// Operations used when generating terms. Output uses `a` and `b` only.
    pub fn enum_ops(self) -> Vec<OpSym> {
        match self {
            Monad::Maybe => vec![],
            Monad::Dist => vec![OpSym::Choice],
            Monad::Output => vec![OpSym::Print('a'), OpSym::Print('b')],
            Monad::Input => vec![OpSym::Read],
        }
    }
}

/// Letters available to `print_c` in the output monad; `a..z` by default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet(BTreeSet<char>);

impl Alphabet {
    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.0.iter().copied()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet(('a'..='z').collect())
    }
}

impl FromStr for Alphabet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(c) = s.chars().find(|c| !c.is_ascii_alphanumeric()) {
            return Err(format!("`{c}` cannot be an output letter (ASCII letters and digits only)"));
        }
        if s.is_empty() {
            return Err("the output alphabet is empty".into());
        }
        Ok(Alphabet(s.chars().collect()))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

impl fmt::Display for Monad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monad::Maybe => "maybe",
            Monad::Dist => "dist",
            Monad::Output => "output",
            Monad::Input => "input",
        })
    }
}

impl FromStr for Monad {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "maybe" => Ok(Monad::Maybe),
            "dist" => Ok(Monad::Dist),
            "output" => Ok(Monad::Output),
            "input" => Ok(Monad::Input),
            _ => Err(format!("unknown monad `{s}` (expected maybe, dist, output or input)")),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MonadError {
    #[error("operation `{op}` is not available in the {monad} monad")]
    UnknownOp { op: OpSym, monad: Monad },
    #[error("operation `{op}` expects {expected} argument(s), got {got}")]
    Arity { op: OpSym, expected: usize, got: usize },
    #[error("cannot combine elements of different monads")]
    Mixed,
}

/// Finite binary trees of input requests.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputTree<X> {
    Leaf(X),
    Div,
    Read(Box<InputTree<X>>, Box<InputTree<X>>),
}

/// An element of `T(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonadVal<X: Ord> {
    Maybe(Option<X>),
    /// Subdistribution; every stored weight is positive.
    Dist(BTreeMap<X, BigRational>),
    /// Output produced so far, then `Some(x)` on termination or `None`.
    Output { prefix: String, tail: Option<X> },
    Input(InputTree<X>),
}

/// Elements of `T(1)`.
pub type Observation = MonadVal<()>;

/// Equality of normal forms.
pub fn mval_eq<X: Ord>(a: &MonadVal<X>, b: &MonadVal<X>) -> bool {
    a == b
}

impl<X: Ord + Clone> MonadVal<X> {
    pub fn unit(monad: Monad, x: X) -> Self {
        match monad {
            Monad::Maybe => MonadVal::Maybe(Some(x)),
            Monad::Dist => MonadVal::Dist(BTreeMap::from([(x, BigRational::one())])),
            Monad::Output => MonadVal::Output { prefix: String::new(), tail: Some(x) },
            Monad::Input => MonadVal::Input(InputTree::Leaf(x)),
        }
    }

    pub fn bottom(monad: Monad) -> Self {
        match monad {
            Monad::Maybe => MonadVal::Maybe(None),
            Monad::Dist => MonadVal::Dist(BTreeMap::new()),
            Monad::Output => MonadVal::Output { prefix: String::new(), tail: None },
            Monad::Input => MonadVal::Input(InputTree::Div),
        }
    }

    pub fn monad(&self) -> Monad {
        match self {
            MonadVal::Maybe(_) => Monad::Maybe,
            MonadVal::Dist(_) => Monad::Dist,
            MonadVal::Output { .. } => Monad::Output,
            MonadVal::Input(_) => Monad::Input,
        }
    }

    pub fn is_bottom(&self) -> bool {
        *self == Self::bottom(self.monad())
    }

    /// Build a subdistribution, merging duplicate keys and dropping zeros.
    pub fn dist(entries: impl IntoIterator<Item = (X, BigRational)>) -> Self {
        let mut m: BTreeMap<X, BigRational> = BTreeMap::new();
        for (x, p) in entries {
            *m.entry(x).or_insert_with(BigRational::zero) += p;
        }
        m.retain(|_, p| !p.is_zero());
        MonadVal::Dist(m)
    }

    pub fn bind<Y: Ord + Clone>(&self, mut f: impl FnMut(&X) -> MonadVal<Y>) -> MonadVal<Y> {
        match self.try_bind(|x| Ok::<_, Infallible>(f(x))) {
            Ok(v) => v,
            Err(never) => match never {},
        }
    }

    /// Bind with a fallible continuation. Panics if the continuation returns
    /// an element of another monad.
    pub fn try_bind<Y: Ord + Clone, E>(
        &self,
        mut f: impl FnMut(&X) -> Result<MonadVal<Y>, E>,
    ) -> Result<MonadVal<Y>, E> {
        Ok(match self {
            MonadVal::Maybe(None) => MonadVal::Maybe(None),
            MonadVal::Maybe(Some(x)) => {
                let r = f(x)?;
                assert_eq!(r.monad(), Monad::Maybe, "bind across monads");
                r
            }
            MonadVal::Dist(m) => {
                let mut out: BTreeMap<Y, BigRational> = BTreeMap::new();
                for (x, p) in m {
                    match f(x)? {
                        MonadVal::Dist(n) => {
                            for (y, q) in n {
                                *out.entry(y).or_insert_with(BigRational::zero) += p * q;
                            }
                        }
                        _ => panic!("bind across monads"),
                    }
                }
                out.retain(|_, p| !p.is_zero());
                MonadVal::Dist(out)
            }
            MonadVal::Output { prefix, tail: None } => {
                MonadVal::Output { prefix: prefix.clone(), tail: None }
            }
            MonadVal::Output { prefix, tail: Some(x) } => match f(x)? {
                MonadVal::Output { prefix: p2, tail } => {
                    MonadVal::Output { prefix: format!("{prefix}{p2}"), tail }
                }
                _ => panic!("bind across monads"),
            },
            MonadVal::Input(t) => MonadVal::Input(graft(t, &mut f)?),
        })
    }

    pub fn map<Y: Ord + Clone>(&self, mut f: impl FnMut(&X) -> Y) -> MonadVal<Y> {
        let monad = self.monad();
        self.bind(|x| MonadVal::unit(monad, f(x)))
    }

    /// Interpret an operation symbol.
    pub fn apply_op(op: OpSym, args: Vec<MonadVal<X>>) -> Result<Self, MonadError> {
        if args.len() != op.arity() {
            return Err(MonadError::Arity { op, expected: op.arity(), got: args.len() });
        }
        let monad = args[0].monad();
        if args.iter().any(|a| a.monad() != monad) {
            return Err(MonadError::Mixed);
        }
        if !matches!(
            (monad, op),
            (Monad::Dist, OpSym::Choice) | (Monad::Input, OpSym::Read) | (Monad::Output, OpSym::Print(_))
        ) {
            return Err(MonadError::UnknownOp { op, monad });
        }
        let mut it = args.into_iter();
        Ok(match (op, it.next().expect("arity checked")) {
            (OpSym::Choice, MonadVal::Dist(a)) => {
                let half = BigRational::new(1.into(), 2.into());
                let b = match it.next() {
                    Some(MonadVal::Dist(b)) => b,
                    _ => unreachable!("monad checked"),
                };
                let entries = a.into_iter().chain(b).map(|(x, p)| (x, p * &half));
                MonadVal::dist(entries)
            }
            (OpSym::Print(c), MonadVal::Output { prefix, tail }) => {
                MonadVal::Output { prefix: format!("{c}{prefix}"), tail }
            }
            (OpSym::Read, MonadVal::Input(l)) => {
                let r = match it.next() {
                    Some(MonadVal::Input(r)) => r,
                    _ => unreachable!("monad checked"),
                };
                MonadVal::Input(InputTree::Read(Box::new(l), Box::new(r)))
            }
            _ => unreachable!("support checked"),
        })
    }

    /// The order of the monad.
    pub fn leq(&self, other: &Self) -> bool {
        match (self, other) {
            (MonadVal::Maybe(None), MonadVal::Maybe(_)) => true,
            (MonadVal::Maybe(a), MonadVal::Maybe(b)) => a == b,
            (MonadVal::Dist(a), MonadVal::Dist(b)) => {
                a.iter().all(|(x, p)| b.get(x).is_some_and(|q| p <= q))
            }
            (MonadVal::Output { prefix: o1, tail: None }, MonadVal::Output { prefix: o2, .. }) => {
                o2.starts_with(o1.as_str())
            }
            (MonadVal::Output { prefix: o1, tail: t1 }, MonadVal::Output { prefix: o2, tail: t2 }) => {
                o1 == o2 && t1 == t2
            }
            (MonadVal::Input(a), MonadVal::Input(b)) => tree_leq(a, b),
            _ => false,
        }
    }

    /// Forget results, keeping only the effects.
    #[allow(clippy::unit_return_expecting_ord)]
    pub fn obs(&self) -> Observation {
        self.map(|_| ())
    }

    /// Total probability mass of a subdistribution.
    pub fn mass(&self) -> Option<BigRational> {
        match self {
            MonadVal::Dist(m) => Some(m.values().fold(BigRational::zero(), |acc, p| acc + p)),
            _ => None,
        }
    }

    pub fn support(&self) -> Vec<&X> {
        match self {
            MonadVal::Maybe(x) => x.iter().collect(),
            MonadVal::Dist(m) => m.keys().collect(),
            MonadVal::Output { tail, .. } => tail.iter().collect(),
            MonadVal::Input(t) => {
                let mut out = Vec::new();
                leaves(t, &mut out);
                out
            }
        }
    }

    pub fn to_json(&self, show: &impl Fn(&X) -> Json) -> Json {
        match self {
            MonadVal::Maybe(x) => json!({"monad": "maybe", "value": x.as_ref().map(show)}),
            MonadVal::Dist(m) => json!({
                "monad": "dist",
                "entries": m.iter().map(|(x, p)| json!({"value": show(x), "prob": p.to_string()})).collect::<Vec<_>>(),
                "mass": m.values().sum::<BigRational>().to_string(),
            }),
            MonadVal::Output { prefix, tail } => {
                json!({"monad": "output", "prefix": prefix, "value": tail.as_ref().map(show)})
            }
            MonadVal::Input(t) => json!({"monad": "input", "tree": tree_json(t, show)}),
        }
    }

    pub fn render(&self, show: &impl Fn(&X) -> String) -> String {
        match self {
            MonadVal::Maybe(Some(x)) => format!("Conv {}", show(x)),
            MonadVal::Maybe(None) => "Div".into(),
            MonadVal::Dist(m) if m.is_empty() => "{}".into(),
            MonadVal::Dist(m) => {
                let items: Vec<String> = m.iter().map(|(x, p)| format!("{} |-> {p}", show(x))).collect();
                format!("{{{}}}", items.join(", "))
            }
            MonadVal::Output { prefix, tail } => match tail {
                Some(x) => format!("(\"{prefix}\", Conv {})", show(x)),
                None => format!("(\"{prefix}\", Div)"),
            },
            MonadVal::Input(t) => tree_render(t, show),
        }
    }
}

impl Observation {
    pub fn to_json_obs(&self) -> Json {
        self.to_json(&|_| json!("*"))
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonadVal::Dist(_) => write!(f, "{}", self.mass().expect("dist")),
            _ => write!(f, "{}", self.render(&|_| "*".to_string())),
        }
    }
}

fn graft<X: Ord + Clone, Y: Ord + Clone, E>(
    t: &InputTree<X>,
    f: &mut impl FnMut(&X) -> Result<MonadVal<Y>, E>,
) -> Result<InputTree<Y>, E> {
    Ok(match t {
        InputTree::Div => InputTree::Div,
        InputTree::Leaf(x) => match f(x)? {
            MonadVal::Input(t) => t,
            _ => panic!("bind across monads"),
        },
        InputTree::Read(l, r) => InputTree::Read(Box::new(graft(l, f)?), Box::new(graft(r, f)?)),
    })
}

fn tree_leq<X: PartialEq>(a: &InputTree<X>, b: &InputTree<X>) -> bool {
    match (a, b) {
        (InputTree::Div, _) => true,
        (InputTree::Leaf(x), InputTree::Leaf(y)) => x == y,
        (InputTree::Read(l1, r1), InputTree::Read(l2, r2)) => tree_leq(l1, l2) && tree_leq(r1, r2),
        _ => false,
    }
}

fn leaves<'a, X>(t: &'a InputTree<X>, out: &mut Vec<&'a X>) {
    match t {
        InputTree::Leaf(x) => out.push(x),
        InputTree::Div => {}
        InputTree::Read(l, r) => {
            leaves(l, out);
            leaves(r, out);
        }
    }
}

fn tree_json<X>(t: &InputTree<X>, show: &impl Fn(&X) -> Json) -> Json {
    match t {
        InputTree::Leaf(x) => json!({"leaf": show(x)}),
        InputTree::Div => json!("div"),
        InputTree::Read(l, r) => json!({"read": [tree_json(l, show), tree_json(r, show)]}),
    }
}

fn tree_render<X>(t: &InputTree<X>, show: &impl Fn(&X) -> String) -> String {
    match t {
        InputTree::Leaf(x) => format!("Leaf {}", show(x)),
        InputTree::Div => "DivLeaf".into(),
        InputTree::Read(l, r) => format!("Read({}, {})", tree_render(l, show), tree_render(r, show)),
    }
}

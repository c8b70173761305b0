//! Concrete syntax.
//!
//! ```text
//! value v ::= x | \x. e | !e
//! comp  e ::= a | return v | v v | let x = e in e | let !a = v in e | op(e, ..., e)
//! type  t ::= X | !t | t -o t | mu X. t -o t | mu X. !t
//! file    ::= (def name : type = term)*
//! ```
//!
//! An identifier in value position is a linear variable and one in
//! computation position is a non-linear variable. `#` starts a line comment.
//! Definitions are macro-expanded at their use sites; the name `omega` is
//! predefined as a divergent computation.

use std::collections::HashMap;

use thiserror::Error;

use super::term::{name, OpSym, Term};
use super::typeck::{typecheck, TypeEnv, TypeError};
use super::types::Type;
use crate::monad::{Alphabet, Monad};
use crate::prelude;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: operation `{op}` is not available in the {monad} monad")]
    UnknownOp { line: usize, col: usize, op: String, monad: Monad },
}

impl ParseError {
    pub fn location(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. } | ParseError::UnknownOp { line, col, .. } => {
                (*line, *col)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Def {
    pub name: String,
    pub ty: Type,
    pub term: Term,
    pub line: usize,
}

/// A parsed file. Every definition is already expanded.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub defs: Vec<Def>,
}

impl Program {
    /// The definition named `main`, or else the last one.
    pub fn main(&self) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == "main").or_else(|| self.defs.last())
    }

    /// Typecheck every definition at its declared type.
    pub fn check(&self) -> Result<(), (String, TypeError)> {
        for d in &self.defs {
            typecheck(&TypeEnv::empty(), &d.term, &d.ty).map_err(|e| (d.name.clone(), e))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Let,
    In,
    Return,
    Def,
    Mu,
    Lambda,
    Dot,
    Eq,
    Bang,
    LParen,
    RParen,
    Comma,
    Colon,
    Lolli,
    Hole,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '\\' | 'λ' => push(Tok::Lambda, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '!' => push(Tok::Bang, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '⊸' => push(Tok::Lolli, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'o') => push(Tok::Lolli, 2, &mut i, &mut col),
            '[' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&']') => {
                push(Tok::Hole, 3, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.as_str() {
                    "let" => Tok::Let,
                    "in" => Tok::In,
                    "return" => Tok::Return,
                    "def" => Tok::Def,
                    "mu" => Tok::Mu,
                    _ => Tok::Ident(word),
                };
                out.push(Spanned { tok, line: l0, col: c0 });
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    monad: Option<Monad>,
    alphabet: &'a Alphabet,
    allow_hole: bool,
    defs: &'a HashMap<String, Term>,
    bound: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

fn op_symbol(word: &str) -> Option<OpSym> {
    match word {
        "choice" => Some(OpSym::Choice),
        "read" => Some(OpSym::Read),
        _ => {
            let rest = word.strip_prefix("print_")?;
            let mut cs = rest.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Some(OpSym::Print(c)),
                _ => None,
            }
        }
    }
}

fn is_reserved(word: &str) -> bool {
    op_symbol(word).is_some()
}

impl<'a> Parser<'a> {
    fn new(
        src: &str,
        monad: Option<Monad>,
        alphabet: &'a Alphabet,
        defs: &'a HashMap<String, Term>,
    ) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, monad, alphabet, allow_hole: false, defs, bound: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(ParseError::Syntax { line: s.line, col: s.col, msg: msg.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(w) => format!("`{w}`"),
            Tok::Eof => "end of input".into(),
            t => format!("{t:?}").to_lowercase(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(w) if is_reserved(&w) => self.error(format!("`{w}` is reserved")),
            Tok::Ident(w) => {
                self.bump();
                Ok(w)
            }
            _ => self.error(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn starts_value(&self) -> bool {
        match self.peek() {
            Tok::Ident(w) => !is_reserved(w),
            Tok::Lambda | Tok::Bang | Tok::LParen => true,
            _ => false,
        }
    }

    fn under<T>(&mut self, x: &str, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.bound.push(x.to_string());
        let r = f(self);
        self.bound.pop();
        r
    }

    fn lookup_def(&self, w: &str) -> Option<&Term> {
        if self.bound.iter().any(|b| b == w) {
            None
        } else {
            self.defs.get(w)
        }
    }

    fn comp(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Let => {
                self.bump();
                if *self.peek() == Tok::Bang {
                    self.bump();
                    let a = self.ident()?;
                    self.expect(Tok::Eq, "`=`")?;
                    let v = self.value()?;
                    self.expect(Tok::In, "`in`")?;
                    let f = self.under(&a, |p| p.comp())?;
                    Ok(Term::CoSeq(Box::new(v), name(&a), Box::new(f)))
                } else {
                    let x = self.ident()?;
                    self.expect(Tok::Eq, "`=`")?;
                    let e = self.comp()?;
                    self.expect(Tok::In, "`in`")?;
                    let f = self.under(&x, |p| p.comp())?;
                    Ok(Term::Seq(Box::new(e), name(&x), Box::new(f)))
                }
            }
            Tok::Return => {
                self.bump();
                Ok(Term::Return(Box::new(self.value()?)))
            }
            _ => {
                if self.starts_value() {
                    let save = self.pos;
                    if let Ok(v) = self.value_atom() {
                        if self.starts_value() {
                            let w = self.value()?;
                            return Ok(Term::App(Box::new(v), Box::new(w)));
                        }
                    }
                    self.pos = save;
                }
                self.comp_atom()
            }
        }
    }

    fn comp_atom(&mut self) -> PResult<Term> {
        let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
        match self.peek().clone() {
            Tok::Hole if self.allow_hole => {
                self.bump();
                Ok(Term::Hole)
            }
            Tok::Hole => self.error("a hole is only allowed in a context"),
            Tok::LParen => {
                self.bump();
                let e = self.comp()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(w) => {
                if let Some(sym) = op_symbol(&w) {
                    if let Some(m) = self.monad {
                        if !m.supports(sym, self.alphabet) {
                            return Err(ParseError::UnknownOp { line, col, op: w, monad: m });
                        }
                    }
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let mut args = vec![self.comp()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.comp()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    if args.len() != sym.arity() {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            msg: format!("`{w}` takes {} argument(s), found {}", sym.arity(), args.len()),
                        });
                    }
                    return Ok(Term::Op(sym, args));
                }
                if let Some(t) = self.lookup_def(&w) {
                    if t.is_value() {
                        return self.error(format!(
                            "`{w}` is a value definition used as a computation (write `return {w}`)"
                        ));
                    }
                    let t = t.clone();
                    self.bump();
                    return Ok(t);
                }
                self.bump();
                Ok(Term::NonLinVar(name(&w)))
            }
            _ => self.error(format!("expected a computation, found {}", self.describe())),
        }
    }

    fn value(&mut self) -> PResult<Term> {
        if *self.peek() == Tok::Lambda {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Dot, "`.`")?;
            let e = self.under(&x, |p| p.comp())?;
            return Ok(Term::Abs(name(&x), Box::new(e)));
        }
        self.value_atom()
    }

    fn value_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Lambda => self.value(),
            Tok::Bang => {
                self.bump();
                Ok(Term::Bang(Box::new(self.comp_atom()?)))
            }
            Tok::LParen => {
                self.bump();
                let v = self.value()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(v)
            }
            Tok::Ident(w) if !is_reserved(&w) => {
                if let Some(t) = self.lookup_def(&w) {
                    if !t.is_value() {
                        return self.error(format!("`{w}` is a computation, not a value"));
                    }
                    let t = t.clone();
                    self.bump();
                    return Ok(t);
                }
                self.bump();
                Ok(Term::LinVar(name(&w)))
            }
            _ => self.error(format!("expected a value, found {}", self.describe())),
        }
    }

    /// A term of either class, computations preferred. On failure the error
    /// that got further is reported.
    fn term_to(&mut self, end: &[Tok]) -> PResult<Term> {
        let save = self.pos;
        let as_comp = self.comp().and_then(|e| self.at_end(end, e));
        if as_comp.is_ok() {
            return as_comp;
        }
        let comp_pos = self.pos;
        self.pos = save;
        let as_value = self.value().and_then(|v| self.at_end(end, v));
        match (&as_comp, &as_value) {
            (_, Ok(_)) => as_value,
            (Err(c), Err(v)) if v.location() > c.location() => as_value,
            _ => {
                self.pos = comp_pos;
                as_comp
            }
        }
    }

    fn at_end(&self, end: &[Tok], t: Term) -> PResult<Term> {
        if end.contains(self.peek()) {
            Ok(t)
        } else {
            self.error(format!("unexpected {}", self.describe()))
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        if *self.peek() == Tok::Mu {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Dot, "`.`")?;
            return match self.ty()? {
                Type::Lolli(a, b) => Ok(Type::MuLolli(name(&x), a, b)),
                Type::Bang(a) => Ok(Type::MuBang(name(&x), a)),
                _ => self.error("the body of `mu` must be an arrow or a bang"),
            };
        }
        let a = self.ty_prefix()?;
        if *self.peek() == Tok::Lolli {
            self.bump();
            let b = self.ty()?;
            return Ok(Type::Lolli(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn ty_prefix(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Type::Bang(Box::new(self.ty_prefix()?)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(w) => {
                self.bump();
                Ok(Type::Var(name(&w)))
            }
            _ => self.error(format!("expected a type, found {}", self.describe())),
        }
    }
}

fn prelude_defs() -> HashMap<String, Term> {
    HashMap::from([("omega".to_string(), prelude::omega())])
}

/// Parse a single term. `monad` restricts the operation symbols; `None`
/// accepts all of them.
pub fn parse_term(src: &str, monad: Option<Monad>) -> Result<Term, ParseError> {
    let defs = prelude_defs();
    let alphabet = Alphabet::default();
    let mut p = Parser::new(src, monad, &alphabet, &defs)?;
    p.term_to(&[Tok::Eof])
}

/// Parse a value. A bare name is a linear variable.
pub fn parse_value(src: &str, monad: Option<Monad>) -> Result<Term, ParseError> {
    let defs = prelude_defs();
    let alphabet = Alphabet::default();
    let mut p = Parser::new(src, monad, &alphabet, &defs)?;
    let v = p.value()?;
    p.at_end(&[Tok::Eof], v)
}

/// Parse a computation. A bare name is a non-linear variable.
pub fn parse_comp(src: &str, monad: Option<Monad>) -> Result<Term, ParseError> {
    let defs = prelude_defs();
    let alphabet = Alphabet::default();
    let mut p = Parser::new(src, monad, &alphabet, &defs)?;
    let e = p.comp()?;
    p.at_end(&[Tok::Eof], e)
}

/// Parse a single-hole context, written with `[-]` for the hole.
pub fn parse_context(src: &str, monad: Option<Monad>) -> Result<Term, ParseError> {
    let defs = prelude_defs();
    let alphabet = Alphabet::default();
    let mut p = Parser::new(src, monad, &alphabet, &defs)?;
    p.allow_hole = true;
    p.term_to(&[Tok::Eof])
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let defs = HashMap::new();
    let alphabet = Alphabet::default();
    let mut p = Parser::new(src, None, &alphabet, &defs)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.describe()));
    }
    Ok(t)
}

/// Parse a file of definitions.
pub fn parse_program(src: &str, monad: Option<Monad>) -> Result<Program, ParseError> {
    parse_program_with(src, monad, &Alphabet::default())
}

/// [`parse_program`] with a custom output alphabet.
pub fn parse_program_with(src: &str, monad: Option<Monad>, alphabet: &Alphabet) -> Result<Program, ParseError> {
    let mut defs_map = prelude_defs();
    let toks = lex(src)?;
    let mut pos = 0;
    let mut defs = Vec::new();
    loop {
        let mut p =
            Parser { toks: toks.clone(), pos, monad, alphabet, allow_hole: false, defs: &defs_map, bound: Vec::new() };
        if *p.peek() == Tok::Eof {
            break;
        }
        let line = p.toks[p.pos].line;
        p.expect(Tok::Def, "`def`")?;
        let n = p.ident()?;
        p.expect(Tok::Colon, "`:`")?;
        let ty = p.ty()?;
        p.expect(Tok::Eq, "`=`")?;
        let term = p.term_to(&[Tok::Def, Tok::Eof])?;
        if !term.is_closed() {
            let free: Vec<String> =
                term.free_lin_vars().into_iter().chain(term.free_nonlin_vars()).map(|n| n.to_string()).collect();
            return Err(ParseError::Syntax {
                line,
                col: 1,
                msg: format!("definition `{n}` has free variables: {}", free.join(", ")),
            });
        }
        pos = p.pos;
        defs_map.insert(n.clone(), term.clone());
        defs.push(Def { name: n, ty, term, line });
    }
    if defs.is_empty() {
        return Err(ParseError::Syntax { line: 1, col: 1, msg: "no definitions".into() });
    }
    Ok(Program { defs })
}

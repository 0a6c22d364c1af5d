use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Single-sorted vocabulary of the number side of the bridge. BIT is kept
/// as its own node even though it abbreviates mod2 of MSP.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DeltaTerm {
    Const(u64),
    Var(String),
    Succ(Box<DeltaTerm>),
    Add(Box<DeltaTerm>, Box<DeltaTerm>),
    Mul(Box<DeltaTerm>, Box<DeltaTerm>),
    /// Floor of half.
    Half(Box<DeltaTerm>),
    /// Binary length; zero has length zero.
    Len(Box<DeltaTerm>),
    /// 2 raised to |x|*|y|.
    Smash(Box<DeltaTerm>, Box<DeltaTerm>),
    /// Truncated subtraction.
    Monus(Box<DeltaTerm>, Box<DeltaTerm>),
    /// Msp(x, i): x shifted right by i.
    Msp(Box<DeltaTerm>, Box<DeltaTerm>),
    /// Bit(i, x): bit i of x.
    Bit(Box<DeltaTerm>, Box<DeltaTerm>),
    Mod2(Box<DeltaTerm>),
}

/// First-sorted formulas over delta terms, with bounded number quantifiers
/// ranging over values strictly below the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaFormula {
    True,
    False,
    Not(Box<DeltaFormula>),
    And(Box<DeltaFormula>, Box<DeltaFormula>),
    Or(Box<DeltaFormula>, Box<DeltaFormula>),
    Leq(DeltaTerm, DeltaTerm),
    Eq(DeltaTerm, DeltaTerm),
    ExistsNum {
        var: String,
        bound: DeltaTerm,
        body: Box<DeltaFormula>,
    },
    ForallNum {
        var: String,
        bound: DeltaTerm,
        body: Box<DeltaFormula>,
    },
}

pub type DeltaEnv = BTreeMap<String, BigUint>;

fn write_dt(f: &mut std::fmt::Formatter<'_>, t: &DeltaTerm, prec: u32) -> std::fmt::Result {
    match t {
        DeltaTerm::Const(n) => write!(f, "{}", n),
        DeltaTerm::Var(v) => write!(f, "{}", v),
        DeltaTerm::Add(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            write_dt(f, a, 1)?;
            write!(f, " + ")?;
            write_dt(f, b, 2)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        DeltaTerm::Mul(a, b) => {
            if prec > 2 {
                write!(f, "(")?;
            }
            write_dt(f, a, 2)?;
            write!(f, "*")?;
            write_dt(f, b, 3)?;
            if prec > 2 {
                write!(f, ")")?;
            }
            Ok(())
        }
        DeltaTerm::Succ(a) => call(f, "succ", &[a]),
        DeltaTerm::Half(a) => call(f, "half", &[a]),
        DeltaTerm::Len(a) => call(f, "len", &[a]),
        DeltaTerm::Mod2(a) => call(f, "mod2", &[a]),
        DeltaTerm::Smash(a, b) => call(f, "smash", &[a, b]),
        DeltaTerm::Monus(a, b) => call(f, "monus", &[a, b]),
        DeltaTerm::Msp(a, b) => call(f, "MSP", &[a, b]),
        DeltaTerm::Bit(a, b) => call(f, "bit", &[a, b]),
    }
}

fn call(f: &mut std::fmt::Formatter<'_>, name: &str, args: &[&DeltaTerm]) -> std::fmt::Result {
    write!(f, "{}(", name)?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write_dt(f, a, 0)?;
    }
    write!(f, ")")
}

impl std::fmt::Display for DeltaTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_dt(f, self, 0)
    }
}

fn write_df(f: &mut std::fmt::Formatter<'_>, fm: &DeltaFormula, prec: u32) -> std::fmt::Result {
    match fm {
        DeltaFormula::True => write!(f, "true"),
        DeltaFormula::False => write!(f, "false"),
        DeltaFormula::Not(a) => {
            write!(f, "!")?;
            write_df(f, a, 2)
        }
        DeltaFormula::And(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            write_df(f, a, 1)?;
            write!(f, " & ")?;
            write_df(f, b, 2)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        DeltaFormula::Or(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write_df(f, a, 0)?;
            write!(f, " | ")?;
            write_df(f, b, 1)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        DeltaFormula::Leq(a, b) => {
            write_dt(f, a, 0)?;
            write!(f, " <= ")?;
            write_dt(f, b, 0)
        }
        DeltaFormula::Eq(a, b) => {
            write_dt(f, a, 0)?;
            write!(f, " = ")?;
            write_dt(f, b, 0)
        }
        DeltaFormula::ExistsNum { var, bound, body } => quantifier(f, "E", var, bound, body, prec),
        DeltaFormula::ForallNum { var, bound, body } => quantifier(f, "A", var, bound, body, prec),
    }
}

fn quantifier(
    f: &mut std::fmt::Formatter<'_>,
    kind: &str,
    var: &str,
    bound: &DeltaTerm,
    body: &DeltaFormula,
    prec: u32,
) -> std::fmt::Result {
    if prec > 0 {
        write!(f, "(")?;
    }
    write!(f, "{} {}<", kind, var)?;
    write_dt(f, bound, 3)?;
    write!(f, " : ")?;
    write_df(f, body, 0)?;
    if prec > 0 {
        write!(f, ")")?;
    }
    Ok(())
}

impl std::fmt::Display for DeltaFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_df(f, self, 0)
    }
}

/// Smash exponents above this are refused rather than materialized.
pub const SMASH_CAP: u64 = 10_000_000;

/// Widest range a bounded delta quantifier will enumerate.
pub const DELTA_QUANT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeltaError {
    #[error("variable {0:?} is not bound in the environment")]
    Unbound(String),
    #[error("smash exponent |x|*|y| = {0} is over the cap {SMASH_CAP}")]
    SmashTooBig(u128),
    #[error("quantifier bound {0} is over the cap {DELTA_QUANT_CAP}")]
    QuantTooWide(BigUint),
}

pub fn eval_delta(t: &DeltaTerm, env: &DeltaEnv) -> Result<BigUint, DeltaError> {
    Ok(match t {
        DeltaTerm::Const(c) => BigUint::from(*c),
        DeltaTerm::Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| DeltaError::Unbound(x.clone()))?,
        DeltaTerm::Succ(a) => eval_delta(a, env)? + 1u32,
        DeltaTerm::Add(a, b) => eval_delta(a, env)? + eval_delta(b, env)?,
        DeltaTerm::Mul(a, b) => eval_delta(a, env)? * eval_delta(b, env)?,
        DeltaTerm::Half(a) => eval_delta(a, env)? >> 1,
        DeltaTerm::Len(a) => BigUint::from(eval_delta(a, env)?.bits()),
        DeltaTerm::Smash(a, b) => {
            let e = u128::from(eval_delta(a, env)?.bits()) * u128::from(eval_delta(b, env)?.bits());
            if e > u128::from(SMASH_CAP) {
                return Err(DeltaError::SmashTooBig(e));
            }
            BigUint::one() << (e as u64)
        }
        DeltaTerm::Monus(a, b) => {
            let va = eval_delta(a, env)?;
            let vb = eval_delta(b, env)?;
            if va >= vb {
                va - vb
            } else {
                BigUint::zero()
            }
        }
        DeltaTerm::Msp(x, i) => shift_down(eval_delta(x, env)?, &eval_delta(i, env)?),
        DeltaTerm::Bit(i, x) => {
            shift_down(eval_delta(x, env)?, &eval_delta(i, env)?) & BigUint::one()
        }
        DeltaTerm::Mod2(a) => eval_delta(a, env)? & BigUint::one(),
    })
}

fn shift_down(x: BigUint, i: &BigUint) -> BigUint {
    match i.to_u64() {
        Some(i) if i < x.bits() => x >> i,
        _ => BigUint::zero(),
    }
}

pub fn eval_delta_formula(f: &DeltaFormula, env: &DeltaEnv) -> Result<bool, DeltaError> {
    Ok(match f {
        DeltaFormula::True => true,
        DeltaFormula::False => false,
        DeltaFormula::Not(a) => !eval_delta_formula(a, env)?,
        DeltaFormula::And(a, b) => eval_delta_formula(a, env)? && eval_delta_formula(b, env)?,
        DeltaFormula::Or(a, b) => eval_delta_formula(a, env)? || eval_delta_formula(b, env)?,
        DeltaFormula::Leq(a, b) => eval_delta(a, env)? <= eval_delta(b, env)?,
        DeltaFormula::Eq(a, b) => eval_delta(a, env)? == eval_delta(b, env)?,
        DeltaFormula::ExistsNum { var, bound, body } => {
            quantifier_range(bound, env)?.try_fold(false, |acc, v| {
                let mut inner = env.clone();
                inner.insert(var.clone(), BigUint::from(v));
                Ok(acc || eval_delta_formula(body, &inner)?)
            })?
        }
        DeltaFormula::ForallNum { var, bound, body } => {
            quantifier_range(bound, env)?.try_fold(true, |acc, v| {
                let mut inner = env.clone();
                inner.insert(var.clone(), BigUint::from(v));
                Ok(acc && eval_delta_formula(body, &inner)?)
            })?
        }
    })
}

fn quantifier_range(
    bound: &DeltaTerm,
    env: &DeltaEnv,
) -> Result<std::ops::Range<u64>, DeltaError> {
    let b = eval_delta(bound, env)?;
    match b.to_u64() {
        Some(n) if n <= DELTA_QUANT_CAP => Ok(0..n),
        _ => Err(DeltaError::QuantTooWide(b)),
    }
}

/// Runs an induction chain concretely: the base phi(0), every step
/// phi(x) -> phi(x+1) for x below |z|, and finally phi(|z|) itself.
/// Returns whether the whole chain held.
pub fn open_lind_check(
    phi: &DeltaFormula,
    var: &str,
    z: &BigUint,
    env: &DeltaEnv,
) -> Result<bool, DeltaError> {
    let n = z.bits();
    let mut inner = env.clone();
    let at = |inner: &mut DeltaEnv, v: u64| {
        inner.insert(var.to_string(), BigUint::from(v));
        eval_delta_formula(phi, inner)
    };
    if !at(&mut inner, 0)? {
        return Ok(false);
    }
    for x in 0..n {
        if at(&mut inner, x)? && !at(&mut inner, x + 1)? {
            return Ok(false);
        }
    }
    at(&mut inner, n)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {col}: {msg}")]
pub struct DeltaParseError {
    pub col: usize,
    pub msg: String,
}

/// Parses the term syntax: decimal literals, variables, infix `+` and `*`,
/// and the function forms MSP(x,i), smash(x,y), monus(x,y), half(x),
/// len(x), bit(i,x), succ(x), mod2(x).
pub fn parse_delta(src: &str) -> Result<DeltaTerm, DeltaParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    let t = p.expr()?;
    p.expect_end()?;
    Ok(t)
}

/// Parses the formula syntax over delta terms: comparisons `s = t` and
/// `s <= t`, the connectives `!`, `&`, `|`, the constants `true` and
/// `false`, and the bounded quantifiers `E x < t : phi` and `A x < t : phi`.
/// A quantifier body extends as far right as possible.
pub fn parse_delta_formula(src: &str) -> Result<DeltaFormula, DeltaParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Plus,
    Star,
    LParen,
    RParen,
    Comma,
    Amp,
    Pipe,
    Bang,
    Lt,
    Le,
    Equal,
    Colon,
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, DeltaParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let (col, c) = (i + 1, chars[i]);
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((col, Tok::Plus));
                i += 1;
            }
            '*' => {
                out.push((col, Tok::Star));
                i += 1;
            }
            '(' => {
                out.push((col, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((col, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((col, Tok::Comma));
                i += 1;
            }
            '&' => {
                out.push((col, Tok::Amp));
                i += 1;
            }
            '|' => {
                out.push((col, Tok::Pipe));
                i += 1;
            }
            '!' => {
                out.push((col, Tok::Bang));
                i += 1;
            }
            '=' => {
                out.push((col, Tok::Equal));
                i += 1;
            }
            ':' => {
                out.push((col, Tok::Colon));
                i += 1;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push((col, Tok::Le));
                    i += 2;
                } else {
                    out.push((col, Tok::Lt));
                    i += 1;
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse().map_err(|_| DeltaParseError {
                    col,
                    msg: format!("literal {} does not fit in 64 bits", text),
                })?;
                out.push((col, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
            }
            other => {
                return Err(DeltaParseError {
                    col,
                    msg: format!("unexpected character {:?}", other),
                })
            }
        }
    }
    out.push((chars.len() + 1, Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn col(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> DeltaParseError {
        DeltaParseError {
            col: self.col(),
            msg: msg.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), DeltaParseError> {
        if self.peek() == &want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {}", what)))
        }
    }

    fn expect_end(&mut self) -> Result<(), DeltaParseError> {
        if self.peek() == &Tok::End {
            Ok(())
        } else {
            Err(self.err("trailing input after the term"))
        }
    }

    fn expr(&mut self) -> Result<DeltaTerm, DeltaParseError> {
        let mut t = self.product()?;
        while self.peek() == &Tok::Plus {
            self.bump();
            let rhs = self.product()?;
            t = DeltaTerm::Add(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<DeltaTerm, DeltaParseError> {
        let mut t = self.atom()?;
        while self.peek() == &Tok::Star {
            self.bump();
            let rhs = self.atom()?;
            t = DeltaTerm::Mul(Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<DeltaTerm, DeltaParseError> {
        match self.bump() {
            Tok::Num(n) => Ok(DeltaTerm::Const(n)),
            Tok::LParen => {
                let t = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::Ident(name) => {
                if self.peek() != &Tok::LParen {
                    return Ok(DeltaTerm::Var(name));
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while self.peek() == &Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "')'")?;
                self.apply(&name, args)
            }
            other => Err(DeltaParseError {
                col: self.toks[self.at.saturating_sub(1)].0,
                msg: format!("expected a term, found {:?}", other),
            }),
        }
    }

    fn apply(&mut self, name: &str, args: Vec<DeltaTerm>) -> Result<DeltaTerm, DeltaParseError> {
        let arity = |n: usize| -> Result<(), DeltaParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(self.err(format!("{} takes {} argument(s), got {}", name, n, args.len())))
            }
        };
        let mut it = args.clone().into_iter();
        let mut next = || Box::new(it.next().expect("arity checked"));
        Ok(match name {
            "MSP" => {
                arity(2)?;
                DeltaTerm::Msp(next(), next())
            }
            "smash" => {
                arity(2)?;
                DeltaTerm::Smash(next(), next())
            }
            "monus" => {
                arity(2)?;
                DeltaTerm::Monus(next(), next())
            }
            "half" => {
                arity(1)?;
                DeltaTerm::Half(next())
            }
            "len" => {
                arity(1)?;
                DeltaTerm::Len(next())
            }
            "bit" => {
                arity(2)?;
                DeltaTerm::Bit(next(), next())
            }
            "succ" => {
                arity(1)?;
                DeltaTerm::Succ(next())
            }
            "mod2" => {
                arity(1)?;
                DeltaTerm::Mod2(next())
            }
            _ => return Err(self.err(format!("unknown function {:?}", name))),
        })
    }

    fn formula(&mut self) -> Result<DeltaFormula, DeltaParseError> {
        let mut f = self.conj()?;
        while self.peek() == &Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            f = DeltaFormula::Or(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<DeltaFormula, DeltaParseError> {
        let mut f = self.prefix()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let rhs = self.prefix()?;
            f = DeltaFormula::And(Box::new(f), Box::new(rhs));
        }
        Ok(f)
    }

    fn prefix(&mut self) -> Result<DeltaFormula, DeltaParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(DeltaFormula::Not(Box::new(self.prefix()?)))
            }
            Tok::Ident(s) if s == "E" || s == "A" => self.quantified(),
            _ => self.fatom(),
        }
    }

    fn quantified(&mut self) -> Result<DeltaFormula, DeltaParseError> {
        let exists = matches!(self.bump(), Tok::Ident(s) if s == "E");
        let var = match self.bump() {
            Tok::Ident(v) => v,
            _ => return Err(self.err("expected a variable after the quantifier")),
        };
        self.expect(Tok::Lt, "'<'")?;
        let bound = self.expr()?;
        self.expect(Tok::Colon, "':'")?;
        let body = Box::new(self.formula()?);
        Ok(if exists {
            DeltaFormula::ExistsNum { var, bound, body }
        } else {
            DeltaFormula::ForallNum { var, bound, body }
        })
    }

    // A '(' can open either a grouped formula or a parenthesized term on
    // the left of a comparison; try the formula reading first and fall
    // back by rewinding.
    fn fatom(&mut self) -> Result<DeltaFormula, DeltaParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                return Ok(DeltaFormula::True);
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                return Ok(DeltaFormula::False);
            }
            Tok::LParen => {
                let save = self.at;
                self.bump();
                if let Ok(f) = self.formula() {
                    if self.peek() == &Tok::RParen {
                        self.bump();
                        return Ok(f);
                    }
                }
                self.at = save;
            }
            _ => {}
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<DeltaFormula, DeltaParseError> {
        let lhs = self.expr()?;
        match self.peek().clone() {
            Tok::Equal => {
                self.bump();
                Ok(DeltaFormula::Eq(lhs, self.expr()?))
            }
            Tok::Le => {
                self.bump();
                Ok(DeltaFormula::Leq(lhs, self.expr()?))
            }
            _ => Err(self.err("expected '=' or '<=' after the term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, env: &[(&str, u64)]) -> BigUint {
        let t = parse_delta(src).unwrap();
        let env: DeltaEnv = env
            .iter()
            .map(|&(k, v)| (k.to_string(), BigUint::from(v)))
            .collect();
        eval_delta(&t, &env).unwrap()
    }

    #[test]
    fn pinned_operator_values() {
        assert_eq!(ev("MSP(13,2)", &[]), BigUint::from(3u32));
        assert_eq!(ev("bit(2,13)", &[]), BigUint::from(1u32));
        assert_eq!(ev("smash(3,5)", &[]), BigUint::from(64u32));
        assert_eq!(ev("monus(3,5)", &[]), BigUint::from(0u32));
        assert_eq!(ev("monus(5,3)", &[]), BigUint::from(2u32));
        assert_eq!(ev("half(13)", &[]), BigUint::from(6u32));
        assert_eq!(ev("len(13)", &[]), BigUint::from(4u32));
        assert_eq!(ev("len(0)", &[]), BigUint::from(0u32));
        assert_eq!(ev("succ(4)", &[]), BigUint::from(5u32));
        assert_eq!(ev("mod2(13)", &[]), BigUint::from(1u32));
        assert_eq!(ev("2 + 3 * 4", &[]), BigUint::from(14u32));
        assert_eq!(ev("(2 + 3) * 4", &[]), BigUint::from(20u32));
        assert_eq!(ev("MSP(x,i)", &[("x", 13), ("i", 2)]), BigUint::from(3u32));
    }

    #[test]
    fn small_exhaustive_against_plain_integers() {
        for x in 0u64..64 {
            for i in 0u64..64 {
                let env: DeltaEnv = [("x", x), ("i", i)]
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), BigUint::from(v)))
                    .collect();
                let msp = eval_delta(&parse_delta("MSP(x,i)").unwrap(), &env).unwrap();
                assert_eq!(msp, BigUint::from(x >> i.min(63)));
                let bit = eval_delta(&parse_delta("bit(i,x)").unwrap(), &env).unwrap();
                assert_eq!(bit, BigUint::from(x >> i.min(63) & 1));
                let monus = eval_delta(&parse_delta("monus(x,i)").unwrap(), &env).unwrap();
                assert_eq!(monus, BigUint::from(x.saturating_sub(i)));
                let len = eval_delta(&parse_delta("len(x)").unwrap(), &env).unwrap();
                assert_eq!(len, BigUint::from(64 - x.leading_zeros()));
                let smash = eval_delta(&parse_delta("smash(x,i)").unwrap(), &env).unwrap();
                let e = u64::from(64 - x.leading_zeros()) * u64::from(64 - i.leading_zeros());
                assert_eq!(smash, BigUint::one() << e);
            }
        }
    }

    #[test]
    fn evaluation_errors() {
        let t = parse_delta("x + 1").unwrap();
        assert_eq!(
            eval_delta(&t, &DeltaEnv::new()),
            Err(DeltaError::Unbound("x".into()))
        );
        let wide = parse_delta("smash(x,x)").unwrap();
        let env: DeltaEnv = [("x".to_string(), BigUint::one() << 4000u32)].into();
        assert!(matches!(
            eval_delta(&wide, &env),
            Err(DeltaError::SmashTooBig(_))
        ));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_delta("((").is_err());
        assert!(parse_delta("half(1,2)").is_err());
        assert!(parse_delta("frob(1)").is_err());
        assert!(parse_delta("1 2").is_err());
        assert!(parse_delta("@").is_err());
        assert!(parse_delta_formula("((").is_err());
        assert!(parse_delta_formula("x = ").is_err());
        assert!(parse_delta_formula("E x 5 : true").is_err());
    }

    #[test]
    fn formula_text_round_trips() {
        let sources = [
            "E x<len(n) : bit(x, n) = 1",
            "!(x = 1 | y <= 2) & true",
            "A i<8 : (E j<i : i = j + 1 | i <= 0)",
            "monus(x, y)*half(z) + 1 <= MSP(x, 2)",
            "(x + 1)*y = 2 & false",
        ];
        for src in sources {
            let f = parse_delta_formula(src).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_delta_formula(&printed).unwrap(), f, "{}", src);
        }
    }

    #[test]
    fn formula_printing_is_stable() {
        let f = parse_delta_formula("E x<5 : x + x = 6").unwrap();
        assert_eq!(f.to_string(), "E x<5 : x + x = 6");
        assert_eq!(
            parse_delta("smash(x, succ(y))").unwrap().to_string(),
            "smash(x, succ(y))"
        );
    }

    #[test]
    fn formula_evaluation() {
        let leq = |a, b| DeltaFormula::Leq(a, b);
        let v = |n: &str| DeltaTerm::Var(n.into());
        let c = |n: u64| DeltaTerm::Const(n);
        // some x below 5 doubles to 6
        let f = DeltaFormula::ExistsNum {
            var: "x".into(),
            bound: c(5),
            body: Box::new(DeltaFormula::Eq(
                DeltaTerm::Add(Box::new(v("x")), Box::new(v("x"))),
                c(6),
            )),
        };
        assert!(eval_delta_formula(&f, &DeltaEnv::new()).unwrap());
        let g = DeltaFormula::ForallNum {
            var: "x".into(),
            bound: c(4),
            body: Box::new(leq(v("x"), c(2))),
        };
        assert!(!eval_delta_formula(&g, &DeltaEnv::new()).unwrap());
        let wide = DeltaFormula::ExistsNum {
            var: "x".into(),
            bound: DeltaTerm::Smash(Box::new(c(200)), Box::new(c(200))),
            body: Box::new(DeltaFormula::True),
        };
        assert!(matches!(
            eval_delta_formula(&wide, &DeltaEnv::new()),
            Err(DeltaError::QuantTooWide(_))
        ));
    }

    #[test]
    fn induction_chains() {
        let v = |n: &str| DeltaTerm::Var(n.into());
        let c = |n: u64| DeltaTerm::Const(n);
        let env: DeltaEnv = [("z".to_string(), BigUint::from(20u32))].into();

        // x <= len(z) survives the whole chain
        let holds = DeltaFormula::Leq(v("x"), DeltaTerm::Len(Box::new(v("z"))));
        assert!(open_lind_check(&holds, "x", &BigUint::from(20u32), &env).unwrap());

        // x < 3 breaks at the step from 2 to 3 when |z| = 5
        let breaks = DeltaFormula::Leq(DeltaTerm::Add(Box::new(v("x")), Box::new(c(1))), c(3));
        assert!(!open_lind_check(&breaks, "x", &BigUint::from(20u32), &env).unwrap());

        // z = 0 reduces to the base case alone
        assert!(open_lind_check(&breaks, "x", &BigUint::zero(), &env).unwrap());
        let base_fails = DeltaFormula::Leq(c(1), v("x"));
        assert!(!open_lind_check(&base_fails, "x", &BigUint::zero(), &env).unwrap());
    }
}

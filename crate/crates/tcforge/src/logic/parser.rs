use std::collections::BTreeSet;

use super::ast::{fand, fnot, nadd, nconst, Formula, NumTerm, StrTerm};
use super::registry::{FnKind, FunctionRegistry, RESERVED};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: {}",
            self.line, self.col, self.msg
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    Amp,
    Pipe,
    Bang,
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
    Plus,
    Star,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {:?}", s),
            Tok::Int(n) => format!("numeral {}", n),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrack => "'['".into(),
            Tok::RBrack => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Colon => "':'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Eq => "'='".into(),
            Tok::Le => "'<='".into(),
            Tok::Lt => "'<'".into(),
            Tok::Ge => "'>='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Star => "'*'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Sp {
    tok: Tok,
    line: u32,
    col: u32,
}

struct Cursor {
    cs: Vec<char>,
    i: usize,
    line: u32,
    col: u32,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.cs.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

fn lex(text: &str) -> Result<Vec<Sp>, ParseError> {
    let mut cur = Cursor {
        cs: text.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let (tl, tc) = (cur.line, cur.col);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(d) = cur.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    s.push(cur.bump().unwrap());
                } else {
                    break;
                }
            }
            out.push(Sp { tok: Tok::Ident(s), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while let Some(d) = cur.peek() {
                if let Some(dig) = d.to_digit(10) {
                    cur.bump();
                    v = v
                        .checked_mul(10)
                        .and_then(|x| x.checked_add(u64::from(dig)))
                        .ok_or(ParseError {
                            line: tl,
                            col: tc,
                            msg: "numeral does not fit in 64 bits".into(),
                        })?;
                } else {
                    break;
                }
            }
            out.push(Sp { tok: Tok::Int(v), line: tl, col: tc });
            continue;
        }
        cur.bump();
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '&' => Tok::Amp,
            '!' => Tok::Bang,
            '=' => Tok::Eq,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '|' => Tok::Pipe,
            '<' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            '>' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character {:?}", other),
                })
            }
        };
        out.push(Sp { tok, line: tl, col: tc });
    }
    out.push(Sp {
        tok: Tok::Eof,
        line: cur.line,
        col: cur.col,
    });
    Ok(out)
}

/// `|` doubles as the length delimiter and disjunction; the lexer emits one
/// token kind and the parser decides from context. The parser also renames
/// shadowed binders so the returned AST never binds a name twice on a path.
struct P<'a> {
    toks: Vec<Sp>,
    pos: usize,
    reg: &'a FunctionRegistry,
    /// Active binders: (surface name, internal name).
    scope: Vec<(String, String)>,
    /// Every identifier ever seen or invented; renaming picks outside it.
    seen: BTreeSet<String>,
}

pub fn parse_formula(text: &str, reg: &FunctionRegistry) -> Result<Formula, ParseError> {
    let mut p = P {
        toks: lex(text)?,
        pos: 0,
        reg,
        scope: Vec::new(),
        seen: BTreeSet::new(),
    };
    let f = p.or_expr()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_num_term(text: &str, reg: &FunctionRegistry) -> Result<NumTerm, ParseError> {
    let mut p = P {
        toks: lex(text)?,
        pos: 0,
        reg,
        scope: Vec::new(),
        seen: BTreeSet::new(),
    };
    let t = p.num_term()?;
    p.expect_eof()?;
    Ok(t)
}

impl<'a> P<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_is_str_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(n) if super::ast::is_str_name(n))
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].line, self.toks[self.pos].col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!(
                "expected {} ({}), found {}",
                t.describe(),
                what,
                self.peek().describe()
            ))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {} after formula", self.peek().describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                self.seen.insert(s.clone());
                Ok(s)
            }
            other => self.err(format!("expected {} name, found {}", what, other.describe())),
        }
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and_expr()?;
        while self.peek() == &Tok::Pipe {
            // `|` here is disjunction only if a length bar is impossible:
            // inside a term we never reach or_expr.
            self.advance();
            let r = self.and_expr()?;
            f = Formula::Or(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            let r = self.unary()?;
            f = Formula::And(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(fnot(self.unary()?));
        }
        if let Tok::Ident(name) = self.peek() {
            match name.as_str() {
                "E" | "A" => return self.quantifier(),
                "Th" => return self.threshold(),
                "Mod" => return self.modq(),
                "C" => return self.count_macro(),
                "true" => {
                    self.advance();
                    return Ok(Formula::True);
                }
                "false" => {
                    self.advance();
                    return Ok(Formula::False);
                }
                _ => {}
            }
        }
        self.atom()
    }

    /// Bounding terms stay in the base language: no function applications.
    /// Keeps quantifier ranges evaluable without the registry and lets the
    /// transformations hoist bounds syntactically.
    fn base_term_only(&self, t: &NumTerm) -> Result<(), ParseError> {
        fn num_ok(t: &NumTerm) -> bool {
            match t {
                NumTerm::Const(_) | NumTerm::Var(_) => true,
                NumTerm::Add(a, b) | NumTerm::Mul(a, b) => num_ok(a) && num_ok(b),
                NumTerm::Len(s) => matches!(**s, StrTerm::Var(_)),
                NumTerm::App { .. } => false,
            }
        }
        if num_ok(t) {
            Ok(())
        } else {
            self.err("quantifier counts and bounds must be base-language terms (no function applications)")
        }
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let kw = self.ident("quantifier")?;
        let exists = kw == "E";
        let var = self.binder_name()?;
        if super::ast::is_str_name(&var) {
            self.expect(Tok::Le, "string quantifier bound")?;
            let bound = self.num_term()?;
            self.base_term_only(&bound)?;
            let internal = self.push_binder(&var, &[&bound]);
            self.eat(&Tok::Colon);
            let body = self.or_expr()?;
            self.pop_binder();
            Ok(if exists {
                Formula::ExistsStr {
                    var: internal,
                    bound,
                    body: Box::new(body),
                }
            } else {
                Formula::ForallStr {
                    var: internal,
                    bound,
                    body: Box::new(body),
                }
            })
        } else {
            self.expect(Tok::Lt, "number quantifier bound")?;
            let bound = self.num_term()?;
            self.base_term_only(&bound)?;
            let internal = self.push_binder(&var, &[&bound]);
            self.eat(&Tok::Colon);
            let body = self.or_expr()?;
            self.pop_binder();
            Ok(if exists {
                Formula::ExistsNum {
                    var: internal,
                    bound,
                    body: Box::new(body),
                }
            } else {
                Formula::ForallNum {
                    var: internal,
                    bound,
                    body: Box::new(body),
                }
            })
        }
    }

    fn counted_header(&mut self) -> Result<(NumTerm, String, NumTerm), ParseError> {
        self.expect(Tok::LBrack, "count")?;
        let count = self.num_term()?;
        self.base_term_only(&count)?;
        self.expect(Tok::RBrack, "count")?;
        let var = self.binder_name()?;
        if super::ast::is_str_name(&var) {
            return self.err("threshold quantifiers bind a number variable");
        }
        self.expect(Tok::Lt, "threshold bound")?;
        let bound = self.num_term()?;
        self.base_term_only(&bound)?;
        Ok((count, var, bound))
    }

    fn threshold(&mut self) -> Result<Formula, ParseError> {
        self.advance();
        let (count, var, bound) = self.counted_header()?;
        let internal = self.push_binder(&var, &[&count, &bound]);
        self.eat(&Tok::Colon);
        let body = self.or_expr()?;
        self.pop_binder();
        Ok(Formula::Thq {
            count,
            var: internal,
            bound,
            body: Box::new(body),
        })
    }

    fn modq(&mut self) -> Result<Formula, ParseError> {
        self.advance();
        self.expect(Tok::LBrack, "modulus")?;
        let m = match self.peek().clone() {
            Tok::Int(m) => {
                self.advance();
                m
            }
            other => return self.err(format!("expected modulus numeral, found {}", other.describe())),
        };
        if m < 2 {
            return self.err("modulus must be at least 2");
        }
        self.expect(Tok::RBrack, "modulus")?;
        let var = self.binder_name()?;
        if super::ast::is_str_name(&var) {
            return self.err("mod quantifiers bind a number variable");
        }
        self.expect(Tok::Lt, "mod quantifier bound")?;
        let bound = self.num_term()?;
        self.base_term_only(&bound)?;
        let internal = self.push_binder(&var, &[&bound]);
        self.eat(&Tok::Colon);
        let body = self.or_expr()?;
        self.pop_binder();
        Ok(Formula::Modm {
            m,
            var: internal,
            bound,
            body: Box::new(body),
        })
    }

    /// `C[s] z<t : φ` — exactly s witnesses — expands to
    /// `Th[s] z<t φ & !Th[s+1] z<t φ`.
    fn count_macro(&mut self) -> Result<Formula, ParseError> {
        self.advance();
        let (count, var, bound) = self.counted_header()?;
        let internal = self.push_binder(&var, &[&count, &bound]);
        self.eat(&Tok::Colon);
        let body = self.or_expr()?;
        self.pop_binder();
        let at_least = Formula::Thq {
            count: count.clone(),
            var: internal.clone(),
            bound: bound.clone(),
            body: Box::new(body.clone()),
        };
        let more = Formula::Thq {
            count: nadd(count, nconst(1)),
            var: internal,
            bound,
            body: Box::new(body),
        };
        Ok(fand(at_least, fnot(more)))
    }

    fn binder_name(&mut self) -> Result<String, ParseError> {
        let (line, col) = self.here();
        let name = self.ident("bound variable")?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError {
                line,
                col,
                msg: format!("{:?} is reserved and cannot be a variable", name),
            });
        }
        if self.reg.get(&name).is_some() {
            return Err(ParseError {
                line,
                col,
                msg: format!("{:?} is a registered function, not a variable", name),
            });
        }
        Ok(name)
    }

    fn push_binder(&mut self, surface: &str, guard_terms: &[&NumTerm]) -> String {
        let shadows = self.scope.iter().any(|(s, i)| s == surface || i == surface);
        let in_guard = guard_terms.iter().any(|t| {
            let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
            t.collect_vars(&mut n, &mut s);
            n.contains(surface) || s.contains(surface)
        });
        let internal = if shadows || in_guard {
            let mut cand = format!("{}'", surface);
            while self.seen.contains(&cand) {
                cand.push('\'');
            }
            cand
        } else {
            surface.to_string()
        };
        self.seen.insert(internal.clone());
        self.scope.push((surface.to_string(), internal.clone()));
        internal
    }

    fn pop_binder(&mut self) {
        self.scope.pop();
    }

    fn resolve(&mut self, surface: String) -> Result<String, ParseError> {
        if RESERVED.contains(&surface.as_str()) {
            return self.err(format!("{:?} is reserved and cannot be a variable", surface));
        }
        for (s, i) in self.scope.iter().rev() {
            if *s == surface {
                return Ok(i.clone());
            }
        }
        if self.reg.get(&surface).is_some() {
            return self.err(format!(
                "{:?} is a registered function and needs an argument list",
                surface
            ));
        }
        Ok(surface)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(name) = self.peek() {
            if super::ast::is_str_name(name) {
                let s = self.str_term()?;
                return match self.peek() {
                    Tok::LParen => {
                        self.advance();
                        let t = self.num_term()?;
                        self.expect(Tok::RParen, "membership")?;
                        Ok(Formula::In(t, s))
                    }
                    Tok::Eq => {
                        self.advance();
                        let r = self.str_term()?;
                        Ok(Formula::StrEq(s, r))
                    }
                    _ => self.err(
                        "expected a membership argument list or '=' after a string term",
                    ),
                };
            }
        }
        // Either a number comparison or a parenthesized formula; try the
        // comparison first and fall back on '('.
        let snapshot = self.pos;
        match self.comparison() {
            Ok(f) => Ok(f),
            Err(cmp_err) => {
                self.pos = snapshot;
                if self.peek() == &Tok::LParen {
                    self.advance();
                    let f = self.or_expr()?;
                    self.expect(Tok::RParen, "grouping")?;
                    Ok(f)
                } else {
                    Err(cmp_err)
                }
            }
        }
    }

    fn comparison(&mut self) -> Result<Formula, ParseError> {
        let a = self.num_term()?;
        match self.advance() {
            Tok::Eq => {
                let b = self.num_term()?;
                Ok(Formula::Eq(a, b))
            }
            Tok::Le => {
                let b = self.num_term()?;
                Ok(Formula::Leq(a, b))
            }
            Tok::Lt => {
                let b = self.num_term()?;
                Ok(Formula::Leq(nadd(a, nconst(1)), b))
            }
            Tok::Ge => {
                let b = self.num_term()?;
                Ok(Formula::Leq(b, a))
            }
            Tok::Gt => {
                let b = self.num_term()?;
                Ok(Formula::Leq(nadd(b, nconst(1)), a))
            }
            other => {
                self.pos = self.pos.saturating_sub(1);
                self.err(format!(
                    "expected a comparison operator after a number term, found {}",
                    other.describe()
                ))
            }
        }
    }

    fn num_term(&mut self) -> Result<NumTerm, ParseError> {
        let mut t = self.mul_term()?;
        while self.eat(&Tok::Plus) {
            let r = self.mul_term()?;
            t = NumTerm::Add(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn mul_term(&mut self) -> Result<NumTerm, ParseError> {
        let mut t = self.atom_term()?;
        while self.eat(&Tok::Star) {
            let r = self.atom_term()?;
            t = NumTerm::Mul(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn atom_term(&mut self) -> Result<NumTerm, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(NumTerm::Const(v))
            }
            Tok::Pipe => {
                self.advance();
                let s = self.str_term()?;
                self.expect(Tok::Pipe, "length")?;
                Ok(NumTerm::Len(Box::new(s)))
            }
            Tok::LParen => {
                self.advance();
                let t = self.num_term()?;
                self.expect(Tok::RParen, "term grouping")?;
                Ok(t)
            }
            Tok::Ident(name) => {
                if super::ast::is_str_name(&name) {
                    return self.err(format!(
                        "string name {:?} cannot start a number term (write |{}| for its length)",
                        name, name
                    ));
                }
                self.advance();
                self.seen.insert(name.clone());
                if self.peek() == &Tok::LParen {
                    let entry = match self.reg.get(&name) {
                        Some(e) if e.kind == FnKind::Num => e,
                        Some(_) => {
                            return self.err(format!(
                                "{:?} is a string function, not a number function",
                                name
                            ))
                        }
                        None => return self.err(format!("unknown function {:?}", name)),
                    };
                    let arity = entry.arity();
                    let (num_args, str_args) = self.args()?;
                    if (num_args.len(), str_args.len()) != arity {
                        return self.err(format!(
                            "{} expects {} number and {} string arguments, got {} and {}",
                            name,
                            arity.0,
                            arity.1,
                            num_args.len(),
                            str_args.len()
                        ));
                    }
                    Ok(NumTerm::App {
                        name,
                        num_args,
                        str_args,
                    })
                } else {
                    Ok(NumTerm::Var(self.resolve(name)?))
                }
            }
            other => self.err(format!("expected a number term, found {}", other.describe())),
        }
    }

    fn str_term(&mut self) -> Result<StrTerm, ParseError> {
        let (line, col) = self.here();
        let name = self.ident("string")?;
        if !super::ast::is_str_name(&name) {
            return Err(ParseError {
                line,
                col,
                msg: format!("string names start with an uppercase letter, got {:?}", name),
            });
        }
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError {
                line,
                col,
                msg: format!("{:?} is reserved", name),
            });
        }
        match self.reg.get(&name) {
            Some(e) if e.kind == FnKind::Str => {
                let arity = e.arity();
                if self.peek() != &Tok::LParen {
                    return self.err(format!("{} needs an argument list", name));
                }
                let (num_args, str_args) = self.args()?;
                if (num_args.len(), str_args.len()) != arity {
                    return self.err(format!(
                        "{} expects {} number and {} string arguments, got {} and {}",
                        name,
                        arity.0,
                        arity.1,
                        num_args.len(),
                        str_args.len()
                    ));
                }
                Ok(StrTerm::App {
                    name,
                    num_args,
                    str_args,
                })
            }
            Some(_) => Err(ParseError {
                line,
                col,
                msg: format!("{:?} is a number function, not a string function", name),
            }),
            None => Ok(StrTerm::Var(self.resolve(name)?)),
        }
    }

    /// `( t, ... ; X, ... )` with either side possibly empty.
    fn args(&mut self) -> Result<(Vec<NumTerm>, Vec<StrTerm>), ParseError> {
        self.expect(Tok::LParen, "argument list")?;
        let mut num_args = Vec::new();
        let mut str_args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok((num_args, str_args));
        }
        // Number arguments, then string arguments. `;` separates the blocks,
        // but a string term always starts with an uppercase name, so a plain
        // comma before one reads as the block switch too.
        let mut want_str = self.peek_is_str_start();
        if !want_str && self.peek() != &Tok::Semi {
            loop {
                num_args.push(self.num_term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
                if self.peek_is_str_start() {
                    want_str = true;
                    break;
                }
            }
        }
        if self.eat(&Tok::Semi) {
            want_str = true;
        }
        if want_str {
            loop {
                str_args.push(self.str_term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "argument list")?;
        Ok((num_args, str_args))
    }
}

#[cfg(test)]
mod tests {
    use super::super::ast::*;
    use super::*;
    use Formula as F;

    fn reg() -> FunctionRegistry {
        FunctionRegistry::standard()
    }

    #[test]
    fn membership_and_negation() {
        let f = parse_formula("X(0) & !X(1)", &reg()).unwrap();
        let want = fand(
            F::In(nconst(0), svar("X")),
            fnot(F::In(nconst(1), svar("X"))),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn threshold_shape() {
        let f = parse_formula("Th[2] z<4 : X(z)", &reg()).unwrap();
        let want = thq(nconst(2), "z", nconst(4), F::In(nvar("z"), svar("X")));
        assert_eq!(f, want);
    }

    #[test]
    fn unbalanced_is_an_error() {
        let e = parse_formula("E y < |X| (X(y) & y=0", &reg()).unwrap_err();
        assert!(e.line == 1 && e.col > 1);
    }

    #[test]
    fn quantifier_chains_without_colon() {
        let f = parse_formula("E Y<=5 A x<5 : Y(x)", &reg()).unwrap();
        match f {
            F::ExistsStr { var, body, .. } => {
                assert_eq!(var, "Y");
                assert!(matches!(*body, F::ForallNum { .. }));
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn shadowed_binder_is_renamed() {
        let f = parse_formula("E z<3 : E z<4 : z = 0", &reg()).unwrap();
        match f {
            F::ExistsNum { var, body, .. } => {
                assert_eq!(var, "z");
                match *body {
                    F::ExistsNum { var: inner, body: ibody, .. } => {
                        assert_eq!(inner, "z'");
                        assert_eq!(*ibody, F::Eq(nvar("z'"), nconst(0)));
                    }
                    other => panic!("unexpected {:?}", other),
                }
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn binder_colliding_with_guard_is_renamed() {
        // The z in the count refers to the free z, so the binder moves.
        let f = parse_formula("Th[z] z<3 : X(z)", &reg()).unwrap();
        match f {
            F::Thq { count, var, body, .. } => {
                assert_eq!(count, nvar("z"));
                assert_eq!(var, "z'");
                assert_eq!(*body, F::In(nvar("z'"), svar("X")));
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn function_applications() {
        let f = parse_formula("numones(3;X) = 2 & pair(1,2) = 16", &reg()).unwrap();
        assert!(matches!(f, F::And(..)));
        let e = parse_formula("numones(3) = 2", &reg()).unwrap_err();
        assert!(e.msg.contains("expects"));
        let e2 = parse_formula("nosuch(3) = 2", &reg()).unwrap_err();
        assert!(e2.msg.contains("unknown function"));
    }

    #[test]
    fn string_function_membership() {
        let f = parse_formula("Row(1;Z)(2)", &reg()).unwrap();
        match f {
            F::In(t, StrTerm::App { name, .. }) => {
                assert_eq!(t, nconst(2));
                assert_eq!(name, "Row");
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn string_equality_and_length() {
        let f = parse_formula("X = Y & |X| <= 3", &reg()).unwrap();
        let want = fand(
            F::StrEq(svar("X"), svar("Y")),
            F::Leq(nlen(svar("X")), nconst(3)),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn lt_is_sugar() {
        let f = parse_formula("x < 3", &reg()).unwrap();
        assert_eq!(f, F::Leq(nadd(nvar("x"), nconst(1)), nconst(3)));
    }

    #[test]
    fn count_macro_expands() {
        let f = parse_formula("C[2] z<4 : X(z)", &reg()).unwrap();
        let th = |c: NumTerm| F::Thq {
            count: c,
            var: "z".into(),
            bound: nconst(4),
            body: Box::new(F::In(nvar("z"), svar("X"))),
        };
        assert_eq!(f, fand(th(nconst(2)), fnot(th(nadd(nconst(2), nconst(1))))));
    }

    #[test]
    fn parenthesized_formula_vs_term() {
        let f = parse_formula("(x + 1)*y = 3", &reg()).unwrap();
        assert!(matches!(f, F::Eq(..)));
        let g = parse_formula("(x = 0) & true", &reg()).unwrap();
        assert!(matches!(g, F::And(..)));
    }

    #[test]
    fn roundtrip_through_printer() {
        let texts = [
            "X(0) & !X(1)",
            "Th[2] z<4 : X(z)",
            "E Y<=5 A x<5 : Y(x)",
            "Mod[3] z<7 : Row(z;Z)(0)",
            "E z<3 : z = 0 | numones(z;X) <= 1 & true",
            "fse(;X,Y) = 0",
        ];
        for t in texts {
            let f = parse_formula(t, &reg()).unwrap();
            let printed = f.to_string();
            let back = parse_formula(&printed, &reg()).unwrap();
            assert!(alpha_eq(&f, &back), "{} reparsed as {}", t, printed);
        }
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(parse_formula("E true<3 : false", &reg()).is_err());
        assert!(parse_formula("Mod[1] z<3 : X(z)", &reg()).is_err());
    }
}

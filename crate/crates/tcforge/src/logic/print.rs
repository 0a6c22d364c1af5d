use std::fmt;

use super::ast::{Formula, NumTerm, StrTerm};

// Term precedence: atoms 3, * is 2, + is 1.
fn num_prec(t: &NumTerm) -> u8 {
    match t {
        NumTerm::Add(..) => 1,
        NumTerm::Mul(..) => 2,
        _ => 3,
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, t: &NumTerm, min_prec: u8) -> fmt::Result {
    let prec = num_prec(t);
    if prec < min_prec {
        write!(f, "(")?;
        write_num(f, t, 0)?;
        return write!(f, ")");
    }
    match t {
        NumTerm::Const(c) => write!(f, "{}", c),
        NumTerm::Var(v) => write!(f, "{}", v),
        NumTerm::Add(a, b) => {
            write_num(f, a, 1)?;
            write!(f, " + ")?;
            write_num(f, b, 2)
        }
        NumTerm::Mul(a, b) => {
            write_num(f, a, 2)?;
            write!(f, "*")?;
            write_num(f, b, 3)
        }
        NumTerm::Len(s) => write!(f, "|{}|", s),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => write_app(f, name, num_args, str_args),
    }
}

fn write_app(
    f: &mut fmt::Formatter<'_>,
    name: &str,
    num_args: &[NumTerm],
    str_args: &[StrTerm],
) -> fmt::Result {
    write!(f, "{}(", name)?;
    for (k, a) in num_args.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", a)?;
    }
    if !str_args.is_empty() {
        write!(f, ";")?;
        for (k, s) in str_args.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s)?;
        }
    }
    write!(f, ")")
}

impl fmt::Display for NumTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_num(f, self, 0)
    }
}

impl fmt::Display for StrTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrTerm::Var(v) => write!(f, "{}", v),
            StrTerm::App {
                name,
                num_args,
                str_args,
            } => write_app(f, name, num_args, str_args),
        }
    }
}

// Formula precedence: quantifier bodies 0 (extend right), | is 1, & is 2,
// ! is 3, atoms 4.
fn fm_prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Not(..) => 3,
        Formula::ExistsNum { .. }
        | Formula::ForallNum { .. }
        | Formula::ExistsStr { .. }
        | Formula::ForallStr { .. }
        | Formula::Thq { .. }
        | Formula::Modm { .. } => 0,
        _ => 4,
    }
}

fn write_fm(f: &mut fmt::Formatter<'_>, phi: &Formula, min_prec: u8) -> fmt::Result {
    let prec = fm_prec(phi);
    if prec < min_prec {
        write!(f, "(")?;
        write_fm(f, phi, 0)?;
        return write!(f, ")");
    }
    match phi {
        Formula::True => write!(f, "true"),
        Formula::False => write!(f, "false"),
        Formula::Eq(a, b) => write!(f, "{} = {}", a, b),
        Formula::Leq(a, b) => write!(f, "{} <= {}", a, b),
        Formula::In(t, s) => write!(f, "{}({})", s, t),
        Formula::StrEq(a, b) => write!(f, "{} = {}", a, b),
        Formula::Not(a) => {
            write!(f, "!")?;
            write_fm(f, a, 3)
        }
        Formula::And(a, b) => {
            write_fm(f, a, 2)?;
            write!(f, " & ")?;
            write_fm(f, b, 3)
        }
        Formula::Or(a, b) => {
            write_fm(f, a, 1)?;
            write!(f, " | ")?;
            write_fm(f, b, 2)
        }
        Formula::ExistsNum { var, bound, body } => {
            write!(f, "E {}<", var)?;
            write_num(f, bound, 3)?;
            write!(f, " : ")?;
            write_fm(f, body, 0)
        }
        Formula::ForallNum { var, bound, body } => {
            write!(f, "A {}<", var)?;
            write_num(f, bound, 3)?;
            write!(f, " : ")?;
            write_fm(f, body, 0)
        }
        Formula::ExistsStr { var, bound, body } => {
            write!(f, "E {}<=", var)?;
            write_num(f, bound, 3)?;
            write!(f, " : ")?;
            write_fm(f, body, 0)
        }
        Formula::ForallStr { var, bound, body } => {
            write!(f, "A {}<=", var)?;
            write_num(f, bound, 3)?;
            write!(f, " : ")?;
            write_fm(f, body, 0)
        }
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => {
            write!(f, "Th[{}] {}<", count, var)?;
            write_num(f, bound, 3)?;
            write!(f, " : ")?;
            write_fm(f, body, 0)
        }
        Formula::Modm {
            m,
            var,
            bound,
            body,
        } => {
            write!(f, "Mod[{}] {}<", m, var)?;
            write_num(f, bound, 3)?;
            write!(f, " : ")?;
            write_fm(f, body, 0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_fm(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::super::ast::*;
    use super::super::ast::Formula as F;

    #[test]
    fn terms_print_with_minimal_parens() {
        let t = nmul(nadd(nvar("x"), nconst(1)), nvar("y"));
        assert_eq!(t.to_string(), "(x + 1)*y");
        let u = nadd(nmul(nvar("x"), nvar("y")), nconst(1));
        assert_eq!(u.to_string(), "x*y + 1");
    }

    #[test]
    fn formulas_print_readably() {
        let phi = fand(
            F::In(nconst(0), svar("X")),
            fnot(F::In(nconst(1), svar("X"))),
        );
        assert_eq!(phi.to_string(), "X(0) & !X(1)");
        let th = thq(nconst(2), "z", nconst(4), F::In(nvar("z"), svar("X")));
        assert_eq!(th.to_string(), "Th[2] z<4 : X(z)");
        let mixed = f_or(
            fand(F::True, F::False),
            exists_num("x", nconst(5), F::Eq(nvar("x"), nconst(0))),
        );
        assert_eq!(mixed.to_string(), "true & false | (E x<5 : x = 0)");
    }

    #[test]
    fn quantifier_as_operand_is_parenthesized() {
        let q = exists_num("x", nconst(2), F::True);
        let phi = fand(q.clone(), F::False);
        assert_eq!(phi.to_string(), "(E x<2 : true) & false");
        assert_eq!(fnot(q).to_string(), "!(E x<2 : true)");
    }
}

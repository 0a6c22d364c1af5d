use super::delta::{DeltaFormula, DeltaTerm};
use crate::logic::ast::is_str_name;
use crate::logic::{Formula, NumTerm, StrTerm};

/// Both translations are total on a declared fragment and refuse anything
/// else; the message names the offending construct.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("outside the supported fragment: {0}")]
pub struct TranslateError(pub String);

fn unsup<T>(what: impl Into<String>) -> Result<T, TranslateError> {
    Err(TranslateError(what.into()))
}

/// Number-side image of a two-sorted number term. String variables keep
/// their names; their values travel through the set-to-number encoding.
pub fn flat_term(t: &NumTerm) -> Result<DeltaTerm, TranslateError> {
    Ok(match t {
        NumTerm::Const(c) => DeltaTerm::Const(*c),
        NumTerm::Var(x) => DeltaTerm::Var(x.clone()),
        NumTerm::Add(a, b) => DeltaTerm::Add(Box::new(flat_term(a)?), Box::new(flat_term(b)?)),
        NumTerm::Mul(a, b) => DeltaTerm::Mul(Box::new(flat_term(a)?), Box::new(flat_term(b)?)),
        NumTerm::Len(s) => match s.as_ref() {
            StrTerm::Var(x) => DeltaTerm::Len(Box::new(DeltaTerm::Var(x.clone()))),
            StrTerm::App { name, .. } => {
                return unsup(format!("length of the function application {}", name))
            }
        },
        NumTerm::App { name, .. } => return unsup(format!("function application {}", name)),
    })
}

/// Number-side image of a base two-sorted formula: membership becomes a
/// BIT test, string equality becomes number equality, lengths become
/// binary lengths.
pub fn flat_translate(phi: &Formula) -> Result<DeltaFormula, TranslateError> {
    Ok(match phi {
        Formula::True => DeltaFormula::True,
        Formula::False => DeltaFormula::False,
        Formula::Not(a) => DeltaFormula::Not(Box::new(flat_translate(a)?)),
        Formula::And(a, b) => {
            DeltaFormula::And(Box::new(flat_translate(a)?), Box::new(flat_translate(b)?))
        }
        Formula::Or(a, b) => {
            DeltaFormula::Or(Box::new(flat_translate(a)?), Box::new(flat_translate(b)?))
        }
        Formula::Eq(a, b) => DeltaFormula::Eq(flat_term(a)?, flat_term(b)?),
        Formula::Leq(a, b) => DeltaFormula::Leq(flat_term(a)?, flat_term(b)?),
        Formula::In(t, s) => match s {
            StrTerm::Var(x) => DeltaFormula::Eq(
                DeltaTerm::Bit(Box::new(flat_term(t)?), Box::new(DeltaTerm::Var(x.clone()))),
                DeltaTerm::Const(1),
            ),
            StrTerm::App { name, .. } => {
                return unsup(format!("membership in the function application {}", name))
            }
        },
        Formula::StrEq(a, b) => match (a, b) {
            (StrTerm::Var(x), StrTerm::Var(y)) => DeltaFormula::Eq(
                DeltaTerm::Var(x.clone()),
                DeltaTerm::Var(y.clone()),
            ),
            _ => return unsup("string equality over function applications"),
        },
        Formula::ExistsNum { var, bound, body } => DeltaFormula::ExistsNum {
            var: var.clone(),
            bound: flat_term(bound)?,
            body: Box::new(flat_translate(body)?),
        },
        Formula::ForallNum { var, bound, body } => DeltaFormula::ForallNum {
            var: var.clone(),
            bound: flat_term(bound)?,
            body: Box::new(flat_translate(body)?),
        },
        Formula::ExistsStr { .. } | Formula::ForallStr { .. } => {
            return unsup("string quantifier")
        }
        Formula::Thq { .. } => return unsup("threshold quantifier"),
        Formula::Modm { .. } => return unsup("mod quantifier"),
    })
}

/// Two-sorted image of a delta term used in number position. Uppercase
/// variables are string-encoded and may appear only under a length, so a
/// bare one is refused here.
pub fn sharp_term(t: &DeltaTerm) -> Result<NumTerm, TranslateError> {
    Ok(match t {
        DeltaTerm::Const(c) => NumTerm::Const(*c),
        DeltaTerm::Var(x) => {
            if is_str_name(x) {
                return unsup(format!("string-encoded variable {} used as a number", x));
            }
            NumTerm::Var(x.clone())
        }
        DeltaTerm::Succ(a) => NumTerm::Add(
            Box::new(sharp_term(a)?),
            Box::new(NumTerm::Const(1)),
        ),
        DeltaTerm::Add(a, b) => NumTerm::Add(Box::new(sharp_term(a)?), Box::new(sharp_term(b)?)),
        DeltaTerm::Mul(a, b) => NumTerm::Mul(Box::new(sharp_term(a)?), Box::new(sharp_term(b)?)),
        DeltaTerm::Len(a) => match a.as_ref() {
            DeltaTerm::Var(x) if is_str_name(x) => {
                NumTerm::Len(Box::new(StrTerm::Var(x.clone())))
            }
            _ => return unsup("length of anything but a string-encoded variable"),
        },
        DeltaTerm::Half(_) => return unsup("half"),
        DeltaTerm::Smash(_, _) => return unsup("smash"),
        DeltaTerm::Monus(_, _) => return unsup("monus"),
        DeltaTerm::Msp(_, _) => return unsup("MSP"),
        DeltaTerm::Bit(_, _) => return unsup("BIT in term position"),
        DeltaTerm::Mod2(_) => return unsup("mod2"),
    })
}

/// Two-sorted image of a first-sorted formula. The atom BIT(i, X) = 1 with
/// an uppercase X becomes membership, equality of two uppercase variables
/// becomes string equality, everything else goes through `sharp_term`.
pub fn sharp_translate(phi: &DeltaFormula) -> Result<Formula, TranslateError> {
    Ok(match phi {
        DeltaFormula::True => Formula::True,
        DeltaFormula::False => Formula::False,
        DeltaFormula::Not(a) => Formula::Not(Box::new(sharp_translate(a)?)),
        DeltaFormula::And(a, b) => Formula::And(
            Box::new(sharp_translate(a)?),
            Box::new(sharp_translate(b)?),
        ),
        DeltaFormula::Or(a, b) => Formula::Or(
            Box::new(sharp_translate(a)?),
            Box::new(sharp_translate(b)?),
        ),
        DeltaFormula::Leq(a, b) => Formula::Leq(sharp_term(a)?, sharp_term(b)?),
        DeltaFormula::Eq(a, b) => {
            if let (DeltaTerm::Bit(i, x), DeltaTerm::Const(1)) = (a, b) {
                if let DeltaTerm::Var(x) = x.as_ref() {
                    if is_str_name(x) {
                        return Ok(Formula::In(sharp_term(i)?, StrTerm::Var(x.clone())));
                    }
                }
            }
            if let (DeltaTerm::Var(x), DeltaTerm::Var(y)) = (a, b) {
                if is_str_name(x) && is_str_name(y) {
                    return Ok(Formula::StrEq(
                        StrTerm::Var(x.clone()),
                        StrTerm::Var(y.clone()),
                    ));
                }
            }
            Formula::Eq(sharp_term(a)?, sharp_term(b)?)
        }
        DeltaFormula::ExistsNum { var, bound, body } => {
            if is_str_name(var) {
                return unsup(format!("quantified variable {} is string-named", var));
            }
            Formula::ExistsNum {
                var: var.clone(),
                bound: sharp_term(bound)?,
                body: Box::new(sharp_translate(body)?),
            }
        }
        DeltaFormula::ForallNum { var, bound, body } => {
            if is_str_name(var) {
                return unsup(format!("quantified variable {} is string-named", var));
            }
            Formula::ForallNum {
                var: var.clone(),
                bound: sharp_term(bound)?,
                body: Box::new(sharp_translate(body)?),
            }
        }
    })
}

use std::collections::BTreeMap;

use crate::kernel::BitSet;
use crate::logic::{subst_num, Formula, FreshNames, NumTerm, StrTerm};

/// Second opinion on formula truth, deliberately sharing nothing with the
/// main evaluator: quantifiers are unrolled by substituting literal
/// constants into the body, so there is no environment for number
/// variables at all. Only string variables live in a map. Handles the
/// base language plus threshold and modular quantifiers; anything else
/// (function symbols, string quantifiers) is refused.
pub fn oracle_eval(phi: &Formula, strs: &BTreeMap<String, BitSet>) -> Result<bool, String> {
    match phi {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Not(a) => Ok(!oracle_eval(a, strs)?),
        Formula::And(a, b) => Ok(oracle_eval(a, strs)? && oracle_eval(b, strs)?),
        Formula::Or(a, b) => Ok(oracle_eval(a, strs)? || oracle_eval(b, strs)?),
        Formula::Leq(a, b) => Ok(oracle_num(a, strs)? <= oracle_num(b, strs)?),
        Formula::Eq(a, b) => Ok(oracle_num(a, strs)? == oracle_num(b, strs)?),
        Formula::In(t, s) => {
            let i = oracle_num(t, strs)?;
            Ok(resolve(s, strs)?.contains(i))
        }
        Formula::StrEq(a, b) => Ok(resolve(a, strs)? == resolve(b, strs)?),
        Formula::ExistsNum { var, bound, body } => {
            let b = oracle_num(bound, strs)?;
            for v in 0..b {
                if oracle_eval(&plug(body, var, v), strs)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::ForallNum { var, bound, body } => {
            let b = oracle_num(bound, strs)?;
            for v in 0..b {
                if !oracle_eval(&plug(body, var, v), strs)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => {
            let want = oracle_num(count, strs)?;
            Ok(witnesses(var, bound, body, strs)? >= want)
        }
        Formula::Modm {
            m,
            var,
            bound,
            body,
        } => Ok(witnesses(var, bound, body, strs)? % m == 1),
        Formula::ExistsStr { .. } | Formula::ForallStr { .. } => {
            Err("string quantifier".to_string())
        }
    }
}

fn witnesses(
    var: &str,
    bound: &NumTerm,
    body: &Formula,
    strs: &BTreeMap<String, BitSet>,
) -> Result<u64, String> {
    let b = oracle_num(bound, strs)?;
    let mut hits = 0;
    for v in 0..b {
        if oracle_eval(&plug(body, var, v), strs)? {
            hits += 1;
        }
    }
    Ok(hits)
}

fn plug(body: &Formula, var: &str, v: u64) -> Formula {
    let mut fresh = FreshNames::seeded_from(body);
    subst_num(body, var, &NumTerm::Const(v), &mut fresh)
}

fn oracle_num(t: &NumTerm, strs: &BTreeMap<String, BitSet>) -> Result<u64, String> {
    match t {
        NumTerm::Const(c) => Ok(*c),
        NumTerm::Var(v) => Err(format!("number variable {v} survived substitution")),
        NumTerm::Add(a, b) => oracle_num(a, strs)?
            .checked_add(oracle_num(b, strs)?)
            .ok_or_else(|| "overflow".to_string()),
        NumTerm::Mul(a, b) => oracle_num(a, strs)?
            .checked_mul(oracle_num(b, strs)?)
            .ok_or_else(|| "overflow".to_string()),
        NumTerm::Len(s) => Ok(resolve(s, strs)?.len()),
        NumTerm::App { name, .. } => Err(format!("function symbol {name}")),
    }
}

fn resolve<'a>(s: &StrTerm, strs: &'a BTreeMap<String, BitSet>) -> Result<&'a BitSet, String> {
    match s {
        StrTerm::Var(x) => strs
            .get(x)
            .ok_or_else(|| format!("string variable {x} is unassigned")),
        StrTerm::App { name, .. } => Err(format!("function symbol {name}")),
    }
}

use std::collections::BTreeMap;

use crate::kernel::{comprehend, min_witness, BitSet};

use super::ast::{Formula, NumTerm, StrTerm};
use super::registry::{FnDef, FnKind, FunctionRegistry};

/// Values for the free variables of both sorts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub nums: BTreeMap<String, u64>,
    pub strs: BTreeMap<String, BitSet>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn with_num(mut self, name: &str, v: u64) -> Self {
        self.nums.insert(name.to_string(), v);
        self
    }

    pub fn with_str(mut self, name: &str, v: BitSet) -> Self {
        self.strs.insert(name.to_string(), v);
        self
    }

    pub fn set_num(&mut self, name: &str, v: u64) {
        self.nums.insert(name.to_string(), v);
    }

    pub fn set_str(&mut self, name: &str, v: BitSet) {
        self.strs.insert(name.to_string(), v);
    }
}

/// Number quantifier ranges are enumerated; this cap turns runaway bounds
/// into an error instead of a hang.
pub const NUM_QUANT_CAP: u64 = 1 << 24;
/// String quantifiers enumerate all subsets of `[0, bound)`.
pub const STR_QUANT_CAP: u64 = 16;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("number variable {0:?} is unbound")]
    UnboundNum(String),
    #[error("string variable {0:?} is unbound")]
    UnboundStr(String),
    #[error("unknown function {0:?}")]
    UnknownFn(String),
    #[error("function {0:?} applied with wrong arity")]
    Arity(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("quantifier range for {var:?} is {bound}, over the cap {cap}")]
    RangeTooWide { var: String, bound: u64, cap: u64 },
    #[error("{0}")]
    Domain(String),
}

pub fn eval_num_term(
    t: &NumTerm,
    env: &Assignment,
    reg: &FunctionRegistry,
) -> Result<u64, EvalError> {
    match t {
        NumTerm::Const(c) => Ok(*c),
        NumTerm::Var(v) => env
            .nums
            .get(v)
            .copied()
            .ok_or_else(|| EvalError::UnboundNum(v.clone())),
        NumTerm::Add(a, b) => {
            let x = eval_num_term(a, env, reg)?;
            let y = eval_num_term(b, env, reg)?;
            x.checked_add(y).ok_or(EvalError::Overflow("+"))
        }
        NumTerm::Mul(a, b) => {
            let x = eval_num_term(a, env, reg)?;
            let y = eval_num_term(b, env, reg)?;
            x.checked_mul(y).ok_or(EvalError::Overflow("*"))
        }
        NumTerm::Len(s) => Ok(eval_str_term(s, env, reg)?.len()),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => {
            let entry = reg
                .get(name)
                .ok_or_else(|| EvalError::UnknownFn(name.clone()))?;
            if entry.kind != FnKind::Num || entry.arity() != (num_args.len(), str_args.len()) {
                return Err(EvalError::Arity(name.clone()));
            }
            let nums: Vec<u64> = num_args
                .iter()
                .map(|a| eval_num_term(a, env, reg))
                .collect::<Result<_, _>>()?;
            let strs: Vec<BitSet> = str_args
                .iter()
                .map(|s| eval_str_term(s, env, reg))
                .collect::<Result<_, _>>()?;
            match &entry.def {
                FnDef::NumBuiltin { eval, .. } => eval(&nums, &strs),
                FnDef::MinWitness {
                    wit_var,
                    bound,
                    body,
                } => {
                    let param_env = param_env(entry, &nums, &strs);
                    let b = eval_num_term(bound, &param_env, reg)?;
                    if b > NUM_QUANT_CAP {
                        return Err(EvalError::RangeTooWide {
                            var: wit_var.clone(),
                            bound: b,
                            cap: NUM_QUANT_CAP,
                        });
                    }
                    let mut err = None;
                    let w = min_witness(
                        |z| {
                            if err.is_some() {
                                return true;
                            }
                            let mut e = param_env.clone();
                            e.set_num(wit_var, z);
                            match eval_formula(body, &e, reg) {
                                Ok(v) => v,
                                Err(x) => {
                                    err = Some(x);
                                    true
                                }
                            }
                        },
                        b,
                    );
                    match err {
                        Some(e) => Err(e),
                        None => Ok(w),
                    }
                }
                _ => Err(EvalError::Arity(name.clone())),
            }
        }
    }
}

pub fn eval_str_term(
    s: &StrTerm,
    env: &Assignment,
    reg: &FunctionRegistry,
) -> Result<BitSet, EvalError> {
    match s {
        StrTerm::Var(v) => env
            .strs
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::UnboundStr(v.clone())),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => {
            let entry = reg
                .get(name)
                .ok_or_else(|| EvalError::UnknownFn(name.clone()))?;
            if entry.kind != FnKind::Str || entry.arity() != (num_args.len(), str_args.len()) {
                return Err(EvalError::Arity(name.clone()));
            }
            let nums: Vec<u64> = num_args
                .iter()
                .map(|a| eval_num_term(a, env, reg))
                .collect::<Result<_, _>>()?;
            let strs: Vec<BitSet> = str_args
                .iter()
                .map(|t| eval_str_term(t, env, reg))
                .collect::<Result<_, _>>()?;
            match &entry.def {
                FnDef::StrBuiltin { eval, .. } => eval(&nums, &strs),
                FnDef::Comprehension(bd) => {
                    let param_env = param_env(entry, &nums, &strs);
                    let b = eval_num_term(&bd.bound, &param_env, reg)?;
                    if b > NUM_QUANT_CAP {
                        return Err(EvalError::RangeTooWide {
                            var: bd.bit_var.clone(),
                            bound: b,
                            cap: NUM_QUANT_CAP,
                        });
                    }
                    let mut err = None;
                    let out = comprehend(
                        |z| {
                            if err.is_some() {
                                return false;
                            }
                            let mut e = param_env.clone();
                            e.set_num(&bd.bit_var, z);
                            match eval_formula(&bd.body, &e, reg) {
                                Ok(v) => v,
                                Err(x) => {
                                    err = Some(x);
                                    false
                                }
                            }
                        },
                        b,
                    );
                    match err {
                        Some(e) => Err(e),
                        None => Ok(out),
                    }
                }
                _ => Err(EvalError::Arity(name.clone())),
            }
        }
    }
}

fn param_env(entry: &super::registry::FnEntry, nums: &[u64], strs: &[BitSet]) -> Assignment {
    let mut env = Assignment::new();
    for (p, v) in entry.num_params.iter().zip(nums) {
        env.set_num(p, *v);
    }
    for (p, v) in entry.str_params.iter().zip(strs) {
        env.set_str(p, v.clone());
    }
    env
}

/// Truth in the standard model under `env`.
pub fn eval_formula(
    phi: &Formula,
    env: &Assignment,
    reg: &FunctionRegistry,
) -> Result<bool, EvalError> {
    match phi {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Eq(a, b) => Ok(eval_num_term(a, env, reg)? == eval_num_term(b, env, reg)?),
        Formula::Leq(a, b) => Ok(eval_num_term(a, env, reg)? <= eval_num_term(b, env, reg)?),
        Formula::In(t, s) => {
            let i = eval_num_term(t, env, reg)?;
            Ok(eval_str_term(s, env, reg)?.contains(i))
        }
        Formula::StrEq(a, b) => Ok(eval_str_term(a, env, reg)? == eval_str_term(b, env, reg)?),
        Formula::Not(a) => Ok(!eval_formula(a, env, reg)?),
        Formula::And(a, b) => Ok(eval_formula(a, env, reg)? && eval_formula(b, env, reg)?),
        Formula::Or(a, b) => Ok(eval_formula(a, env, reg)? || eval_formula(b, env, reg)?),
        Formula::ExistsNum { var, bound, body } => {
            let b = checked_range(var, eval_num_term(bound, env, reg)?)?;
            for z in 0..b {
                let mut e = env.clone();
                e.set_num(var, z);
                if eval_formula(body, &e, reg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::ForallNum { var, bound, body } => {
            let b = checked_range(var, eval_num_term(bound, env, reg)?)?;
            for z in 0..b {
                let mut e = env.clone();
                e.set_num(var, z);
                if !eval_formula(body, &e, reg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::ExistsStr { var, bound, body } => {
            let b = eval_num_term(bound, env, reg)?;
            for set in subsets(var, b)? {
                let mut e = env.clone();
                e.set_str(var, set);
                if eval_formula(body, &e, reg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::ForallStr { var, bound, body } => {
            let b = eval_num_term(bound, env, reg)?;
            for set in subsets(var, b)? {
                let mut e = env.clone();
                e.set_str(var, set);
                if !eval_formula(body, &e, reg)? {
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
            let need = eval_num_term(count, env, reg)?;
            let b = checked_range(var, eval_num_term(bound, env, reg)?)?;
            let mut have: u64 = 0;
            for z in 0..b {
                let mut e = env.clone();
                e.set_num(var, z);
                if eval_formula(body, &e, reg)? {
                    have += 1;
                    if have >= need {
                        return Ok(true);
                    }
                }
            }
            Ok(have >= need)
        }
        Formula::Modm {
            m,
            var,
            bound,
            body,
        } => {
            let b = checked_range(var, eval_num_term(bound, env, reg)?)?;
            let mut have: u64 = 0;
            for z in 0..b {
                let mut e = env.clone();
                e.set_num(var, z);
                if eval_formula(body, &e, reg)? {
                    have += 1;
                }
            }
            Ok(*m > 0 && have % *m == 1)
        }
    }
}

fn checked_range(var: &str, bound: u64) -> Result<u64, EvalError> {
    if bound > NUM_QUANT_CAP {
        Err(EvalError::RangeTooWide {
            var: var.to_string(),
            bound,
            cap: NUM_QUANT_CAP,
        })
    } else {
        Ok(bound)
    }
}

/// All string values of length at most `bound`, i.e. all subsets of
/// `[0, bound)`, in mask order.
fn subsets(var: &str, bound: u64) -> Result<impl Iterator<Item = BitSet>, EvalError> {
    if bound > STR_QUANT_CAP {
        return Err(EvalError::RangeTooWide {
            var: var.to_string(),
            bound,
            cap: STR_QUANT_CAP,
        });
    }
    Ok((0u64..1 << bound).map(move |mask| {
        let mut s = BitSet::new();
        for i in 0..bound {
            if mask >> i & 1 == 1 {
                s.insert(i);
            }
        }
        s
    }))
}

#[cfg(test)]
mod tests {
    use super::super::ast::*;
    use super::*;
    use crate::kernel::BitSet;
    use Formula as F;

    fn env_x(items: &[u64]) -> Assignment {
        Assignment::new().with_str("X", BitSet::from_indices(items.iter().copied()))
    }

    #[test]
    fn threshold_counts() {
        let reg = FunctionRegistry::standard();
        let phi = thq(nconst(2), "z", nconst(4), F::In(nvar("z"), svar("X")));
        assert_eq!(eval_formula(&phi, &env_x(&[1, 3]), &reg), Ok(true));
        assert_eq!(eval_formula(&phi, &env_x(&[1]), &reg), Ok(false));
    }

    #[test]
    fn mod_quantifier_is_one_mod_m() {
        let reg = FunctionRegistry::standard();
        let phi = F::Modm {
            m: 2,
            var: "z".into(),
            bound: nconst(3),
            body: Box::new(F::In(nvar("z"), svar("X"))),
        };
        assert_eq!(eval_formula(&phi, &env_x(&[0, 2]), &reg), Ok(false));
        assert_eq!(eval_formula(&phi, &env_x(&[0]), &reg), Ok(true));
    }

    #[test]
    fn empty_forall_is_true() {
        let reg = FunctionRegistry::standard();
        let phi = forall_num("x", nconst(0), F::False);
        assert_eq!(eval_formula(&phi, &Assignment::new(), &reg), Ok(true));
    }

    #[test]
    fn term_examples() {
        let reg = FunctionRegistry::standard();
        let env = env_x(&[0, 4]);
        assert_eq!(eval_num_term(&nlen(svar("X")), &env, &reg), Ok(5));
        assert_eq!(
            eval_num_term(&nadd(nconst(1), nconst(1)), &env, &reg),
            Ok(2)
        );
        assert_eq!(
            eval_num_term(&nmul(nlen(svar("X")), nconst(0)), &env, &reg),
            Ok(0)
        );
    }

    #[test]
    fn builtins_evaluate() {
        let reg = FunctionRegistry::standard();
        let env = Assignment::new()
            .with_str("Z", BitSet::from_indices([crate::kernel::pair(1, 2)]));
        let t = NumTerm::App {
            name: "pair".into(),
            num_args: vec![nconst(1), nconst(2)],
            str_args: vec![],
        };
        assert_eq!(eval_num_term(&t, &env, &reg), Ok(16));
        let r = StrTerm::App {
            name: "Row".into(),
            num_args: vec![nconst(1)],
            str_args: vec![svar("Z")],
        };
        assert_eq!(
            eval_str_term(&r, &env, &reg),
            Ok(BitSet::from_indices([2]))
        );
    }

    #[test]
    fn string_quantifiers_enumerate_subsets() {
        let reg = FunctionRegistry::standard();
        // E Y<=2 : Y(1)
        let phi = F::ExistsStr {
            var: "Y".into(),
            bound: nconst(2),
            body: Box::new(F::In(nconst(1), svar("Y"))),
        };
        assert_eq!(eval_formula(&phi, &Assignment::new(), &reg), Ok(true));
        // A Y<=2 : Y(1) is false (empty set).
        let psi = F::ForallStr {
            var: "Y".into(),
            bound: nconst(2),
            body: Box::new(F::In(nconst(1), svar("Y"))),
        };
        assert_eq!(eval_formula(&psi, &Assignment::new(), &reg), Ok(false));
    }

    #[test]
    fn unbound_and_overflow_reported() {
        let reg = FunctionRegistry::standard();
        assert_eq!(
            eval_num_term(&nvar("q"), &Assignment::new(), &reg),
            Err(EvalError::UnboundNum("q".into()))
        );
        let big = nmul(nconst(u64::MAX), nconst(2));
        assert_eq!(
            eval_num_term(&big, &Assignment::new(), &reg),
            Err(EvalError::Overflow("*"))
        );
    }
}

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::ast::{
    fand, fimp, flt, fnot, f_or, nadd, nconst, nmul, nvar, subst_num, subst_str, svar, Formula,
    FreshNames, NumTerm, StrTerm,
};
use super::classify::{classify, FormulaClass};
use super::registry::{collect_symbols, BitDef, FnDef, FunctionRegistry, RegistryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("expected a SigB0 or SigB0Th formula, found {0}")]
    WrongClass(FormulaClass),
    #[error("symbol {0:?} has no bit definition or expansion")]
    NoBitDef(String),
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("quantifier count or bound contains a function application: {0}")]
    NonBaseBound(String),
    #[error("numones argument is not a plain string variable: {0}")]
    NumonesArg(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

/// One induction step of the counting elimination: the nesting depth of
/// `symbol` before and after the step. `before > after` always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthStep {
    pub symbol: String,
    pub before: u32,
    pub after: u32,
}

/// Maximum nesting depth of applications of `symbol`, counting only that
/// symbol: other applications are transparent.
pub fn defined_symbol_depth(f: &Formula, symbol: &str) -> u32 {
    d_formula(f, symbol)
}

fn d_num(t: &NumTerm, sym: &str) -> u32 {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => 0,
        NumTerm::Add(a, b) | NumTerm::Mul(a, b) => d_num(a, sym).max(d_num(b, sym)),
        NumTerm::Len(s) => d_str(s, sym),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => {
            let inner = num_args
                .iter()
                .map(|a| d_num(a, sym))
                .chain(str_args.iter().map(|a| d_str(a, sym)))
                .max()
                .unwrap_or(0);
            inner + u32::from(name == sym)
        }
    }
}

fn d_str(s: &StrTerm, sym: &str) -> u32 {
    match s {
        StrTerm::Var(_) => 0,
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => {
            let inner = num_args
                .iter()
                .map(|a| d_num(a, sym))
                .chain(str_args.iter().map(|a| d_str(a, sym)))
                .max()
                .unwrap_or(0);
            inner + u32::from(name == sym)
        }
    }
}

fn d_formula(f: &Formula, sym: &str) -> u32 {
    match f {
        Formula::True | Formula::False => 0,
        Formula::Eq(a, b) | Formula::Leq(a, b) => d_num(a, sym).max(d_num(b, sym)),
        Formula::In(t, s) => d_num(t, sym).max(d_str(s, sym)),
        Formula::StrEq(a, b) => d_str(a, sym).max(d_str(b, sym)),
        Formula::Not(a) => d_formula(a, sym),
        Formula::And(a, b) | Formula::Or(a, b) => d_formula(a, sym).max(d_formula(b, sym)),
        Formula::ExistsNum { bound, body, .. }
        | Formula::ForallNum { bound, body, .. }
        | Formula::ExistsStr { bound, body, .. }
        | Formula::ForallStr { bound, body, .. }
        | Formula::Modm { bound, body, .. } => d_num(bound, sym).max(d_formula(body, sym)),
        Formula::Thq {
            count, bound, body, ..
        } => d_num(count, sym)
            .max(d_num(bound, sym))
            .max(d_formula(body, sym)),
    }
}

/// Simultaneous variable substitution in a term. Terms have no binders, so a
/// plain walk suffices.
pub(crate) fn subst_map_num(
    t: &NumTerm,
    nmap: &BTreeMap<String, NumTerm>,
    smap: &BTreeMap<String, StrTerm>,
) -> NumTerm {
    match t {
        NumTerm::Const(_) => t.clone(),
        NumTerm::Var(v) => nmap.get(v).cloned().unwrap_or_else(|| t.clone()),
        NumTerm::Add(a, b) => NumTerm::Add(
            Box::new(subst_map_num(a, nmap, smap)),
            Box::new(subst_map_num(b, nmap, smap)),
        ),
        NumTerm::Mul(a, b) => NumTerm::Mul(
            Box::new(subst_map_num(a, nmap, smap)),
            Box::new(subst_map_num(b, nmap, smap)),
        ),
        NumTerm::Len(s) => NumTerm::Len(Box::new(subst_map_str(s, nmap, smap))),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => NumTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| subst_map_num(a, nmap, smap)).collect(),
            str_args: str_args.iter().map(|a| subst_map_str(a, nmap, smap)).collect(),
        },
    }
}

pub(crate) fn subst_map_str(
    s: &StrTerm,
    nmap: &BTreeMap<String, NumTerm>,
    smap: &BTreeMap<String, StrTerm>,
) -> StrTerm {
    match s {
        StrTerm::Var(v) => smap.get(v).cloned().unwrap_or_else(|| s.clone()),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => StrTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| subst_map_num(a, nmap, smap)).collect(),
            str_args: str_args.iter().map(|a| subst_map_str(a, nmap, smap)).collect(),
        },
    }
}

pub(crate) fn param_maps(
    num_params: &[String],
    str_params: &[String],
    num_args: &[NumTerm],
    str_args: &[StrTerm],
) -> (BTreeMap<String, NumTerm>, BTreeMap<String, StrTerm>) {
    let nmap = num_params
        .iter()
        .cloned()
        .zip(num_args.iter().cloned())
        .collect();
    let smap = str_params
        .iter()
        .cloned()
        .zip(str_args.iter().cloned())
        .collect();
    (nmap, smap)
}

/// Params → args in a formula body, capture-avoiding. Two phases through
/// fresh temporaries so the substitution is simultaneous even when an
/// argument mentions another parameter's name.
pub(crate) fn subst_params_formula(
    body: &Formula,
    num_params: &[String],
    str_params: &[String],
    num_args: &[NumTerm],
    str_args: &[StrTerm],
    fresh: &mut FreshNames,
) -> Formula {
    let mut f = body.clone();
    let mut ntmp = Vec::new();
    for p in num_params {
        let t = fresh.fresh("tmp");
        f = subst_num(&f, p, &nvar(&t), fresh);
        ntmp.push(t);
    }
    let mut stmp = Vec::new();
    for p in str_params {
        let t = fresh.fresh("TMP");
        f = subst_str(&f, p, &svar(&t), fresh);
        stmp.push(t);
    }
    for (t, arg) in ntmp.iter().zip(num_args) {
        f = subst_num(&f, t, arg, fresh);
    }
    for (t, arg) in stmp.iter().zip(str_args) {
        f = subst_str(&f, t, arg, fresh);
    }
    f
}

/// A base-language term that dominates `t` pointwise: every function
/// application is replaced by a syntactic bound on its value. Used to hoist
/// quantifier bounds that would otherwise mention defined functions.
pub fn upper_bound_term(t: &NumTerm, reg: &FunctionRegistry) -> Result<NumTerm, TransformError> {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => Ok(t.clone()),
        NumTerm::Add(a, b) => Ok(nadd(upper_bound_term(a, reg)?, upper_bound_term(b, reg)?)),
        NumTerm::Mul(a, b) => Ok(nmul(upper_bound_term(a, reg)?, upper_bound_term(b, reg)?)),
        NumTerm::Len(s) => ub_len(s, reg),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => {
            if name == "numones" {
                return upper_bound_term(&num_args[0], reg);
            }
            let entry = reg
                .get(name)
                .ok_or_else(|| TransformError::NoBitDef(name.clone()))?;
            let (nmap, smap) = param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
            match &entry.def {
                FnDef::NumBuiltin {
                    expansion: Some(e), ..
                } => upper_bound_term(&subst_map_num(e, &nmap, &smap), reg),
                FnDef::NumBuiltin { .. } => match name.as_str() {
                    "pd" => upper_bound_term(&num_args[0], reg),
                    "fse" => ub_len(&str_args[0], reg),
                    _ => Err(TransformError::NoBitDef(name.clone())),
                },
                FnDef::MinWitness { bound, .. } => {
                    upper_bound_term(&subst_map_num(bound, &nmap, &smap), reg)
                }
                FnDef::StrBuiltin { .. } | FnDef::Comprehension(_) => {
                    Err(TransformError::NoBitDef(name.clone()))
                }
            }
        }
    }
}

/// Bound on `|s|`: a string function's values sit below its length bound.
fn ub_len(s: &StrTerm, reg: &FunctionRegistry) -> Result<NumTerm, TransformError> {
    match s {
        StrTerm::Var(_) => Ok(NumTerm::Len(Box::new(s.clone()))),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => {
            let entry = reg
                .get(name)
                .ok_or_else(|| TransformError::NoBitDef(name.clone()))?;
            let bd = entry
                .bit_def()
                .ok_or_else(|| TransformError::NoBitDef(name.clone()))?;
            let (nmap, smap) = param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
            upper_bound_term(&subst_map_num(&bd.bound, &nmap, &smap), reg)
        }
    }
}

fn check_bounds_base(f: &Formula) -> Result<(), TransformError> {
    fn term_base(t: &NumTerm) -> bool {
        match t {
            NumTerm::Const(_) | NumTerm::Var(_) => true,
            NumTerm::Add(a, b) | NumTerm::Mul(a, b) => term_base(a) && term_base(b),
            NumTerm::Len(s) => matches!(**s, StrTerm::Var(_)),
            NumTerm::App { .. } => false,
        }
    }
    fn walk(f: &Formula) -> Result<(), TransformError> {
        let bad = |t: &NumTerm| TransformError::NonBaseBound(t.to_string());
        match f {
            Formula::True
            | Formula::False
            | Formula::Eq(..)
            | Formula::Leq(..)
            | Formula::In(..)
            | Formula::StrEq(..) => Ok(()),
            Formula::Not(a) => walk(a),
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a)?;
                walk(b)
            }
            Formula::ExistsNum { bound, body, .. }
            | Formula::ForallNum { bound, body, .. }
            | Formula::ExistsStr { bound, body, .. }
            | Formula::ForallStr { bound, body, .. }
            | Formula::Modm { bound, body, .. } => {
                if !term_base(bound) {
                    return Err(bad(bound));
                }
                walk(body)
            }
            Formula::Thq {
                count, bound, body, ..
            } => {
                if !term_base(count) {
                    return Err(bad(count));
                }
                if !term_base(bound) {
                    return Err(bad(bound));
                }
                walk(body)
            }
        }
    }
    walk(f)
}

/// Inline every number function that carries a term expansion (pair, and any
/// future syntactic sugar) so downstream passes see base arithmetic.
fn expand_num_apps_term(t: &NumTerm, reg: &FunctionRegistry) -> NumTerm {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => t.clone(),
        NumTerm::Add(a, b) => nadd(expand_num_apps_term(a, reg), expand_num_apps_term(b, reg)),
        NumTerm::Mul(a, b) => nmul(expand_num_apps_term(a, reg), expand_num_apps_term(b, reg)),
        NumTerm::Len(s) => NumTerm::Len(Box::new(expand_num_apps_str(s, reg))),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => {
            let num_args: Vec<_> = num_args
                .iter()
                .map(|a| expand_num_apps_term(a, reg))
                .collect();
            let str_args: Vec<_> = str_args
                .iter()
                .map(|a| expand_num_apps_str(a, reg))
                .collect();
            if let Some(entry) = reg.get(name) {
                if let Some(e) = entry.expansion() {
                    let (nmap, smap) =
                        param_maps(&entry.num_params, &entry.str_params, &num_args, &str_args);
                    return expand_num_apps_term(&subst_map_num(e, &nmap, &smap), reg);
                }
            }
            NumTerm::App {
                name: name.clone(),
                num_args,
                str_args,
            }
        }
    }
}

fn expand_num_apps_str(s: &StrTerm, reg: &FunctionRegistry) -> StrTerm {
    match s {
        StrTerm::Var(_) => s.clone(),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => StrTerm::App {
            name: name.clone(),
            num_args: num_args
                .iter()
                .map(|a| expand_num_apps_term(a, reg))
                .collect(),
            str_args: str_args
                .iter()
                .map(|a| expand_num_apps_str(a, reg))
                .collect(),
        },
    }
}

fn expand_num_apps(f: &Formula, reg: &FunctionRegistry) -> Formula {
    map_terms(f, &mut |t| expand_num_apps_term(t, reg), &mut |s| {
        expand_num_apps_str(s, reg)
    })
}

/// Rebuild a formula applying term maps everywhere, including quantifier
/// bounds; the structure of the formula is untouched.
fn map_terms(
    f: &Formula,
    mn: &mut dyn FnMut(&NumTerm) -> NumTerm,
    ms: &mut dyn FnMut(&StrTerm) -> StrTerm,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(mn(a), mn(b)),
        Formula::Leq(a, b) => Formula::Leq(mn(a), mn(b)),
        Formula::In(t, s) => Formula::In(mn(t), ms(s)),
        Formula::StrEq(a, b) => Formula::StrEq(ms(a), ms(b)),
        Formula::Not(a) => fnot(map_terms(a, mn, ms)),
        Formula::And(a, b) => {
            let l = map_terms(a, mn, ms);
            fand(l, map_terms(b, mn, ms))
        }
        Formula::Or(a, b) => {
            let l = map_terms(a, mn, ms);
            f_or(l, map_terms(b, mn, ms))
        }
        Formula::ExistsNum { var, bound, body } => Formula::ExistsNum {
            var: var.clone(),
            bound: mn(bound),
            body: Box::new(map_terms(body, mn, ms)),
        },
        Formula::ForallNum { var, bound, body } => Formula::ForallNum {
            var: var.clone(),
            bound: mn(bound),
            body: Box::new(map_terms(body, mn, ms)),
        },
        Formula::ExistsStr { var, bound, body } => Formula::ExistsStr {
            var: var.clone(),
            bound: mn(bound),
            body: Box::new(map_terms(body, mn, ms)),
        },
        Formula::ForallStr { var, bound, body } => Formula::ForallStr {
            var: var.clone(),
            bound: mn(bound),
            body: Box::new(map_terms(body, mn, ms)),
        },
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => Formula::Thq {
            count: mn(count),
            var: var.clone(),
            bound: mn(bound),
            body: Box::new(map_terms(body, mn, ms)),
        },
        Formula::Modm { m, var, bound, body } => Formula::Modm {
            m: *m,
            var: var.clone(),
            bound: mn(bound),
            body: Box::new(map_terms(body, mn, ms)),
        },
    }
}

/// String extensionality, used to push equality between defined strings down
/// to membership atoms the elimination can handle. Plain variable equalities
/// are left alone: they are base atoms already.
fn expand_str_eq(
    f: &Formula,
    reg: &FunctionRegistry,
    fresh: &mut FreshNames,
) -> Result<Formula, TransformError> {
    Ok(match f {
        Formula::StrEq(a, b)
            if matches!(a, StrTerm::App { .. }) || matches!(b, StrTerm::App { .. }) =>
        {
            let z = fresh.fresh("z");
            let la = NumTerm::Len(Box::new(a.clone()));
            let lb = NumTerm::Len(Box::new(b.clone()));
            let ub = upper_bound_term(&la, reg)?;
            let same_bits = Formula::ForallNum {
                var: z.clone(),
                bound: ub,
                body: Box::new(fimp(
                    flt(nvar(&z), la.clone()),
                    super::ast::fiff(
                        Formula::In(nvar(&z), a.clone()),
                        Formula::In(nvar(&z), b.clone()),
                    ),
                )),
            };
            fand(Formula::Eq(la, lb), same_bits)
        }
        Formula::Not(a) => fnot(expand_str_eq(a, reg, fresh)?),
        Formula::And(a, b) => {
            let l = expand_str_eq(a, reg, fresh)?;
            fand(l, expand_str_eq(b, reg, fresh)?)
        }
        Formula::Or(a, b) => {
            let l = expand_str_eq(a, reg, fresh)?;
            f_or(l, expand_str_eq(b, reg, fresh)?)
        }
        Formula::ExistsNum { var, bound, body } => Formula::ExistsNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(expand_str_eq(body, reg, fresh)?),
        },
        Formula::ForallNum { var, bound, body } => Formula::ForallNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(expand_str_eq(body, reg, fresh)?),
        },
        Formula::ExistsStr { var, bound, body } => Formula::ExistsStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(expand_str_eq(body, reg, fresh)?),
        },
        Formula::ForallStr { var, bound, body } => Formula::ForallStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(expand_str_eq(body, reg, fresh)?),
        },
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => Formula::Thq {
            count: count.clone(),
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(expand_str_eq(body, reg, fresh)?),
        },
        Formula::Modm { m, var, bound, body } => Formula::Modm {
            m: *m,
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(expand_str_eq(body, reg, fresh)?),
        },
        _ => f.clone(),
    })
}

fn seed_registry_names(fresh: &mut FreshNames, reg: &FunctionRegistry) {
    for e in reg.entries() {
        fresh.reserve(&e.name);
        for p in e.num_params.iter().chain(e.str_params.iter()) {
            fresh.reserve(p);
        }
        let mut reserve_term = |t: &NumTerm| {
            let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
            t.collect_vars(&mut n, &mut s);
            for v in n.iter().chain(s.iter()) {
                fresh.reserve(v);
            }
        };
        match &e.def {
            FnDef::NumBuiltin { expansion, .. } => {
                if let Some(t) = expansion {
                    reserve_term(t);
                }
            }
            FnDef::StrBuiltin { bit_def, .. } | FnDef::Comprehension(bit_def) => {
                reserve_term(&bit_def.bound);
                fresh.reserve(&bit_def.bit_var);
                fresh.reserve_all(&bit_def.body);
            }
            FnDef::MinWitness {
                wit_var,
                bound,
                body,
            } => {
                reserve_term(bound);
                fresh.reserve(wit_var);
                fresh.reserve_all(body);
            }
        }
    }
}

pub fn eliminate_counting(
    phi: &Formula,
    reg: &FunctionRegistry,
) -> Result<Formula, TransformError> {
    eliminate_counting_traced(phi, reg).map(|(f, _)| f)
}

/// Rewrite a formula over numones and bit-defined string functions into an
/// equivalent one using only base symbols and threshold quantifiers. The
/// trace records each induction step; per symbol the depth strictly drops.
pub fn eliminate_counting_traced(
    phi: &Formula,
    reg: &FunctionRegistry,
) -> Result<(Formula, Vec<DepthStep>), TransformError> {
    let cls = classify(phi);
    if !matches!(cls, FormulaClass::SigB0 | FormulaClass::SigB0Th) {
        return Err(TransformError::WrongClass(cls));
    }
    check_bounds_base(phi)?;
    let mut syms = BTreeSet::new();
    collect_symbols(phi, &mut syms);
    for s in &syms {
        if s == "numones" {
            continue;
        }
        let entry = reg
            .get(s)
            .ok_or_else(|| TransformError::NoBitDef(s.clone()))?;
        if entry.bit_def().is_none() && entry.expansion().is_none() {
            return Err(TransformError::NoBitDef(s.clone()));
        }
    }
    let mut fresh = FreshNames::seeded_from(phi);
    seed_registry_names(&mut fresh, reg);
    let f = expand_num_apps(phi, reg);
    let f = expand_str_eq(&f, reg, &mut fresh)?;
    let mut trace = Vec::new();
    let out = elim(&f, reg, &mut fresh, &mut trace)?;
    Ok((out, trace))
}

fn elim(
    f: &Formula,
    reg: &FunctionRegistry,
    fresh: &mut FreshNames,
    trace: &mut Vec<DepthStep>,
) -> Result<Formula, TransformError> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(..) | Formula::Leq(..) | Formula::In(..) | Formula::StrEq(..) => {
            elim_atom(f, reg, fresh, trace)?
        }
        Formula::Not(a) => fnot(elim(a, reg, fresh, trace)?),
        Formula::And(a, b) => {
            let l = elim(a, reg, fresh, trace)?;
            fand(l, elim(b, reg, fresh, trace)?)
        }
        Formula::Or(a, b) => {
            let l = elim(a, reg, fresh, trace)?;
            f_or(l, elim(b, reg, fresh, trace)?)
        }
        Formula::ExistsNum { var, bound, body } => Formula::ExistsNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(elim(body, reg, fresh, trace)?),
        },
        Formula::ForallNum { var, bound, body } => Formula::ForallNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(elim(body, reg, fresh, trace)?),
        },
        Formula::ExistsStr { var, bound, body } => Formula::ExistsStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(elim(body, reg, fresh, trace)?),
        },
        Formula::ForallStr { var, bound, body } => Formula::ForallStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(elim(body, reg, fresh, trace)?),
        },
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => Formula::Thq {
            count: count.clone(),
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(elim(body, reg, fresh, trace)?),
        },
        Formula::Modm { m, var, bound, body } => Formula::Modm {
            m: *m,
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(elim(body, reg, fresh, trace)?),
        },
    })
}

fn collect_str_app_names_num(t: &NumTerm, out: &mut BTreeSet<String>) {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => {}
        NumTerm::Add(a, b) | NumTerm::Mul(a, b) => {
            collect_str_app_names_num(a, out);
            collect_str_app_names_num(b, out);
        }
        NumTerm::Len(s) => collect_str_app_names_str(s, out),
        NumTerm::App {
            num_args, str_args, ..
        } => {
            for a in num_args {
                collect_str_app_names_num(a, out);
            }
            for a in str_args {
                collect_str_app_names_str(a, out);
            }
        }
    }
}

fn collect_str_app_names_str(s: &StrTerm, out: &mut BTreeSet<String>) {
    if let StrTerm::App {
        name,
        num_args,
        str_args,
    } = s
    {
        out.insert(name.clone());
        for a in num_args {
            collect_str_app_names_num(a, out);
        }
        for a in str_args {
            collect_str_app_names_str(a, out);
        }
    }
}

fn atom_terms(atom: &Formula) -> (Vec<&NumTerm>, Vec<&StrTerm>) {
    match atom {
        Formula::Eq(a, b) | Formula::Leq(a, b) => (vec![a, b], vec![]),
        Formula::In(t, s) => (vec![t], vec![s]),
        Formula::StrEq(a, b) => (vec![], vec![a, b]),
        _ => (vec![], vec![]),
    }
}

fn collect_max_apps_num(t: &NumTerm, sym: &str, k: u32, out: &mut Vec<StrTerm>) {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => {}
        NumTerm::Add(a, b) | NumTerm::Mul(a, b) => {
            collect_max_apps_num(a, sym, k, out);
            collect_max_apps_num(b, sym, k, out);
        }
        NumTerm::Len(s) => collect_max_apps_str(s, sym, k, out),
        NumTerm::App {
            num_args, str_args, ..
        } => {
            for a in num_args {
                collect_max_apps_num(a, sym, k, out);
            }
            for a in str_args {
                collect_max_apps_str(a, sym, k, out);
            }
        }
    }
}

fn collect_max_apps_str(s: &StrTerm, sym: &str, k: u32, out: &mut Vec<StrTerm>) {
    if let StrTerm::App {
        name,
        num_args,
        str_args,
    } = s
    {
        if name == sym && d_str(s, sym) == k {
            if !out.contains(s) {
                out.push(s.clone());
            }
            return;
        }
        for a in num_args {
            collect_max_apps_num(a, sym, k, out);
        }
        for a in str_args {
            collect_max_apps_str(a, sym, k, out);
        }
    }
}

fn replace_apps_num(t: &NumTerm, map: &[(StrTerm, String)]) -> NumTerm {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => t.clone(),
        NumTerm::Add(a, b) => nadd(replace_apps_num(a, map), replace_apps_num(b, map)),
        NumTerm::Mul(a, b) => nmul(replace_apps_num(a, map), replace_apps_num(b, map)),
        NumTerm::Len(s) => NumTerm::Len(Box::new(replace_apps_str(s, map))),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => NumTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| replace_apps_num(a, map)).collect(),
            str_args: str_args.iter().map(|a| replace_apps_str(a, map)).collect(),
        },
    }
}

fn replace_apps_str(s: &StrTerm, map: &[(StrTerm, String)]) -> StrTerm {
    for (app, w) in map {
        if s == app {
            return svar(w);
        }
    }
    match s {
        StrTerm::Var(_) => s.clone(),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => StrTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| replace_apps_num(a, map)).collect(),
            str_args: str_args.iter().map(|a| replace_apps_str(a, map)).collect(),
        },
    }
}

/// Replace `|W|` by the matching fresh number variable.
fn replace_len_num(t: &NumTerm, map: &BTreeMap<String, String>) -> NumTerm {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => t.clone(),
        NumTerm::Add(a, b) => nadd(replace_len_num(a, map), replace_len_num(b, map)),
        NumTerm::Mul(a, b) => nmul(replace_len_num(a, map), replace_len_num(b, map)),
        NumTerm::Len(s) => {
            if let StrTerm::Var(v) = s.as_ref() {
                if let Some(z) = map.get(v) {
                    return nvar(z);
                }
            }
            NumTerm::Len(Box::new(replace_len_str(s, map)))
        }
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => NumTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| replace_len_num(a, map)).collect(),
            str_args: str_args.iter().map(|a| replace_len_str(a, map)).collect(),
        },
    }
}

fn replace_len_str(s: &StrTerm, map: &BTreeMap<String, String>) -> StrTerm {
    match s {
        StrTerm::Var(_) => s.clone(),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => StrTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| replace_len_num(a, map)).collect(),
            str_args: str_args.iter().map(|a| replace_len_str(a, map)).collect(),
        },
    }
}

struct WInfo {
    w: String,
    t_prime: NumTerm,
    bit: String,
    phi: Formula,
}

/// Replace membership atoms `W(r)` by `r < t' ∧ φ(r)`.
fn replace_membership(
    f: &Formula,
    infos: &[WInfo],
    fresh: &mut FreshNames,
) -> Formula {
    match f {
        Formula::In(r, StrTerm::Var(v)) => {
            for info in infos {
                if *v == info.w {
                    let guard = flt(r.clone(), info.t_prime.clone());
                    let body = subst_num(&info.phi, &info.bit, r, fresh);
                    return fand(guard, body);
                }
            }
            f.clone()
        }
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Leq(..)
        | Formula::In(..)
        | Formula::StrEq(..) => f.clone(),
        Formula::Not(a) => fnot(replace_membership(a, infos, fresh)),
        Formula::And(a, b) => {
            let l = replace_membership(a, infos, fresh);
            fand(l, replace_membership(b, infos, fresh))
        }
        Formula::Or(a, b) => {
            let l = replace_membership(a, infos, fresh);
            f_or(l, replace_membership(b, infos, fresh))
        }
        Formula::ExistsNum { var, bound, body } => Formula::ExistsNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(replace_membership(body, infos, fresh)),
        },
        Formula::ForallNum { var, bound, body } => Formula::ForallNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(replace_membership(body, infos, fresh)),
        },
        Formula::ExistsStr { var, bound, body } => Formula::ExistsStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(replace_membership(body, infos, fresh)),
        },
        Formula::ForallStr { var, bound, body } => Formula::ForallStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(replace_membership(body, infos, fresh)),
        },
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => Formula::Thq {
            count: count.clone(),
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(replace_membership(body, infos, fresh)),
        },
        Formula::Modm { m, var, bound, body } => Formula::Modm {
            m: *m,
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(replace_membership(body, infos, fresh)),
        },
    }
}

fn elim_atom(
    atom: &Formula,
    reg: &FunctionRegistry,
    fresh: &mut FreshNames,
    trace: &mut Vec<DepthStep>,
) -> Result<Formula, TransformError> {
    let (nts, sts) = atom_terms(atom);
    let mut names = BTreeSet::new();
    for t in &nts {
        collect_str_app_names_num(t, &mut names);
    }
    for s in &sts {
        collect_str_app_names_str(s, &mut names);
    }
    if let Some(sym) = names
        .iter()
        .max_by_key(|n| reg.index_of(n).unwrap_or(0))
        .cloned()
    {
        return elim_string_fn(atom, &sym, reg, fresh, trace);
    }
    elim_numones(atom, fresh, trace)
}

fn elim_string_fn(
    atom: &Formula,
    sym: &str,
    reg: &FunctionRegistry,
    fresh: &mut FreshNames,
    trace: &mut Vec<DepthStep>,
) -> Result<Formula, TransformError> {
    let entry = reg
        .get(sym)
        .ok_or_else(|| TransformError::NoBitDef(sym.to_string()))?;
    let bd: &BitDef = entry
        .bit_def()
        .ok_or_else(|| TransformError::NoBitDef(sym.to_string()))?;
    let k1 = d_formula(atom, sym);
    debug_assert!(k1 >= 1);
    let mut occs: Vec<StrTerm> = Vec::new();
    let (nts, sts) = atom_terms(atom);
    for t in nts {
        collect_max_apps_num(t, sym, k1, &mut occs);
    }
    for s in sts {
        collect_max_apps_str(s, sym, k1, &mut occs);
    }
    let wmap: Vec<(StrTerm, String)> = occs
        .into_iter()
        .map(|o| {
            let w = fresh.fresh("W");
            (o, w)
        })
        .collect();
    let psi_prime = map_terms(
        atom,
        &mut |t| replace_apps_num(t, &wmap),
        &mut |s| replace_apps_str(s, &wmap),
    );
    let after = d_formula(&psi_prime, sym);
    debug_assert!(after < k1);
    trace.push(DepthStep {
        symbol: sym.to_string(),
        before: k1,
        after,
    });
    let theta = elim(&psi_prime, reg, fresh, trace)?;

    let mut infos = Vec::new();
    let mut len_map = BTreeMap::new();
    let mut deltas = Vec::new();
    let mut binders = Vec::new();
    for (app, w) in &wmap {
        let (num_args, str_args) = match app {
            StrTerm::App {
                num_args, str_args, ..
            } => (num_args, str_args),
            StrTerm::Var(_) => unreachable!("collected occurrences are applications"),
        };
        let bit = fresh.fresh(&bd.bit_var);
        let body0 = subst_num(&bd.body, &bd.bit_var, &nvar(&bit), fresh);
        let phi_raw = subst_params_formula(
            &body0,
            &entry.num_params,
            &entry.str_params,
            num_args,
            str_args,
            fresh,
        );
        let phi = expand_num_apps(&phi_raw, reg);
        let (nmap, smap) = param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
        let t_prime = expand_num_apps_term(&subst_map_num(&bd.bound, &nmap, &smap), reg);
        let z = fresh.fresh("z");
        let ub = upper_bound_term(&t_prime, reg)?;

        let x = fresh.fresh("x");
        let no_bits_from_z = Formula::ForallNum {
            var: x.clone(),
            bound: ub.clone(),
            body: Box::new(fimp(
                fand(
                    Formula::Leq(nadd(nvar(&x), nconst(1)), t_prime.clone()),
                    Formula::Leq(nvar(&z), nvar(&x)),
                ),
                fnot(subst_num(&phi, &bit, &nvar(&x), fresh)),
            )),
        };
        let wv = fresh.fresh("w");
        let bit_below_z = f_or(
            Formula::Eq(nvar(&z), nconst(0)),
            Formula::ExistsNum {
                var: wv.clone(),
                bound: nvar(&z),
                body: Box::new(fand(
                    Formula::Eq(nadd(nvar(&wv), nconst(1)), nvar(&z)),
                    subst_num(&phi, &bit, &nvar(&wv), fresh),
                )),
            },
        );
        let delta = fand(
            Formula::Leq(nvar(&z), t_prime.clone()),
            fand(no_bits_from_z, bit_below_z),
        );
        deltas.push(delta);
        binders.push((z.clone(), nadd(ub, nconst(1))));
        len_map.insert(w.clone(), z);
        infos.push(WInfo {
            w: w.clone(),
            t_prime,
            bit,
            phi,
        });
    }

    let theta1 = map_terms(
        &theta,
        &mut |t| replace_len_num(t, &len_map),
        &mut |s| replace_len_str(s, &len_map),
    );
    let mut conj = theta1;
    for d in deltas {
        conj = fand(conj, d);
    }
    for (z, bound) in binders.into_iter().rev() {
        conj = Formula::ExistsNum {
            var: z,
            bound,
            body: Box::new(conj),
        };
    }
    let theta3 = replace_membership(&conj, &infos, fresh);
    elim(&theta3, reg, fresh, trace)
}

fn collect_numones_num(t: &NumTerm, out: &mut Vec<NumTerm>) {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) | NumTerm::Len(_) => {}
        NumTerm::Add(a, b) | NumTerm::Mul(a, b) => {
            collect_numones_num(a, out);
            collect_numones_num(b, out);
        }
        NumTerm::App {
            name, num_args, ..
        } => {
            for a in num_args {
                collect_numones_num(a, out);
            }
            if name == "numones" && !out.contains(t) {
                out.push(t.clone());
            }
        }
    }
}

fn replace_numones_num(t: &NumTerm, map: &[(NumTerm, String)]) -> NumTerm {
    for (occ, u) in map {
        if t == occ {
            return nvar(u);
        }
    }
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) | NumTerm::Len(_) => t.clone(),
        NumTerm::Add(a, b) => nadd(replace_numones_num(a, map), replace_numones_num(b, map)),
        NumTerm::Mul(a, b) => nmul(replace_numones_num(a, map), replace_numones_num(b, map)),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => NumTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| replace_numones_num(a, map)).collect(),
            str_args: str_args.clone(),
        },
    }
}

/// Base case of the elimination: every remaining defined occurrence is a
/// numones over a plain string variable. Each distinct occurrence gets an
/// existentially quantified value pinned by a threshold pair.
fn elim_numones(
    atom: &Formula,
    fresh: &mut FreshNames,
    trace: &mut Vec<DepthStep>,
) -> Result<Formula, TransformError> {
    let mut occs = Vec::new();
    let (nts, _) = atom_terms(atom);
    for t in &nts {
        collect_numones_num(t, &mut occs);
    }
    if occs.is_empty() {
        return Ok(atom.clone());
    }
    let before = d_formula(atom, "numones");
    trace.push(DepthStep {
        symbol: "numones".to_string(),
        before,
        after: 0,
    });
    // Inner occurrences come first in `occs` (post-order), so each t'_k only
    // mentions u_i with i < k.
    let map: Vec<(NumTerm, String)> = occs
        .into_iter()
        .map(|occ| {
            let u = fresh.fresh("u");
            (occ, u)
        })
        .collect();
    let mut pieces = Vec::new();
    for (occ, u) in &map {
        let (t_k, x_k) = match occ {
            NumTerm::App {
                num_args, str_args, ..
            } => (&num_args[0], &str_args[0]),
            _ => unreachable!("collected occurrences are applications"),
        };
        let xv = match x_k {
            StrTerm::Var(v) => v.clone(),
            StrTerm::App { .. } => return Err(TransformError::NumonesArg(x_k.to_string())),
        };
        // Only occurrences strictly inside t_k can match here.
        let t_prime = replace_numones_num(t_k, &map);
        pieces.push((u.clone(), t_prime, xv));
    }
    let psi_prime = map_terms(
        atom,
        &mut |t| replace_numones_num(t, &map),
        &mut |s| s.clone(),
    );
    let mut conj = psi_prime;
    for (u, t_prime, xv) in &pieces {
        let z = fresh.fresh("z");
        let member = Formula::In(nvar(&z), svar(xv));
        let at_least = Formula::Thq {
            count: nvar(u),
            var: z.clone(),
            bound: t_prime.clone(),
            body: Box::new(member.clone()),
        };
        let no_more = Formula::Thq {
            count: nadd(nvar(u), nconst(1)),
            var: z,
            bound: t_prime.clone(),
            body: Box::new(member),
        };
        conj = fand(conj, fand(at_least, fnot(no_more)));
    }
    for (u, t_prime, _) in pieces.into_iter().rev() {
        conj = Formula::ExistsNum {
            var: u,
            bound: nadd(t_prime, nconst(1)),
            body: Box::new(conj),
        };
    }
    Ok(conj)
}

/// Threshold atoms become counts over registered comprehension functions:
/// `Th[s] z<t φ` turns into `s <= numones(t, F)` where `F(z) ↔ z<t ∧ φ`.
pub fn lower_th_to_count(
    phi: &Formula,
    reg: &mut FunctionRegistry,
) -> Result<Formula, TransformError> {
    let cls = classify(phi);
    if !matches!(cls, FormulaClass::SigB0 | FormulaClass::SigB0Th) {
        return Err(TransformError::WrongClass(cls));
    }
    lower(phi, reg)
}

fn lower(f: &Formula, reg: &mut FunctionRegistry) -> Result<Formula, TransformError> {
    Ok(match f {
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Leq(..)
        | Formula::In(..)
        | Formula::StrEq(..) => f.clone(),
        Formula::Not(a) => fnot(lower(a, reg)?),
        Formula::And(a, b) => {
            let l = lower(a, reg)?;
            fand(l, lower(b, reg)?)
        }
        Formula::Or(a, b) => {
            let l = lower(a, reg)?;
            f_or(l, lower(b, reg)?)
        }
        Formula::ExistsNum { var, bound, body } => Formula::ExistsNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(lower(body, reg)?),
        },
        Formula::ForallNum { var, bound, body } => Formula::ForallNum {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(lower(body, reg)?),
        },
        Formula::ExistsStr { var, bound, body } => Formula::ExistsStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(lower(body, reg)?),
        },
        Formula::ForallStr { var, bound, body } => Formula::ForallStr {
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(lower(body, reg)?),
        },
        Formula::Modm { m, var, bound, body } => Formula::Modm {
            m: *m,
            var: var.clone(),
            bound: bound.clone(),
            body: Box::new(lower(body, reg)?),
        },
        Formula::Thq {
            count,
            var,
            bound,
            body,
        } => {
            if count == &nconst(0) {
                return Ok(Formula::True);
            }
            let body = lower(body, reg)?;
            let (mut nfree, mut sfree) = body.free_vars();
            bound.collect_vars(&mut nfree, &mut sfree);
            nfree.remove(var);
            let num_params: Vec<String> = nfree.into_iter().collect();
            let str_params: Vec<String> = sfree.into_iter().collect();
            let name = reg.fresh_str_fn_name();
            reg.register_comprehension(
                &name,
                num_params.clone(),
                str_params.clone(),
                BitDef {
                    bit_var: var.clone(),
                    bound: bound.clone(),
                    body,
                },
            )?;
            let witnesses = StrTerm::App {
                name,
                num_args: num_params.iter().map(|p| nvar(p)).collect(),
                str_args: str_params.iter().map(|p| svar(p)).collect(),
            };
            Formula::Leq(
                count.clone(),
                NumTerm::App {
                    name: "numones".to_string(),
                    num_args: vec![bound.clone()],
                    str_args: vec![witnesses],
                },
            )
        }
    })
}

/// `φ(y mod m)` as a bounded existential: some residue r < m and quotient q
/// with y = q·m + r satisfy φ(r).
pub fn modm_abbrev(
    body: &Formula,
    hole: &str,
    y: &NumTerm,
    m: u64,
    reg: &FunctionRegistry,
) -> Result<Formula, TransformError> {
    if m < 2 {
        return Err(TransformError::ModulusTooSmall(m));
    }
    let mut fresh = FreshNames::seeded_from(body);
    let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
    y.collect_vars(&mut n, &mut s);
    for v in n.iter().chain(s.iter()) {
        fresh.reserve(v);
    }
    let r = fresh.fresh("r");
    let q = fresh.fresh("q");
    let ub = upper_bound_term(y, reg)?;
    let decomposition = Formula::Eq(y.clone(), nadd(nmul(nvar(&q), nconst(m)), nvar(&r)));
    let applied = subst_num(body, hole, &nvar(&r), &mut fresh);
    Ok(Formula::ExistsNum {
        var: r,
        bound: nconst(m),
        body: Box::new(Formula::ExistsNum {
            var: q,
            bound: nadd(ub, nconst(1)),
            body: Box::new(fand(decomposition, applied)),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::super::ast::alpha_eq;
    use super::super::eval::{eval_formula, Assignment};
    use super::super::parser::parse_formula;
    use super::super::registry::FunctionRegistry;
    use super::*;
    use crate::kernel::{random_bitset, seeded_rng, BitSet};

    fn agree(a: &Formula, b: &Formula, env: &Assignment, reg: &FunctionRegistry) {
        let va = eval_formula(a, env, reg).unwrap();
        let vb = eval_formula(b, env, reg).unwrap();
        assert_eq!(va, vb, "disagree on {:?}\n  {}\n  {}", env, a, b);
    }

    fn assert_pure_sigb0th(f: &Formula, reg: &FunctionRegistry) {
        let mut syms = BTreeSet::new();
        collect_symbols(f, &mut syms);
        assert!(syms.is_empty(), "left-over symbols {:?} in {}", syms, f);
        assert!(matches!(
            classify(f),
            FormulaClass::SigB0 | FormulaClass::SigB0Th
        ));
        let _ = reg;
    }

    #[test]
    fn lower_single_threshold() {
        let mut reg = FunctionRegistry::standard();
        let phi = parse_formula("Th[1] z<3 : X(z)", &reg).unwrap();
        let lowered = lower_th_to_count(&phi, &mut reg).unwrap();
        assert!(matches!(lowered, Formula::Leq(..)));
        assert_eq!(reg.entries().len(), FunctionRegistry::standard().entries().len() + 1);
        let env = Assignment::new().with_str("X", BitSet::from_indices([2]));
        agree(&phi, &lowered, &env, &reg);
    }

    #[test]
    fn lower_threshold_zero_is_true() {
        let mut reg = FunctionRegistry::standard();
        let phi = parse_formula("Th[0] z<3 : X(z)", &reg).unwrap();
        let lowered = lower_th_to_count(&phi, &mut reg).unwrap();
        assert_eq!(lowered, Formula::True);
        let env = Assignment::new().with_str("X", BitSet::new());
        agree(&phi, &lowered, &env, &reg);
    }

    #[test]
    fn lower_nested_thresholds() {
        let mut reg = FunctionRegistry::standard();
        let phi = parse_formula("Th[1] z<2 : Th[2] w<3 : X(pair(z,w))", &reg).unwrap();
        let before = reg.entries().len();
        let lowered = lower_th_to_count(&phi, &mut reg).unwrap();
        assert_eq!(reg.entries().len(), before + 2);
        let mut rng = seeded_rng(11);
        for _ in 0..100 {
            let env = Assignment::new().with_str("X", random_bitset(&mut rng, 20));
            agree(&phi, &lowered, &env, &reg);
        }
    }

    #[test]
    fn lower_rejects_wrong_class() {
        let mut reg = FunctionRegistry::standard();
        let phi = parse_formula("E Y<=3 : Y(0)", &reg).unwrap();
        assert!(matches!(
            lower_th_to_count(&phi, &mut reg),
            Err(TransformError::WrongClass(_))
        ));
    }

    #[test]
    fn eliminate_simple_numones() {
        let reg = FunctionRegistry::standard();
        let phi = parse_formula("1 <= numones(2;X)", &reg).unwrap();
        let out = eliminate_counting(&phi, &reg).unwrap();
        assert_pure_sigb0th(&out, &reg);
        for mask in 0u64..16 {
            let x = BitSet::from_indices((0..4).filter(|i| mask >> i & 1 == 1));
            let env = Assignment::new().with_str("X", x);
            agree(&phi, &out, &env, &reg);
        }
    }

    #[test]
    fn eliminate_without_occurrences_is_identity() {
        let reg = FunctionRegistry::standard();
        let phi = parse_formula("X(0) & 1 <= 2", &reg).unwrap();
        let (out, trace) = eliminate_counting_traced(&phi, &reg).unwrap();
        assert!(alpha_eq(&phi, &out));
        assert!(trace.is_empty());
    }

    #[test]
    fn eliminate_after_lowering_roundtrips() {
        let mut reg = FunctionRegistry::standard();
        let phi = parse_formula("Th[1] z<2 : Th[2] w<3 : X(pair(z,w))", &reg).unwrap();
        let lowered = lower_th_to_count(&phi, &mut reg).unwrap();
        let (out, trace) = eliminate_counting_traced(&lowered, &reg).unwrap();
        assert_pure_sigb0th(&out, &reg);
        assert!(!trace.is_empty());
        for step in &trace {
            assert!(step.before > step.after, "non-decreasing step {:?}", step);
        }
        for e in reg.entries() {
            assert_eq!(defined_symbol_depth(&out, &e.name), 0);
        }
        let mut rng = seeded_rng(12);
        for _ in 0..100 {
            let env = Assignment::new().with_str("X", random_bitset(&mut rng, 20));
            agree(&phi, &out, &env, &reg);
        }
    }

    #[test]
    fn eliminate_handles_row() {
        let reg = FunctionRegistry::standard();
        let phi = parse_formula("Row(1;Z)(2) & 1 <= |Row(1;Z)|", &reg).unwrap();
        let out = eliminate_counting(&phi, &reg).unwrap();
        assert_pure_sigb0th(&out, &reg);
        let mut rng = seeded_rng(13);
        for _ in 0..50 {
            let env = Assignment::new().with_str("Z", random_bitset(&mut rng, 24));
            agree(&phi, &out, &env, &reg);
        }
    }

    #[test]
    fn eliminate_rejects_missing_bitdef() {
        let reg = FunctionRegistry::standard();
        let phi = parse_formula("pd(3) = 2", &reg).unwrap();
        assert!(matches!(
            eliminate_counting(&phi, &reg),
            Err(TransformError::NoBitDef(s)) if s == "pd"
        ));
    }

    #[test]
    fn modm_abbrev_examples() {
        let reg = FunctionRegistry::standard();
        let body = Formula::Eq(nvar("r"), nconst(1));
        let env = Assignment::new();
        let f5 = modm_abbrev(&body, "r", &nconst(5), 2, &reg).unwrap();
        assert!(eval_formula(&f5, &env, &reg).unwrap());
        let f4 = modm_abbrev(&body, "r", &nconst(4), 2, &reg).unwrap();
        assert!(!eval_formula(&f4, &env, &reg).unwrap());
        let f0 = modm_abbrev(&body, "r", &nconst(0), 2, &reg).unwrap();
        assert!(!eval_formula(&f0, &env, &reg).unwrap());
        assert!(matches!(
            modm_abbrev(&body, "r", &nconst(5), 1, &reg),
            Err(TransformError::ModulusTooSmall(1))
        ));
    }

    #[test]
    fn upper_bound_dominates() {
        let reg = FunctionRegistry::standard();
        let t = parse_formula("numones(x + 3;X) = 0", &reg)
            .map(|f| match f {
                Formula::Eq(t, _) => t,
                _ => unreachable!(),
            })
            .unwrap();
        let ub = upper_bound_term(&t, &reg).unwrap();
        let env = Assignment::new()
            .with_num("x", 4)
            .with_str("X", BitSet::from_indices([0, 1, 5]));
        let tv = super::super::eval::eval_num_term(&t, &env, &reg).unwrap();
        let ubv = super::super::eval::eval_num_term(&ub, &env, &reg).unwrap();
        assert!(tv <= ubv);
        let mut syms = BTreeSet::new();
        super::super::registry::collect_symbols_term(&ub, &mut syms);
        assert!(syms.is_empty());
    }

    #[test]
    fn threshold_one_simulates_exists() {
        let reg = FunctionRegistry::standard();
        let th = parse_formula("Th[1] z<6 : X(z)", &reg).unwrap();
        let ex = parse_formula("E z<6 : X(z)", &reg).unwrap();
        let mut rng = seeded_rng(14);
        for _ in 0..50 {
            let env = Assignment::new().with_str("X", random_bitset(&mut rng, 6));
            agree(&th, &ex, &env, &reg);
        }
    }
}

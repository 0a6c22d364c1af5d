use std::collections::BTreeSet;

/// Number-sort term. Number variables and functions have lowercase-initial
/// names, string variables and functions uppercase-initial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NumTerm {
    Const(u64),
    Var(String),
    Add(Box<NumTerm>, Box<NumTerm>),
    Mul(Box<NumTerm>, Box<NumTerm>),
    Len(Box<StrTerm>),
    App {
        name: String,
        num_args: Vec<NumTerm>,
        str_args: Vec<StrTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrTerm {
    Var(String),
    App {
        name: String,
        num_args: Vec<NumTerm>,
        str_args: Vec<StrTerm>,
    },
}

/// Formula of the two-sorted language. All quantifiers carry explicit
/// bounds; the threshold quantifier `Thq` holds when at least `count`
/// values below `bound` satisfy the body, `Modm` when the number of such
/// values is congruent to 1 mod `m`. There is no implication variant;
/// build it from `!` and `|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(NumTerm, NumTerm),
    Leq(NumTerm, NumTerm),
    In(NumTerm, StrTerm),
    StrEq(StrTerm, StrTerm),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    ExistsNum {
        var: String,
        bound: NumTerm,
        body: Box<Formula>,
    },
    ForallNum {
        var: String,
        bound: NumTerm,
        body: Box<Formula>,
    },
    ExistsStr {
        var: String,
        bound: NumTerm,
        body: Box<Formula>,
    },
    ForallStr {
        var: String,
        bound: NumTerm,
        body: Box<Formula>,
    },
    Thq {
        count: NumTerm,
        var: String,
        bound: NumTerm,
        body: Box<Formula>,
    },
    Modm {
        m: u64,
        var: String,
        bound: NumTerm,
        body: Box<Formula>,
    },
}

pub fn is_str_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

pub fn nconst(c: u64) -> NumTerm {
    NumTerm::Const(c)
}

pub fn nvar(name: &str) -> NumTerm {
    NumTerm::Var(name.to_string())
}

pub fn nadd(a: NumTerm, b: NumTerm) -> NumTerm {
    NumTerm::Add(Box::new(a), Box::new(b))
}

pub fn nmul(a: NumTerm, b: NumTerm) -> NumTerm {
    NumTerm::Mul(Box::new(a), Box::new(b))
}

pub fn nlen(s: StrTerm) -> NumTerm {
    NumTerm::Len(Box::new(s))
}

pub fn svar(name: &str) -> StrTerm {
    StrTerm::Var(name.to_string())
}

pub fn fnot(a: Formula) -> Formula {
    Formula::Not(Box::new(a))
}

pub fn fand(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn f_or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn fimp(a: Formula, b: Formula) -> Formula {
    f_or(fnot(a), b)
}

pub fn fiff(a: Formula, b: Formula) -> Formula {
    fand(fimp(a.clone(), b.clone()), fimp(b, a))
}

/// `a < b` spelled in the `<=` vocabulary.
pub fn flt(a: NumTerm, b: NumTerm) -> Formula {
    Formula::Leq(nadd(a, nconst(1)), b)
}

pub fn exists_num(var: &str, bound: NumTerm, body: Formula) -> Formula {
    Formula::ExistsNum {
        var: var.to_string(),
        bound,
        body: Box::new(body),
    }
}

pub fn forall_num(var: &str, bound: NumTerm, body: Formula) -> Formula {
    Formula::ForallNum {
        var: var.to_string(),
        bound,
        body: Box::new(body),
    }
}

pub fn thq(count: NumTerm, var: &str, bound: NumTerm, body: Formula) -> Formula {
    Formula::Thq {
        count,
        var: var.to_string(),
        bound,
        body: Box::new(body),
    }
}

impl NumTerm {
    pub fn collect_vars(&self, nums: &mut BTreeSet<String>, strs: &mut BTreeSet<String>) {
        match self {
            NumTerm::Const(_) => {}
            NumTerm::Var(v) => {
                nums.insert(v.clone());
            }
            NumTerm::Add(a, b) | NumTerm::Mul(a, b) => {
                a.collect_vars(nums, strs);
                b.collect_vars(nums, strs);
            }
            NumTerm::Len(s) => s.collect_vars(nums, strs),
            NumTerm::App {
                num_args, str_args, ..
            } => {
                for a in num_args {
                    a.collect_vars(nums, strs);
                }
                for s in str_args {
                    s.collect_vars(nums, strs);
                }
            }
        }
    }

    pub fn free_num_vars(&self) -> BTreeSet<String> {
        let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
        self.collect_vars(&mut n, &mut s);
        n
    }
}

impl StrTerm {
    pub fn collect_vars(&self, nums: &mut BTreeSet<String>, strs: &mut BTreeSet<String>) {
        match self {
            StrTerm::Var(v) => {
                strs.insert(v.clone());
            }
            StrTerm::App {
                num_args, str_args, ..
            } => {
                for a in num_args {
                    a.collect_vars(nums, strs);
                }
                for s in str_args {
                    s.collect_vars(nums, strs);
                }
            }
        }
    }
}

impl Formula {
    /// Free variables of both sorts.
    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let (mut nums, mut strs) = (BTreeSet::new(), BTreeSet::new());
        self.collect_free(&mut nums, &mut strs);
        (nums, strs)
    }

    fn collect_free(&self, nums: &mut BTreeSet<String>, strs: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Leq(a, b) => {
                a.collect_vars(nums, strs);
                b.collect_vars(nums, strs);
            }
            Formula::In(t, s) => {
                t.collect_vars(nums, strs);
                s.collect_vars(nums, strs);
            }
            Formula::StrEq(a, b) => {
                a.collect_vars(nums, strs);
                b.collect_vars(nums, strs);
            }
            Formula::Not(a) => a.collect_free(nums, strs),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(nums, strs);
                b.collect_free(nums, strs);
            }
            Formula::ExistsNum { var, bound, body }
            | Formula::ForallNum { var, bound, body } => {
                bound.collect_vars(nums, strs);
                let shadow = body_free_minus(body, var, false);
                merge(nums, strs, shadow);
            }
            Formula::ExistsStr { var, bound, body }
            | Formula::ForallStr { var, bound, body } => {
                bound.collect_vars(nums, strs);
                let shadow = body_free_minus(body, var, true);
                merge(nums, strs, shadow);
            }
            Formula::Thq {
                count,
                var,
                bound,
                body,
            } => {
                count.collect_vars(nums, strs);
                bound.collect_vars(nums, strs);
                let shadow = body_free_minus(body, var, false);
                merge(nums, strs, shadow);
            }
            Formula::Modm {
                var, bound, body, ..
            } => {
                bound.collect_vars(nums, strs);
                let shadow = body_free_minus(body, var, false);
                merge(nums, strs, shadow);
            }
        }
    }

    /// Every identifier appearing anywhere, bound or free; used to seed
    /// fresh-name generation.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Leq(a, b) => {
                let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
                a.collect_vars(&mut n, &mut s);
                b.collect_vars(&mut n, &mut s);
                out.extend(n);
                out.extend(s);
            }
            Formula::In(t, st) => {
                let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
                t.collect_vars(&mut n, &mut s);
                st.collect_vars(&mut n, &mut s);
                out.extend(n);
                out.extend(s);
            }
            Formula::StrEq(a, b) => {
                let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
                a.collect_vars(&mut n, &mut s);
                b.collect_vars(&mut n, &mut s);
                out.extend(n);
                out.extend(s);
            }
            Formula::Not(a) => a.all_names(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Formula::ExistsNum { var, bound, body }
            | Formula::ForallNum { var, bound, body }
            | Formula::ExistsStr { var, bound, body }
            | Formula::ForallStr { var, bound, body } => {
                out.insert(var.clone());
                let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
                bound.collect_vars(&mut n, &mut s);
                out.extend(n);
                out.extend(s);
                body.all_names(out);
            }
            Formula::Thq {
                count,
                var,
                bound,
                body,
            } => {
                out.insert(var.clone());
                let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
                count.collect_vars(&mut n, &mut s);
                bound.collect_vars(&mut n, &mut s);
                out.extend(n);
                out.extend(s);
                body.all_names(out);
            }
            Formula::Modm {
                var, bound, body, ..
            } => {
                out.insert(var.clone());
                let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
                bound.collect_vars(&mut n, &mut s);
                out.extend(n);
                out.extend(s);
                body.all_names(out);
            }
        }
    }
}

fn body_free_minus(body: &Formula, var: &str, is_str: bool) -> (BTreeSet<String>, BTreeSet<String>) {
    let (mut n, mut s) = body.free_vars();
    if is_str {
        s.remove(var);
    } else {
        n.remove(var);
    }
    (n, s)
}

fn merge(nums: &mut BTreeSet<String>, strs: &mut BTreeSet<String>, from: (BTreeSet<String>, BTreeSet<String>)) {
    nums.extend(from.0);
    strs.extend(from.1);
}

/// Deterministic fresh-name source: `fresh("W")` yields W1, W2, ...,
/// skipping names already in use.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    used: BTreeSet<String>,
}

impl FreshNames {
    pub fn new() -> Self {
        FreshNames::default()
    }

    pub fn seeded_from(f: &Formula) -> Self {
        let mut used = BTreeSet::new();
        f.all_names(&mut used);
        FreshNames { used }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn reserve_all(&mut self, f: &Formula) {
        f.all_names(&mut self.used);
    }

    pub fn fresh(&mut self, base: &str) -> String {
        for k in 1u64.. {
            let cand = format!("{}{}", base, k);
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
        }
        unreachable!()
    }
}

pub fn subst_num_in_term(t: &NumTerm, var: &str, repl: &NumTerm) -> NumTerm {
    match t {
        NumTerm::Const(_) => t.clone(),
        NumTerm::Var(v) => {
            if v == var {
                repl.clone()
            } else {
                t.clone()
            }
        }
        NumTerm::Add(a, b) => nadd(
            subst_num_in_term(a, var, repl),
            subst_num_in_term(b, var, repl),
        ),
        NumTerm::Mul(a, b) => nmul(
            subst_num_in_term(a, var, repl),
            subst_num_in_term(b, var, repl),
        ),
        NumTerm::Len(s) => nlen(subst_num_in_str_term(s, var, repl)),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => NumTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| subst_num_in_term(a, var, repl)).collect(),
            str_args: str_args
                .iter()
                .map(|s| subst_num_in_str_term(s, var, repl))
                .collect(),
        },
    }
}

pub fn subst_num_in_str_term(s: &StrTerm, var: &str, repl: &NumTerm) -> StrTerm {
    match s {
        StrTerm::Var(_) => s.clone(),
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => StrTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| subst_num_in_term(a, var, repl)).collect(),
            str_args: str_args
                .iter()
                .map(|t| subst_num_in_str_term(t, var, repl))
                .collect(),
        },
    }
}

pub fn subst_str_in_term(t: &NumTerm, var: &str, repl: &StrTerm) -> NumTerm {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => t.clone(),
        NumTerm::Add(a, b) => nadd(
            subst_str_in_term(a, var, repl),
            subst_str_in_term(b, var, repl),
        ),
        NumTerm::Mul(a, b) => nmul(
            subst_str_in_term(a, var, repl),
            subst_str_in_term(b, var, repl),
        ),
        NumTerm::Len(s) => nlen(subst_str_in_str_term(s, var, repl)),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => NumTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| subst_str_in_term(a, var, repl)).collect(),
            str_args: str_args
                .iter()
                .map(|s| subst_str_in_str_term(s, var, repl))
                .collect(),
        },
    }
}

pub fn subst_str_in_str_term(s: &StrTerm, var: &str, repl: &StrTerm) -> StrTerm {
    match s {
        StrTerm::Var(v) => {
            if v == var {
                repl.clone()
            } else {
                s.clone()
            }
        }
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => StrTerm::App {
            name: name.clone(),
            num_args: num_args.iter().map(|a| subst_str_in_term(a, var, repl)).collect(),
            str_args: str_args
                .iter()
                .map(|t| subst_str_in_str_term(t, var, repl))
                .collect(),
        },
    }
}

/// Substitutes `repl` for the free number variable `var`. Binders whose
/// name collides with a variable of `repl` are renamed first, so no
/// capture can occur.
pub fn subst_num(f: &Formula, var: &str, repl: &NumTerm, fresh: &mut FreshNames) -> Formula {
    let (repl_nums, repl_strs) = {
        let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
        repl.collect_vars(&mut n, &mut s);
        (n, s)
    };
    subst_formula(
        f,
        &Repl::Num(var, repl),
        &repl_nums,
        &repl_strs,
        fresh,
    )
}

/// Substitutes `repl` for the free string variable `var`, capture-avoiding.
pub fn subst_str(f: &Formula, var: &str, repl: &StrTerm, fresh: &mut FreshNames) -> Formula {
    let (repl_nums, repl_strs) = {
        let (mut n, mut s) = (BTreeSet::new(), BTreeSet::new());
        repl.collect_vars(&mut n, &mut s);
        (n, s)
    };
    subst_formula(
        f,
        &Repl::Str(var, repl),
        &repl_nums,
        &repl_strs,
        fresh,
    )
}

enum Repl<'a> {
    Num(&'a str, &'a NumTerm),
    Str(&'a str, &'a StrTerm),
}

impl Repl<'_> {
    fn target(&self) -> &str {
        match self {
            Repl::Num(v, _) => v,
            Repl::Str(v, _) => v,
        }
    }

    fn apply_num(&self, t: &NumTerm) -> NumTerm {
        match self {
            Repl::Num(v, r) => subst_num_in_term(t, v, r),
            Repl::Str(v, r) => subst_str_in_term(t, v, r),
        }
    }

    fn apply_str(&self, s: &StrTerm) -> StrTerm {
        match self {
            Repl::Num(v, r) => subst_num_in_str_term(s, v, r),
            Repl::Str(v, r) => subst_str_in_str_term(s, v, r),
        }
    }
}

fn subst_formula(
    f: &Formula,
    repl: &Repl,
    repl_nums: &BTreeSet<String>,
    repl_strs: &BTreeSet<String>,
    fresh: &mut FreshNames,
) -> Formula {
    let recurse = |g: &Formula, fresh: &mut FreshNames| subst_formula(g, repl, repl_nums, repl_strs, fresh);
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(repl.apply_num(a), repl.apply_num(b)),
        Formula::Leq(a, b) => Formula::Leq(repl.apply_num(a), repl.apply_num(b)),
        Formula::In(t, s) => Formula::In(repl.apply_num(t), repl.apply_str(s)),
        Formula::StrEq(a, b) => Formula::StrEq(repl.apply_str(a), repl.apply_str(b)),
        Formula::Not(a) => fnot(recurse(a, fresh)),
        Formula::And(a, b) => {
            let l = recurse(a, fresh);
            fand(l, recurse(b, fresh))
        }
        Formula::Or(a, b) => {
            let l = recurse(a, fresh);
            f_or(l, recurse(b, fresh))
        }
        Formula::ExistsNum { var, bound, body }
        | Formula::ForallNum { var, bound, body }
        | Formula::ExistsStr { var, bound, body }
        | Formula::ForallStr { var, bound, body }
        | Formula::Thq {
            var, bound, body, ..
        }
        | Formula::Modm {
            var, bound, body, ..
        } => {
            let var_is_str = matches!(f, Formula::ExistsStr { .. } | Formula::ForallStr { .. });
            let new_bound = repl.apply_num(bound);
            let new_count = match f {
                Formula::Thq { count, .. } => Some(repl.apply_num(count)),
                _ => None,
            };
            // A binder equal to the substitution target shuts it off below;
            // the parser's no-shadowing rule makes this unreachable when the
            // target is genuinely free.
            let target_shadowed = var == repl.target();
            let collides = if var_is_str {
                repl_strs.contains(var)
            } else {
                repl_nums.contains(var)
            };
            let (var2, body2) = if collides {
                let nv = fresh.fresh(var);
                let renamed = if var_is_str {
                    subst_str(body, var, &StrTerm::Var(nv.clone()), fresh)
                } else {
                    subst_num(body, var, &NumTerm::Var(nv.clone()), fresh)
                };
                (nv, renamed)
            } else {
                (var.clone(), body.as_ref().clone())
            };
            let new_body = if target_shadowed {
                body2
            } else {
                subst_formula(&body2, repl, repl_nums, repl_strs, fresh)
            };
            rebuild_quant(f, var2, new_count, new_bound, new_body)
        }
    }
}

fn rebuild_quant(
    proto: &Formula,
    var: String,
    count: Option<NumTerm>,
    bound: NumTerm,
    body: Formula,
) -> Formula {
    let body = Box::new(body);
    match proto {
        Formula::ExistsNum { .. } => Formula::ExistsNum { var, bound, body },
        Formula::ForallNum { .. } => Formula::ForallNum { var, bound, body },
        Formula::ExistsStr { .. } => Formula::ExistsStr { var, bound, body },
        Formula::ForallStr { .. } => Formula::ForallStr { var, bound, body },
        Formula::Thq { .. } => Formula::Thq {
            count: count.expect("threshold quantifier keeps its count"),
            var,
            bound,
            body,
        },
        Formula::Modm { m, .. } => Formula::Modm {
            m: *m,
            var,
            bound,
            body,
        },
        _ => unreachable!("rebuild_quant called on a non-quantifier"),
    }
}

/// Canonical renaming of bound variables; two formulas are alpha-equal
/// when their normal forms are structurally equal. Canonical names use a
/// character outside the grammar so they cannot clash with parsed names.
pub fn alpha_normal(f: &Formula) -> Formula {
    let mut counter = 0u64;
    alpha_walk(f, &mut counter)
}

fn alpha_walk(f: &Formula, counter: &mut u64) -> Formula {
    match f {
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Leq(..)
        | Formula::In(..)
        | Formula::StrEq(..) => f.clone(),
        Formula::Not(a) => fnot(alpha_walk(a, counter)),
        Formula::And(a, b) => {
            let l = alpha_walk(a, counter);
            fand(l, alpha_walk(b, counter))
        }
        Formula::Or(a, b) => {
            let l = alpha_walk(a, counter);
            f_or(l, alpha_walk(b, counter))
        }
        Formula::ExistsNum { var, bound, body }
        | Formula::ForallNum { var, bound, body }
        | Formula::ExistsStr { var, bound, body }
        | Formula::ForallStr { var, bound, body }
        | Formula::Thq {
            var, bound, body, ..
        }
        | Formula::Modm {
            var, bound, body, ..
        } => {
            let var_is_str = matches!(f, Formula::ExistsStr { .. } | Formula::ForallStr { .. });
            let canon = format!("%{}", *counter);
            *counter += 1;
            let mut scratch = FreshNames::new();
            let renamed = if var_is_str {
                subst_str(body, var, &StrTerm::Var(canon.clone()), &mut scratch)
            } else {
                subst_num(body, var, &NumTerm::Var(canon.clone()), &mut scratch)
            };
            let new_body = alpha_walk(&renamed, counter);
            let count = match f {
                Formula::Thq { count, .. } => Some(count.clone()),
                _ => None,
            };
            rebuild_quant(f, canon, count, bound.clone(), new_body)
        }
    }
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_normal(a) == alpha_normal(b)
}

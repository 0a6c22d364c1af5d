use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::kernel::{checked_pair, fse, numones, pd, row, BitSet};

use super::ast::{is_str_name, nadd, nconst, nlen, nmul, nvar, svar, Formula, NumTerm, StrTerm};
use super::eval::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FnKind {
    Num,
    Str,
}

/// Bit definition of a string function: `F(params)(i) <-> i < bound & body`,
/// with `body` over the parameters plus `bit_var`.
#[derive(Debug, Clone)]
pub struct BitDef {
    pub bit_var: String,
    pub bound: NumTerm,
    pub body: Formula,
}

type NumEval = fn(&[u64], &[BitSet]) -> Result<u64, EvalError>;
type StrEval = fn(&[u64], &[BitSet]) -> Result<BitSet, EvalError>;

#[derive(Clone)]
pub enum FnDef {
    NumBuiltin {
        eval: NumEval,
        /// Equivalent base-language term over the parameters, when one
        /// exists; lets transformations and compilers expand the symbol.
        expansion: Option<NumTerm>,
    },
    StrBuiltin {
        eval: StrEval,
        bit_def: BitDef,
    },
    Comprehension(BitDef),
    /// Least witness below `bound`, or `bound` itself when none exists.
    MinWitness {
        wit_var: String,
        bound: NumTerm,
        body: Formula,
    },
}

#[derive(Clone)]
pub struct FnEntry {
    pub name: String,
    pub kind: FnKind,
    pub num_params: Vec<String>,
    pub str_params: Vec<String>,
    pub def: FnDef,
}

impl FnEntry {
    pub fn arity(&self) -> (usize, usize) {
        (self.num_params.len(), self.str_params.len())
    }

    pub fn bit_def(&self) -> Option<&BitDef> {
        match &self.def {
            FnDef::StrBuiltin { bit_def, .. } => Some(bit_def),
            FnDef::Comprehension(bd) => Some(bd),
            _ => None,
        }
    }

    /// Term bounding the length of a string function's value.
    pub fn len_bound(&self) -> Option<&NumTerm> {
        self.bit_def().map(|bd| &bd.bound)
    }

    pub fn expansion(&self) -> Option<&NumTerm> {
        match &self.def {
            FnDef::NumBuiltin { expansion, .. } => expansion.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("symbol {0:?} is already registered")]
    Duplicate(String),
    #[error("{0:?} is reserved")]
    Reserved(String),
    #[error("number symbols start lowercase, string symbols uppercase: {0:?}")]
    BadCase(String),
    #[error("parameter list of {0:?} repeats {1:?}")]
    DupParam(String, String),
    #[error("definition of {0:?} uses unregistered symbol {1:?}")]
    UnknownSymbol(String, String),
    #[error("definition of {0:?} mentions {1:?} outside its parameters")]
    StrayVariable(String, String),
}

pub const RESERVED: [&str; 7] = ["E", "A", "Th", "Mod", "C", "true", "false"];

/// Immutable-after-setup table of function symbols. Registration order is
/// significant: counting elimination removes the most recently registered
/// symbol first.
pub struct FunctionRegistry {
    entries: Vec<FnEntry>,
    by_name: BTreeMap<String, usize>,
}

impl FunctionRegistry {
    pub fn empty() -> Self {
        FunctionRegistry {
            entries: Vec::new(),
            by_name: BTreeMap::new(),
        }
    }

    /// The base vocabulary: numones, pair, pd, fse, and Row.
    pub fn standard() -> Self {
        let mut reg = FunctionRegistry::empty();
        reg.push(FnEntry {
            name: "numones".into(),
            kind: FnKind::Num,
            num_params: vec!["z".into()],
            str_params: vec!["X".into()],
            def: FnDef::NumBuiltin {
                eval: |nums, strs| Ok(numones(nums[0], &strs[0])),
                expansion: None,
            },
        })
        .unwrap();
        reg.push(FnEntry {
            name: "pair".into(),
            kind: FnKind::Num,
            num_params: vec!["x".into(), "y".into()],
            str_params: vec![],
            def: FnDef::NumBuiltin {
                eval: |nums, _| {
                    checked_pair(nums[0], nums[1])
                        .ok_or(EvalError::Overflow("pair"))
                },
                // (x+y)*(x+y+1) + 2y
                expansion: Some(nadd(
                    nmul(
                        nadd(nvar("x"), nvar("y")),
                        nadd(nadd(nvar("x"), nvar("y")), nconst(1)),
                    ),
                    nmul(nconst(2), nvar("y")),
                )),
            },
        })
        .unwrap();
        reg.push(FnEntry {
            name: "pd".into(),
            kind: FnKind::Num,
            num_params: vec!["x".into()],
            str_params: vec![],
            def: FnDef::NumBuiltin {
                eval: |nums, _| Ok(pd(nums[0])),
                expansion: None,
            },
        })
        .unwrap();
        reg.push(FnEntry {
            name: "fse".into(),
            kind: FnKind::Num,
            num_params: vec![],
            str_params: vec!["X".into(), "Y".into()],
            def: FnDef::NumBuiltin {
                eval: |_, strs| Ok(fse(&strs[0], &strs[1])),
                expansion: None,
            },
        })
        .unwrap();
        reg.push(FnEntry {
            name: "Row".into(),
            kind: FnKind::Str,
            num_params: vec!["x".into()],
            str_params: vec!["Z".into()],
            def: FnDef::StrBuiltin {
                eval: |nums, strs| Ok(row(nums[0], &strs[0])),
                // Row(x;Z)(i) <-> i < |Z| & Z(pair(x,i))
                bit_def: BitDef {
                    bit_var: "i".into(),
                    bound: nlen(svar("Z")),
                    body: Formula::In(
                        NumTerm::App {
                            name: "pair".into(),
                            num_args: vec![nvar("x"), nvar("i")],
                            str_args: vec![],
                        },
                        svar("Z"),
                    ),
                },
            },
        })
        .unwrap();
        reg
    }

    pub fn get(&self, name: &str) -> Option<&FnEntry> {
        self.by_name.get(name).map(|&k| &self.entries[k])
    }

    /// Position in registration order; later symbols are eliminated first.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn entries(&self) -> &[FnEntry] {
        &self.entries
    }

    fn push(&mut self, entry: FnEntry) -> Result<(), RegistryError> {
        let name = entry.name.clone();
        if RESERVED.contains(&name.as_str()) {
            return Err(RegistryError::Reserved(name));
        }
        if self.by_name.contains_key(&name) {
            return Err(RegistryError::Duplicate(name));
        }
        let want_str = matches!(entry.kind, FnKind::Str);
        if is_str_name(&name) != want_str {
            return Err(RegistryError::BadCase(name));
        }
        let mut seen = BTreeSet::new();
        for p in entry.num_params.iter().chain(entry.str_params.iter()) {
            if !seen.insert(p.clone()) {
                return Err(RegistryError::DupParam(name, p.clone()));
            }
        }
        self.check_def(&entry)?;
        self.by_name.insert(name, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    fn check_def(&self, entry: &FnEntry) -> Result<(), RegistryError> {
        let (bound, body, extra_var) = match &entry.def {
            FnDef::NumBuiltin { .. } | FnDef::StrBuiltin { .. } => return Ok(()),
            FnDef::Comprehension(bd) => (&bd.bound, &bd.body, &bd.bit_var),
            FnDef::MinWitness {
                wit_var,
                bound,
                body,
            } => (bound, body, wit_var),
        };
        let mut syms = BTreeSet::new();
        collect_symbols(body, &mut syms);
        collect_symbols_term(bound, &mut syms);
        for s in syms {
            if self.get(&s).is_none() {
                return Err(RegistryError::UnknownSymbol(entry.name.clone(), s));
            }
        }
        let mut allowed: BTreeSet<&str> = entry
            .num_params
            .iter()
            .chain(entry.str_params.iter())
            .map(|s| s.as_str())
            .collect();
        allowed.insert(extra_var);
        let (bn, bs) = body.free_vars();
        let bound_vars = bound.free_num_vars();
        for v in bn.iter().chain(bs.iter()).chain(bound_vars.iter()) {
            if !allowed.contains(v.as_str()) {
                return Err(RegistryError::StrayVariable(
                    entry.name.clone(),
                    v.clone(),
                ));
            }
        }
        Ok(())
    }

    /// Registers `name(num_params; str_params)(bit_var) <-> bit_var < bound & body`.
    pub fn register_comprehension(
        &mut self,
        name: &str,
        num_params: Vec<String>,
        str_params: Vec<String>,
        bit_def: BitDef,
    ) -> Result<(), RegistryError> {
        self.push(FnEntry {
            name: name.to_string(),
            kind: FnKind::Str,
            num_params,
            str_params,
            def: FnDef::Comprehension(bit_def),
        })
    }

    pub fn register_min_witness(
        &mut self,
        name: &str,
        num_params: Vec<String>,
        str_params: Vec<String>,
        wit_var: String,
        bound: NumTerm,
        body: Formula,
    ) -> Result<(), RegistryError> {
        self.push(FnEntry {
            name: name.to_string(),
            kind: FnKind::Num,
            num_params,
            str_params,
            def: FnDef::MinWitness {
                wit_var,
                bound,
                body,
            },
        })
    }

    /// Next unused name of the form `F1`, `F2`, ...
    pub fn fresh_str_fn_name(&self) -> String {
        for k in 1u64.. {
            let cand = format!("F{}", k);
            if !self.by_name.contains_key(&cand) {
                return cand;
            }
        }
        unreachable!()
    }
}

pub fn collect_symbols(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(a, b) | Formula::Leq(a, b) => {
            collect_symbols_term(a, out);
            collect_symbols_term(b, out);
        }
        Formula::In(t, s) => {
            collect_symbols_term(t, out);
            collect_symbols_str(s, out);
        }
        Formula::StrEq(a, b) => {
            collect_symbols_str(a, out);
            collect_symbols_str(b, out);
        }
        Formula::Not(a) => collect_symbols(a, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_symbols(a, out);
            collect_symbols(b, out);
        }
        Formula::ExistsNum { bound, body, .. }
        | Formula::ForallNum { bound, body, .. }
        | Formula::ExistsStr { bound, body, .. }
        | Formula::ForallStr { bound, body, .. }
        | Formula::Modm { bound, body, .. } => {
            collect_symbols_term(bound, out);
            collect_symbols(body, out);
        }
        Formula::Thq {
            count,
            bound,
            body,
            ..
        } => {
            collect_symbols_term(count, out);
            collect_symbols_term(bound, out);
            collect_symbols(body, out);
        }
    }
}

pub fn collect_symbols_term(t: &NumTerm, out: &mut BTreeSet<String>) {
    match t {
        NumTerm::Const(_) | NumTerm::Var(_) => {}
        NumTerm::Add(a, b) | NumTerm::Mul(a, b) => {
            collect_symbols_term(a, out);
            collect_symbols_term(b, out);
        }
        NumTerm::Len(s) => collect_symbols_str(s, out),
        NumTerm::App {
            name,
            num_args,
            str_args,
        } => {
            out.insert(name.clone());
            for a in num_args {
                collect_symbols_term(a, out);
            }
            for s in str_args {
                collect_symbols_str(s, out);
            }
        }
    }
}

pub fn collect_symbols_str(s: &StrTerm, out: &mut BTreeSet<String>) {
    match s {
        StrTerm::Var(_) => {}
        StrTerm::App {
            name,
            num_args,
            str_args,
        } => {
            out.insert(name.clone());
            for a in num_args {
                collect_symbols_term(a, out);
            }
            for t in str_args {
                collect_symbols_str(t, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_symbols_present() {
        let reg = FunctionRegistry::standard();
        for name in ["numones", "pair", "pd", "fse", "Row"] {
            assert!(reg.get(name).is_some(), "{} missing", name);
        }
        assert_eq!(reg.get("numones").unwrap().arity(), (1, 1));
        assert_eq!(reg.get("fse").unwrap().arity(), (0, 2));
    }

    #[test]
    fn registration_checks() {
        let mut reg = FunctionRegistry::standard();
        let bd = BitDef {
            bit_var: "z".into(),
            bound: nconst(4),
            body: Formula::In(nvar("z"), svar("X")),
        };
        assert_eq!(
            reg.register_comprehension("lower", vec![], vec!["X".into()], bd.clone()),
            Err(RegistryError::BadCase("lower".into()))
        );
        assert!(reg
            .register_comprehension("G", vec![], vec!["X".into()], bd.clone())
            .is_ok());
        assert_eq!(
            reg.register_comprehension("G", vec![], vec!["X".into()], bd.clone()),
            Err(RegistryError::Duplicate("G".into()))
        );
        let stray = BitDef {
            bit_var: "z".into(),
            bound: nconst(4),
            body: Formula::In(nvar("z"), svar("Y")),
        };
        assert_eq!(
            reg.register_comprehension("H", vec![], vec!["X".into()], stray),
            Err(RegistryError::StrayVariable("H".into(), "Y".into()))
        );
    }

    #[test]
    fn fresh_names_skip_registered() {
        let mut reg = FunctionRegistry::standard();
        assert_eq!(reg.fresh_str_fn_name(), "F1");
        let bd = BitDef {
            bit_var: "z".into(),
            bound: nconst(1),
            body: Formula::True,
        };
        reg.register_comprehension("F1", vec![], vec![], bd).unwrap();
        assert_eq!(reg.fresh_str_fn_name(), "F2");
    }
}

//! Two-sorted formulas: AST, concrete syntax, classification, evaluation,
//! and the counting-quantifier transformations.

pub mod ast;
pub mod classify;
pub mod eval;
pub mod parser;
mod print;
pub mod registry;
pub mod transform;

pub use ast::{
    alpha_eq, alpha_normal, exists_num, fand, fiff, fimp, flt, fnot, forall_num, f_or, nadd,
    nconst, nlen, nmul, nvar, subst_num, subst_str, svar, thq, Formula, FreshNames, NumTerm,
    StrTerm,
};
pub use classify::{classify, FormulaClass};
pub use eval::{
    eval_formula, eval_num_term, eval_str_term, Assignment, EvalError, NUM_QUANT_CAP,
    STR_QUANT_CAP,
};
pub use parser::{parse_formula, parse_num_term, ParseError};
pub use registry::{BitDef, FnDef, FnEntry, FnKind, FunctionRegistry, RegistryError};
pub use transform::{
    defined_symbol_depth, eliminate_counting, eliminate_counting_traced, lower_th_to_count,
    modm_abbrev, upper_bound_term, DepthStep, TransformError,
};

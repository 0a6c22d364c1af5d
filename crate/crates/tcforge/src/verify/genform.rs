use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::logic::{Formula, NumTerm, StrTerm};

/// Free string variables every generated formula draws from.
pub const GEN_STR_VARS: [&str; 2] = ["X", "Y"];

/// Quantifier vocabulary of one generated formula. Threshold and modular
/// quantifiers never mix inside a single formula; a mixed formula falls
/// outside every class the transformations and compilers accept.
#[derive(Clone, Copy, PartialEq)]
enum Flavor {
    Plain,
    Th,
    Mod,
}

/// Random formula, with one of the counting quantifiers allowed: a fair
/// mix of plain, threshold-bearing, and modular formulas. Connective
/// depth is at most `depth`, every quantifier bound is a constant at most
/// 8, and the only free variables are X and Y.
pub fn random_counting_formula(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    let flavor = match rng.gen_range(0..4) {
        0 => Flavor::Plain,
        1 | 2 => Flavor::Th,
        _ => Flavor::Mod,
    };
    gen(rng, depth, &mut Vec::new(), flavor)
}

/// Random formula whose only counting quantifier is the threshold one,
/// the fragment the counting elimination accepts.
pub fn random_threshold_formula(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    gen(rng, depth, &mut Vec::new(), Flavor::Th)
}

/// Random formula over the base connectives and plain bounded number
/// quantifiers only, inside the fragment the single-sorted translation
/// accepts.
pub fn random_flat_formula(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    gen(rng, depth, &mut Vec::new(), Flavor::Plain)
}

fn strvar(rng: &mut ChaCha8Rng) -> StrTerm {
    StrTerm::Var(GEN_STR_VARS[rng.gen_range(0..GEN_STR_VARS.len())].to_string())
}

fn term(rng: &mut ChaCha8Rng, scope: &[String], fuel: u32) -> NumTerm {
    let pick = if fuel == 0 {
        rng.gen_range(0..6)
    } else {
        rng.gen_range(0..11)
    };
    match pick {
        0..=2 => NumTerm::Const(rng.gen_range(0..=8)),
        3..=5 => match scope.is_empty() {
            true => NumTerm::Const(rng.gen_range(0..=8)),
            false => NumTerm::Var(scope[rng.gen_range(0..scope.len())].clone()),
        },
        6..=7 => NumTerm::Len(Box::new(strvar(rng))),
        8..=9 => NumTerm::Add(
            Box::new(term(rng, scope, fuel - 1)),
            Box::new(term(rng, scope, fuel - 1)),
        ),
        _ => NumTerm::Mul(
            Box::new(term(rng, scope, fuel - 1)),
            Box::new(term(rng, scope, fuel - 1)),
        ),
    }
}

fn atom(rng: &mut ChaCha8Rng, scope: &[String]) -> Formula {
    match rng.gen_range(0..10) {
        0..=2 => Formula::Leq(term(rng, scope, 2), term(rng, scope, 2)),
        3..=5 => Formula::Eq(term(rng, scope, 2), term(rng, scope, 2)),
        6..=7 => Formula::In(term(rng, scope, 2), strvar(rng)),
        8 => Formula::StrEq(strvar(rng), strvar(rng)),
        _ => match rng.gen_bool(0.5) {
            true => Formula::True,
            false => Formula::False,
        },
    }
}

fn gen(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<String>, flavor: Flavor) -> Formula {
    if depth == 0 {
        return atom(rng, scope);
    }
    match rng.gen_range(0..12) {
        0..=1 => atom(rng, scope),
        2..=3 => Formula::Not(Box::new(gen(rng, depth - 1, scope, flavor))),
        4..=5 => Formula::And(
            Box::new(gen(rng, depth - 1, scope, flavor)),
            Box::new(gen(rng, depth - 1, scope, flavor)),
        ),
        6..=7 => Formula::Or(
            Box::new(gen(rng, depth - 1, scope, flavor)),
            Box::new(gen(rng, depth - 1, scope, flavor)),
        ),
        pick => {
            let quant = match (flavor, pick) {
                (Flavor::Plain, p) => 8 + p % 2,
                (Flavor::Th, 10 | 11) => 10,
                (Flavor::Mod, 10 | 11) => 11,
                (_, p) => p,
            };
            // Names repeat across nesting levels now and then, so the
            // differential suites exercise shadowing.
            let var = format!("z{}", rng.gen_range(1..=scope.len() + 1));
            let bound = NumTerm::Const(rng.gen_range(0..=8));
            scope.push(var.clone());
            let body = Box::new(gen(rng, depth - 1, scope, flavor));
            scope.pop();
            match quant {
                8 => Formula::ExistsNum { var, bound, body },
                9 => Formula::ForallNum { var, bound, body },
                10 => Formula::Thq {
                    count: NumTerm::Const(rng.gen_range(0..=9)),
                    var,
                    bound,
                    body,
                },
                _ => Formula::Modm {
                    m: rng.gen_range(2..=5),
                    var,
                    bound,
                    body,
                },
            }
        }
    }
}

use super::ast::Formula;

/// Syntactic class of a formula, most specific first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FormulaClass {
    SigB0,
    SigB0Th,
    SigB0Modm,
    SigB1,
    PiB1,
    GSigB1,
    GPiB1,
    Other,
}

impl std::fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FormulaClass::SigB0 => "SigB0",
            FormulaClass::SigB0Th => "SigB0Th",
            FormulaClass::SigB0Modm => "SigB0Modm",
            FormulaClass::SigB1 => "SigB1",
            FormulaClass::PiB1 => "PiB1",
            FormulaClass::GSigB1 => "gSigB1",
            FormulaClass::GPiB1 => "gPiB1",
            FormulaClass::Other => "Other",
        };
        f.write_str(s)
    }
}

#[derive(Default, Clone, Copy)]
struct Flags {
    str_quant: bool,
    thq: bool,
    modm: bool,
}

fn scan(f: &Formula, flags: &mut Flags) {
    match f {
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Leq(..)
        | Formula::In(..)
        | Formula::StrEq(..) => {}
        Formula::Not(a) => scan(a, flags),
        Formula::And(a, b) | Formula::Or(a, b) => {
            scan(a, flags);
            scan(b, flags);
        }
        Formula::ExistsNum { body, .. } | Formula::ForallNum { body, .. } => scan(body, flags),
        Formula::ExistsStr { body, .. } | Formula::ForallStr { body, .. } => {
            flags.str_quant = true;
            scan(body, flags);
        }
        Formula::Thq { body, .. } => {
            flags.thq = true;
            scan(body, flags);
        }
        Formula::Modm { body, .. } => {
            flags.modm = true;
            scan(body, flags);
        }
    }
}

fn has_str_quant(f: &Formula) -> bool {
    let mut fl = Flags::default();
    scan(f, &mut fl);
    fl.str_quant
}

/// Every string quantifier occurs with the stated polarity: existential ones
/// positively and universal ones negatively when `exists_positive`, the dual
/// otherwise. Number quantifiers and the counting quantifiers are opaque to
/// polarity (the latter never reach here; they force Other earlier).
fn polarity_ok(f: &Formula, pos: bool, exists_positive: bool) -> bool {
    match f {
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Leq(..)
        | Formula::In(..)
        | Formula::StrEq(..) => true,
        Formula::Not(a) => polarity_ok(a, !pos, exists_positive),
        Formula::And(a, b) | Formula::Or(a, b) => {
            polarity_ok(a, pos, exists_positive) && polarity_ok(b, pos, exists_positive)
        }
        Formula::ExistsNum { body, .. }
        | Formula::ForallNum { body, .. }
        | Formula::Thq { body, .. }
        | Formula::Modm { body, .. } => polarity_ok(body, pos, exists_positive),
        Formula::ExistsStr { body, .. } => {
            pos == exists_positive && polarity_ok(body, pos, exists_positive)
        }
        Formula::ForallStr { body, .. } => {
            pos != exists_positive && polarity_ok(body, pos, exists_positive)
        }
    }
}

pub fn classify(f: &Formula) -> FormulaClass {
    let mut fl = Flags::default();
    scan(f, &mut fl);
    if !fl.str_quant {
        return match (fl.thq, fl.modm) {
            (false, false) => FormulaClass::SigB0,
            (true, false) => FormulaClass::SigB0Th,
            (false, true) => FormulaClass::SigB0Modm,
            (true, true) => FormulaClass::Other,
        };
    }
    if fl.thq || fl.modm {
        return FormulaClass::Other;
    }
    let mut g = f;
    while let Formula::ExistsStr { body, .. } = g {
        g = body;
    }
    if !has_str_quant(g) {
        return FormulaClass::SigB1;
    }
    let mut g = f;
    while let Formula::ForallStr { body, .. } = g {
        g = body;
    }
    if !has_str_quant(g) {
        return FormulaClass::PiB1;
    }
    if polarity_ok(f, true, true) {
        return FormulaClass::GSigB1;
    }
    if polarity_ok(f, true, false) {
        return FormulaClass::GPiB1;
    }
    FormulaClass::Other
}

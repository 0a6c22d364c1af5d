use std::collections::{BTreeMap, HashMap};

use crate::logic::transform::{param_maps, subst_map_num, subst_map_str, subst_params_formula};
use crate::logic::{classify, Formula, FormulaClass, FreshNames, FunctionRegistry, NumTerm, StrTerm};

use super::circuit::{Builder, Circuit, CircuitError, InputLayout};

/// Widest range a comparison or quantifier is unrolled over. Number values
/// enter the circuit through unary thresholds, so every range is finite; the
/// cap turns a runaway bound into an error instead of a gate explosion.
const UNROLL_CAP: u64 = 1 << 16;

/// Compile a base-language formula to an and/or/not circuit. Output depth
/// depends on the formula alone, never on the layout widths.
pub fn compile_sigma0(
    phi: &Formula,
    layout: &InputLayout,
    reg: &FunctionRegistry,
) -> Result<Circuit, CircuitError> {
    compile_with(phi, layout, reg, Mode::Base)
}

/// Compile a formula that may also use numones, threshold and mod-m
/// quantifiers, and registered functions with bit definitions. Counting
/// lands on threshold gates.
pub fn compile_tc0(
    phi: &Formula,
    layout: &InputLayout,
    reg: &FunctionRegistry,
) -> Result<Circuit, CircuitError> {
    compile_with(phi, layout, reg, Mode::Counting)
}

fn compile_with(
    phi: &Formula,
    layout: &InputLayout,
    reg: &FunctionRegistry,
    mode: Mode,
) -> Result<Circuit, CircuitError> {
    let class = classify(phi);
    let ok = match mode {
        Mode::Base => class == FormulaClass::SigB0,
        Mode::Counting => matches!(
            class,
            FormulaClass::SigB0 | FormulaClass::SigB0Th | FormulaClass::SigB0Modm
        ),
    };
    if !ok {
        return Err(CircuitError::WrongClass {
            expected: match mode {
                Mode::Base => "SigB0",
                Mode::Counting => "SigB0, SigB0Th or SigB0Modm",
            },
            got: class,
        });
    }
    let (nvars, svars) = phi.free_vars();
    for v in nvars {
        if !layout.nums.contains_key(&v) {
            return Err(CircuitError::MissingVar(v));
        }
    }
    for v in svars {
        if !layout.strs.contains_key(&v) {
            return Err(CircuitError::MissingVar(v));
        }
    }
    let mut c = Compiler::new(layout.clone(), reg, mode, FreshNames::seeded_from(phi));
    let mut ctx = BTreeMap::new();
    let g = c.formula(phi, &mut ctx)?;
    c.b.finish(vec![g])
}

/// Compile the bits of a registered string function: output p is bit p of
/// the function value, with the parameters as circuit inputs.
pub fn compile_fn_bits(
    name: &str,
    layout: &InputLayout,
    reg: &FunctionRegistry,
) -> Result<Circuit, CircuitError> {
    let entry = reg
        .get(name)
        .ok_or_else(|| CircuitError::Unsupported(format!("unknown function {:?}", name)))?;
    let bd = entry
        .bit_def()
        .ok_or_else(|| CircuitError::Unsupported(format!("{} has no bit definition", name)))?;
    let class = classify(&bd.body);
    if !matches!(
        class,
        FormulaClass::SigB0 | FormulaClass::SigB0Th | FormulaClass::SigB0Modm
    ) {
        return Err(CircuitError::WrongClass {
            expected: "SigB0, SigB0Th or SigB0Modm",
            got: class,
        });
    }
    for p in &entry.num_params {
        if !layout.nums.contains_key(p) {
            return Err(CircuitError::MissingVar(p.clone()));
        }
    }
    for p in &entry.str_params {
        if !layout.strs.contains_key(p) {
            return Err(CircuitError::MissingVar(p.clone()));
        }
    }
    let mut fresh = FreshNames::seeded_from(&bd.body);
    fresh.reserve(&bd.bit_var);
    let mut c = Compiler::new(layout.clone(), reg, Mode::Counting, fresh);
    let width = c.max_val(&bd.bound)?;
    guard_extent(width, || bd.bound.to_string())?;
    let mut outs = Vec::new();
    for p in 0..width {
        let guard = c.ge(&bd.bound, p + 1)?;
        let mut ctx = BTreeMap::new();
        ctx.insert(bd.bit_var.clone(), p);
        let body = c.formula(&bd.body, &mut ctx)?;
        outs.push(c.b.and(vec![guard, body]));
    }
    c.b.finish(outs)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// And/or/not only; counting constructs are rejected.
    Base,
    /// Threshold gates allowed.
    Counting,
}

type Ctx = BTreeMap<String, u64>;

struct Compiler<'a> {
    b: Builder,
    reg: &'a FunctionRegistry,
    mode: Mode,
    fresh: FreshNames,
    /// Gate for [term >= i], keyed on the context-closed term.
    ge_memo: HashMap<(NumTerm, u64), usize>,
    /// Gate for bit p of a string term, keyed likewise.
    bit_memo: HashMap<(StrTerm, u64), usize>,
}

fn guard_extent(extent: u64, what: impl FnOnce() -> String) -> Result<(), CircuitError> {
    if extent > UNROLL_CAP {
        return Err(CircuitError::BoundTooWide {
            term: what(),
            bound: extent,
        });
    }
    Ok(())
}

impl<'a> Compiler<'a> {
    fn new(layout: InputLayout, reg: &'a FunctionRegistry, mode: Mode, fresh: FreshNames) -> Self {
        Compiler {
            b: Builder::folding(layout),
            reg,
            mode,
            fresh,
            ge_memo: HashMap::new(),
            bit_memo: HashMap::new(),
        }
    }

    fn close_num(&self, t: &NumTerm, ctx: &Ctx) -> NumTerm {
        if ctx.is_empty() {
            return t.clone();
        }
        let nmap: BTreeMap<String, NumTerm> = ctx
            .iter()
            .map(|(k, &v)| (k.clone(), NumTerm::Const(v)))
            .collect();
        subst_map_num(t, &nmap, &BTreeMap::new())
    }

    fn close_str(&self, s: &StrTerm, ctx: &Ctx) -> StrTerm {
        if ctx.is_empty() {
            return s.clone();
        }
        let nmap: BTreeMap<String, NumTerm> = ctx
            .iter()
            .map(|(k, &v)| (k.clone(), NumTerm::Const(v)))
            .collect();
        subst_map_str(s, &nmap, &BTreeMap::new())
    }

    /// Largest value a context-closed term can take under any assignment
    /// consistent with the layout.
    fn max_val(&self, t: &NumTerm) -> Result<u64, CircuitError> {
        let wide = || CircuitError::BoundTooWide {
            term: t.to_string(),
            bound: u64::MAX,
        };
        match t {
            NumTerm::Const(c) => Ok(*c),
            NumTerm::Var(x) => self
                .b
                .layout()
                .nums
                .get(x)
                .copied()
                .ok_or_else(|| CircuitError::MissingVar(x.clone())),
            NumTerm::Add(a, b) => self
                .max_val(a)?
                .checked_add(self.max_val(b)?)
                .ok_or_else(wide),
            NumTerm::Mul(a, b) => self
                .max_val(a)?
                .checked_mul(self.max_val(b)?)
                .ok_or_else(wide),
            NumTerm::Len(s) => self.max_str_width(s),
            NumTerm::App {
                name,
                num_args,
                str_args,
            } => {
                if name == "numones" {
                    // A count of positions below the first argument.
                    return self.max_val(&num_args[0]);
                }
                let entry = self.reg.get(name).ok_or_else(|| {
                    CircuitError::Unsupported(format!("unknown function {:?}", name))
                })?;
                match entry.expansion() {
                    Some(e) => {
                        let (nmap, smap) =
                            param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
                        self.max_val(&subst_map_num(e, &nmap, &smap))
                    }
                    None => Err(CircuitError::Unsupported(format!(
                        "{} has no circuit lowering",
                        name
                    ))),
                }
            }
        }
    }

    /// Largest bit position count a context-closed string term can span.
    fn max_str_width(&self, s: &StrTerm) -> Result<u64, CircuitError> {
        match s {
            StrTerm::Var(x) => self
                .b
                .layout()
                .strs
                .get(x)
                .copied()
                .ok_or_else(|| CircuitError::MissingVar(x.clone())),
            StrTerm::App {
                name,
                num_args,
                str_args,
            } => {
                let entry = self.reg.get(name).ok_or_else(|| {
                    CircuitError::Unsupported(format!("unknown function {:?}", name))
                })?;
                let bound = entry.len_bound().ok_or_else(|| {
                    CircuitError::Unsupported(format!("{} has no bit definition", name))
                })?;
                let (nmap, smap) =
                    param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
                self.max_val(&subst_map_num(bound, &nmap, &smap))
            }
        }
    }

    /// Constant value of a context-closed term, when it has one.
    fn try_const(&self, t: &NumTerm) -> Option<u64> {
        match t {
            NumTerm::Const(c) => Some(*c),
            NumTerm::Var(_) | NumTerm::Len(_) => None,
            NumTerm::Add(a, b) => self.try_const(a)?.checked_add(self.try_const(b)?),
            NumTerm::Mul(a, b) => self.try_const(a)?.checked_mul(self.try_const(b)?),
            NumTerm::App {
                name,
                num_args,
                str_args,
            } => {
                let entry = self.reg.get(name)?;
                let e = entry.expansion()?;
                let (nmap, smap) =
                    param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
                self.try_const(&subst_map_num(e, &nmap, &smap))
            }
        }
    }

    /// Gate computing [t >= i] for a context-closed term.
    fn ge(&mut self, t: &NumTerm, i: u64) -> Result<usize, CircuitError> {
        if i == 0 {
            return Ok(self.b.lit_true());
        }
        if let Some(v) = self.try_const(t) {
            return Ok(if v >= i {
                self.b.lit_true()
            } else {
                self.b.lit_false()
            });
        }
        let key = (t.clone(), i);
        if let Some(&g) = self.ge_memo.get(&key) {
            return Ok(g);
        }
        let g = match t {
            NumTerm::Const(_) => unreachable!("constants are handled by try_const"),
            NumTerm::Var(x) => {
                let w = self
                    .b
                    .layout()
                    .nums
                    .get(x)
                    .copied()
                    .ok_or_else(|| CircuitError::MissingVar(x.clone()))?;
                if i <= w {
                    self.b.input(x, i - 1)
                } else {
                    self.b.lit_false()
                }
            }
            NumTerm::Add(a, b) => {
                // a+b >= i iff the target splits as j + (i-j) with a >= j
                // and b >= i-j.
                let ma = self.max_val(a)?;
                let mb = self.max_val(b)?;
                let lo = i.saturating_sub(mb);
                let hi = i.min(ma);
                let mut cs = Vec::new();
                for j in lo..=hi {
                    let ga = self.ge(a, j)?;
                    let gb = self.ge(b, i - j)?;
                    cs.push(self.b.and(vec![ga, gb]));
                }
                self.b.or(cs)
            }
            NumTerm::Mul(a, b) => {
                // a*b >= i iff a >= j and b >= ceil(i/j) for some j >= 1.
                let ma = self.max_val(a)?;
                let hi = i.min(ma);
                let mut cs = Vec::new();
                for j in 1..=hi {
                    let ga = self.ge(a, j)?;
                    let gb = self.ge(b, i.div_ceil(j))?;
                    cs.push(self.b.and(vec![ga, gb]));
                }
                self.b.or(cs)
            }
            NumTerm::Len(s) => {
                // |S| >= i iff some position at or past i-1 is set.
                let w = self.max_str_width(s)?;
                guard_extent(w, || t.to_string())?;
                let mut cs = Vec::new();
                for p in (i - 1)..w {
                    cs.push(self.str_bit(s, p)?);
                }
                self.b.or(cs)
            }
            NumTerm::App {
                name,
                num_args,
                str_args,
            } => {
                if name == "numones" {
                    if self.mode == Mode::Base {
                        return Err(CircuitError::Unsupported(
                            "numones needs threshold gates; use the counting compiler".into(),
                        ));
                    }
                    let t_arg = num_args[0].clone();
                    let x_arg = str_args[0].clone();
                    let cap = self.max_val(&t_arg)?.min(self.max_str_width(&x_arg)?);
                    guard_extent(cap, || t.to_string())?;
                    let mut cs = Vec::new();
                    for p in 0..cap {
                        let xb = self.str_bit(&x_arg, p)?;
                        let tb = self.ge(&t_arg, p + 1)?;
                        cs.push(self.b.and(vec![xb, tb]));
                    }
                    self.b.threshold(i, cs)
                } else {
                    let entry = self.reg.get(name).ok_or_else(|| {
                        CircuitError::Unsupported(format!("unknown function {:?}", name))
                    })?;
                    let e = entry.expansion().ok_or_else(|| {
                        CircuitError::Unsupported(format!("{} has no circuit lowering", name))
                    })?;
                    let (nmap, smap) =
                        param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
                    let expanded = subst_map_num(e, &nmap, &smap);
                    self.ge(&expanded, i)?
                }
            }
        };
        self.ge_memo.insert(key, g);
        Ok(g)
    }

    /// Gate computing bit p of a context-closed string term.
    fn str_bit(&mut self, s: &StrTerm, p: u64) -> Result<usize, CircuitError> {
        let key = (s.clone(), p);
        if let Some(&g) = self.bit_memo.get(&key) {
            return Ok(g);
        }
        let g = match s {
            StrTerm::Var(x) => {
                if !self.b.layout().strs.contains_key(x) {
                    return Err(CircuitError::MissingVar(x.clone()));
                }
                self.b.input(x, p)
            }
            StrTerm::App {
                name,
                num_args,
                str_args,
            } => {
                if p >= self.max_str_width(s)? {
                    self.b.lit_false()
                } else {
                    let entry = self.reg.get(name).ok_or_else(|| {
                        CircuitError::Unsupported(format!("unknown function {:?}", name))
                    })?;
                    let bd = entry.bit_def().ok_or_else(|| {
                        CircuitError::Unsupported(format!("{} has no bit definition", name))
                    })?;
                    let (nmap, smap) =
                        param_maps(&entry.num_params, &entry.str_params, num_args, str_args);
                    let bound = subst_map_num(&bd.bound, &nmap, &smap);
                    let guard = self.ge(&bound, p + 1)?;
                    self.fresh.reserve_all(&bd.body);
                    let mut nps = entry.num_params.clone();
                    nps.push(bd.bit_var.clone());
                    let mut nas = num_args.clone();
                    nas.push(NumTerm::Const(p));
                    let body = subst_params_formula(
                        &bd.body,
                        &nps,
                        &entry.str_params,
                        &nas,
                        str_args,
                        &mut self.fresh,
                    );
                    let mut ctx = BTreeMap::new();
                    let bg = self.formula(&body, &mut ctx)?;
                    self.b.and(vec![guard, bg])
                }
            }
        };
        self.bit_memo.insert(key, g);
        Ok(g)
    }

    /// Gate computing [a <= b] over context-closed terms.
    fn leq(&mut self, a: &NumTerm, b: &NumTerm) -> Result<usize, CircuitError> {
        let ma = self.max_val(a)?;
        guard_extent(ma, || a.to_string())?;
        let mut cs = Vec::new();
        for i in 1..=ma {
            let ga = self.ge(a, i)?;
            let na = self.b.not(ga);
            let gb = self.ge(b, i)?;
            cs.push(self.b.or(vec![na, gb]));
        }
        Ok(self.b.and(cs))
    }

    /// Gate computing [t = p] for a constant p.
    fn eq_const(&mut self, t: &NumTerm, p: u64) -> Result<usize, CircuitError> {
        let lo = self.ge(t, p)?;
        let hi = self.ge(t, p + 1)?;
        let nhi = self.b.not(hi);
        Ok(self.b.and(vec![lo, nhi]))
    }

    /// Guarded body bits of a counting quantifier: one gate per candidate
    /// value below the bound's maximum.
    fn quant_bits(
        &mut self,
        var: &str,
        bound: &NumTerm,
        body: &Formula,
        ctx: &mut Ctx,
    ) -> Result<Vec<usize>, CircuitError> {
        let bound = self.close_num(bound, ctx);
        let n = self.max_val(&bound)?;
        guard_extent(n, || bound.to_string())?;
        let mut bits = Vec::new();
        for v in 0..n {
            let guard = self.ge(&bound, v + 1)?;
            let saved = ctx.insert(var.to_string(), v);
            let branch = self.formula(body, ctx);
            match saved {
                Some(old) => ctx.insert(var.to_string(), old),
                None => ctx.remove(var),
            };
            bits.push(self.b.and(vec![guard, branch?]));
        }
        Ok(bits)
    }

    fn formula(&mut self, f: &Formula, ctx: &mut Ctx) -> Result<usize, CircuitError> {
        match f {
            Formula::True => Ok(self.b.lit_true()),
            Formula::False => Ok(self.b.lit_false()),
            Formula::Not(a) => {
                let g = self.formula(a, ctx)?;
                Ok(self.b.not(g))
            }
            Formula::And(a, b) => {
                let ga = self.formula(a, ctx)?;
                let gb = self.formula(b, ctx)?;
                Ok(self.b.and(vec![ga, gb]))
            }
            Formula::Or(a, b) => {
                let ga = self.formula(a, ctx)?;
                let gb = self.formula(b, ctx)?;
                Ok(self.b.or(vec![ga, gb]))
            }
            Formula::Leq(a, b) => {
                let a = self.close_num(a, ctx);
                let b = self.close_num(b, ctx);
                self.leq(&a, &b)
            }
            Formula::Eq(a, b) => {
                let a = self.close_num(a, ctx);
                let b = self.close_num(b, ctx);
                let l = self.leq(&a, &b)?;
                let r = self.leq(&b, &a)?;
                Ok(self.b.and(vec![l, r]))
            }
            Formula::In(t, s) => {
                let t = self.close_num(t, ctx);
                let s = self.close_str(s, ctx);
                let w = self.max_str_width(&s)?;
                if w == 0 {
                    return Ok(self.b.lit_false());
                }
                if let Some(p) = self.try_const(&t) {
                    return if p < w {
                        self.str_bit(&s, p)
                    } else {
                        Ok(self.b.lit_false())
                    };
                }
                let pmax = self.max_val(&t)?.min(w - 1);
                guard_extent(pmax + 1, || t.to_string())?;
                let mut cs = Vec::new();
                for p in 0..=pmax {
                    let e = self.eq_const(&t, p)?;
                    let bit = self.str_bit(&s, p)?;
                    cs.push(self.b.and(vec![e, bit]));
                }
                Ok(self.b.or(cs))
            }
            Formula::StrEq(a, b) => {
                let a = self.close_str(a, ctx);
                let b = self.close_str(b, ctx);
                let w = self.max_str_width(&a)?.max(self.max_str_width(&b)?);
                guard_extent(w, || format!("|{}|", a))?;
                let mut cs = Vec::new();
                for p in 0..w {
                    let ba = self.str_bit(&a, p)?;
                    let bb = self.str_bit(&b, p)?;
                    let na = self.b.not(ba);
                    let nb = self.b.not(bb);
                    let both = self.b.and(vec![ba, bb]);
                    let neither = self.b.and(vec![na, nb]);
                    cs.push(self.b.or(vec![both, neither]));
                }
                Ok(self.b.and(cs))
            }
            Formula::ExistsNum { var, bound, body } => {
                let bits = self.quant_bits(var, bound, body, ctx)?;
                Ok(self.b.or(bits))
            }
            Formula::ForallNum { var, bound, body } => {
                // All v below the bound satisfy the body: !(E v, guard & !body).
                let bound_c = self.close_num(bound, ctx);
                let n = self.max_val(&bound_c)?;
                guard_extent(n, || bound_c.to_string())?;
                let mut cs = Vec::new();
                for v in 0..n {
                    let guard = self.ge(&bound_c, v + 1)?;
                    let nguard = self.b.not(guard);
                    let saved = ctx.insert(var.clone(), v);
                    let branch = self.formula(body, ctx);
                    match saved {
                        Some(old) => ctx.insert(var.clone(), old),
                        None => ctx.remove(var),
                    };
                    cs.push(self.b.or(vec![nguard, branch?]));
                }
                Ok(self.b.and(cs))
            }
            Formula::ExistsStr { .. } | Formula::ForallStr { .. } => Err(
                CircuitError::Unsupported("string quantifiers do not unroll into gates".into()),
            ),
            Formula::Thq {
                count,
                var,
                bound,
                body,
            } => {
                if self.mode == Mode::Base {
                    return Err(CircuitError::Unsupported(
                        "threshold quantifiers need the counting compiler".into(),
                    ));
                }
                let bits = self.quant_bits(var, bound, body, ctx)?;
                let n = bits.len() as u64;
                let count = self.close_num(count, ctx);
                if let Some(s) = self.try_const(&count) {
                    return Ok(self.b.threshold(s, bits));
                }
                // The count is an input-dependent term: the number of true
                // bits reaches it iff both pass some common level i <= n.
                let mut cs = Vec::new();
                for i in 0..=n {
                    let th = self.b.threshold(i, bits.clone());
                    let above = self.ge(&count, i + 1)?;
                    let at_most = self.b.not(above);
                    cs.push(self.b.and(vec![th, at_most]));
                }
                Ok(self.b.or(cs))
            }
            Formula::Modm {
                m,
                var,
                bound,
                body,
            } => {
                if self.mode == Mode::Base {
                    return Err(CircuitError::Unsupported(
                        "mod quantifiers need the counting compiler".into(),
                    ));
                }
                if *m < 2 {
                    return Err(CircuitError::Unsupported(format!(
                        "modulus {} is below 2",
                        m
                    )));
                }
                let bits = self.quant_bits(var, bound, body, ctx)?;
                let n = bits.len() as u64;
                let mut cs = Vec::new();
                let mut c = 1u64;
                while c <= n {
                    let at_least = self.b.threshold(c, bits.clone());
                    let above = self.b.threshold(c + 1, bits.clone());
                    let not_above = self.b.not(above);
                    cs.push(self.b.and(vec![at_least, not_above]));
                    c += m;
                }
                Ok(self.b.or(cs))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{row, BitSet};
    use crate::logic::{eval_formula, parse_formula, Assignment};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reg() -> FunctionRegistry {
        FunctionRegistry::standard()
    }

    fn parse(src: &str) -> Formula {
        parse_formula(src, &reg()).unwrap()
    }

    /// Every assignment consistent with the layout. Total bit budget stays
    /// small in the tests that call this.
    fn all_assignments(layout: &InputLayout) -> Vec<Assignment> {
        let mut out = vec![Assignment::new()];
        for (name, &w) in &layout.strs {
            let mut next = Vec::new();
            for a in &out {
                for mask in 0u64..(1u64 << w) {
                    let mut s = BitSet::new();
                    for b in 0..w {
                        if mask >> b & 1 == 1 {
                            s.insert(b);
                        }
                    }
                    let mut a2 = a.clone();
                    a2.set_str(name, s);
                    next.push(a2);
                }
            }
            out = next;
        }
        for (name, &w) in &layout.nums {
            let mut next = Vec::new();
            for a in &out {
                for v in 0..=w {
                    let mut a2 = a.clone();
                    a2.set_num(name, v);
                    next.push(a2);
                }
            }
            out = next;
        }
        out
    }

    fn assert_matches_eval(src: &str, layout: &InputLayout, counting: bool) {
        let f = parse(src);
        let c = if counting {
            compile_tc0(&f, layout, &reg()).unwrap()
        } else {
            compile_sigma0(&f, layout, &reg()).unwrap()
        };
        for a in all_assignments(layout) {
            let want = eval_formula(&f, &a, &reg()).unwrap();
            let got = c.eval(&a).unwrap()[0];
            assert_eq!(got, want, "formula {:?} on {:?}", src, a);
        }
    }

    #[test]
    fn two_literal_conjunction() {
        let layout = InputLayout::new().with_str("X", 2);
        let c = compile_sigma0(&parse("X(0) & X(1)"), &layout, &reg()).unwrap();
        assert_eq!(c.metrics().size, 3);
        let mut s = BitSet::new();
        s.insert(0);
        s.insert(1);
        let v = c.eval(&Assignment::new().with_str("X", s)).unwrap();
        assert_eq!(v, vec![true]);
        let mut s = BitSet::new();
        s.insert(0);
        let v = c.eval(&Assignment::new().with_str("X", s)).unwrap();
        assert_eq!(v, vec![false]);
    }

    #[test]
    fn constant_formula() {
        let c = compile_sigma0(&parse("true"), &InputLayout::new(), &reg()).unwrap();
        assert_eq!(c.metrics().size, 1);
        assert_eq!(c.metrics().depth, 0);
        assert_eq!(c.eval(&Assignment::new()).unwrap(), vec![true]);
    }

    #[test]
    fn bounded_exists_is_an_or_of_literals() {
        let layout = InputLayout::new().with_str("X", 4);
        let c = compile_sigma0(&parse("E z<4 : X(z)"), &layout, &reg()).unwrap();
        assert_eq!(c.metrics().size, 5);
        assert_eq!(c.metrics().depth, 1);
        let v = c
            .eval(&Assignment::new().with_str("X", BitSet::new()))
            .unwrap();
        assert_eq!(v, vec![false]);
    }

    #[test]
    fn base_differentials() {
        let x4y4 = InputLayout::new().with_str("X", 4).with_str("Y", 4);
        let x3y3 = InputLayout::new().with_str("X", 3).with_str("Y", 3);
        assert_matches_eval("E z<|X| : !X(z)", &InputLayout::new().with_str("X", 4), false);
        assert_matches_eval("A z<3 : (X(z) | Y(z))", &x3y3, false);
        assert_matches_eval("|X| <= |Y|", &x4y4, false);
        assert_matches_eval("E z<5 : z + z = 6", &InputLayout::new(), false);
        assert_matches_eval("E z<4 : E w<4 : z*w = 6", &InputLayout::new(), false);
        assert_matches_eval("pair(1,2) = 16", &InputLayout::new(), false);
        assert_matches_eval(
            "x <= 3 & X(x)",
            &InputLayout::new().with_str("X", 4).with_num("x", 5),
            false,
        );
        assert_matches_eval("X = Y", &x3y3, false);
        assert_matches_eval("|X| = 3", &InputLayout::new().with_str("X", 4), false);
    }

    #[test]
    fn row_bits_inside_a_formula() {
        let layout = InputLayout::new().with_str("Z", 12);
        assert_matches_eval("E z<2 : Row(z;Z)(1)", &layout, false);
    }

    #[test]
    fn numones_comparison_uses_a_threshold() {
        let layout = InputLayout::new().with_str("X", 4);
        let f = parse("numones(4;X) >= 2");
        let c = compile_tc0(&f, &layout, &reg()).unwrap();
        let found = c.gates().iter().any(|g| {
            matches!(g, super::super::circuit::Gate::Threshold(2, cs) if cs.len() == 4)
        });
        assert!(found, "expected a threshold of 2 over 4 literals");
        let mut s = BitSet::new();
        s.insert(1);
        s.insert(3);
        assert_eq!(c.eval(&Assignment::new().with_str("X", s)).unwrap(), vec![true]);
        let mut s = BitSet::new();
        s.insert(1);
        assert_eq!(c.eval(&Assignment::new().with_str("X", s)).unwrap(), vec![false]);

        let comma = parse("numones(4,X) >= 2");
        let c2 = compile_tc0(&comma, &layout, &reg()).unwrap();
        assert_eq!(c, c2, "comma and semicolon argument forms compile alike");
    }

    #[test]
    fn threshold_quantifier_matches_exists_at_one() {
        let layout = InputLayout::new().with_str("X", 3);
        let th = compile_tc0(&parse("Th[1] z<3 : X(z)"), &layout, &reg()).unwrap();
        let ex = compile_sigma0(&parse("E z<3 : X(z)"), &layout, &reg()).unwrap();
        for a in all_assignments(&layout) {
            assert_eq!(th.eval(&a).unwrap(), ex.eval(&a).unwrap());
        }
    }

    #[test]
    fn counting_differentials() {
        let x4 = InputLayout::new().with_str("X", 4);
        assert_matches_eval("numones(4;X) >= 2", &x4, true);
        assert_matches_eval("Th[2] z<4 : X(z)", &x4, true);
        assert_matches_eval("Mod[2] z<4 : X(z)", &x4, true);
        assert_matches_eval("Mod[3] z<6 : X(z)", &InputLayout::new().with_str("X", 6), true);
        assert_matches_eval(
            "Th[x] z<4 : X(z)",
            &InputLayout::new().with_str("X", 4).with_num("x", 5),
            true,
        );
    }

    #[test]
    fn threshold_count_can_be_a_function_value() {
        // The surface syntax keeps counts base-language, so build the AST
        // directly: at least numones(3;X) of the first four bits are set.
        let x = || StrTerm::Var("X".into());
        let f = Formula::Thq {
            count: NumTerm::App {
                name: "numones".into(),
                num_args: vec![NumTerm::Const(3)],
                str_args: vec![x()],
            },
            var: "z".into(),
            bound: NumTerm::Const(4),
            body: Box::new(Formula::In(NumTerm::Var("z".into()), x())),
        };
        let layout = InputLayout::new().with_str("X", 4);
        let c = compile_tc0(&f, &layout, &reg()).unwrap();
        for a in all_assignments(&layout) {
            let want = eval_formula(&f, &a, &reg()).unwrap();
            assert_eq!(c.eval(&a).unwrap()[0], want, "{:?}", a);
        }
    }

    #[test]
    fn class_and_layout_rejections() {
        let layout = InputLayout::new().with_str("X", 3);
        let r = compile_sigma0(&parse("Th[1] z<3 : X(z)"), &layout, &reg());
        assert!(matches!(r, Err(CircuitError::WrongClass { .. })));
        let r = compile_sigma0(&parse("X(0)"), &InputLayout::new(), &reg());
        assert_eq!(r.unwrap_err(), CircuitError::MissingVar("X".into()));
        let r = compile_sigma0(&parse("numones(3;X) = 1"), &layout, &reg());
        assert!(matches!(r, Err(CircuitError::Unsupported(_))));
        let r = compile_sigma0(&parse("pd(2) = 1"), &InputLayout::new(), &reg());
        assert!(matches!(r, Err(CircuitError::Unsupported(_))));
    }

    #[test]
    fn depth_ignores_layout_width() {
        let f = parse("E z<|X| : X(z)");
        let narrow = compile_sigma0(&f, &InputLayout::new().with_str("X", 4), &reg()).unwrap();
        let wide = compile_sigma0(&f, &InputLayout::new().with_str("X", 9), &reg()).unwrap();
        assert_eq!(narrow.metrics().depth, wide.metrics().depth);
        let g = parse("numones(|X|;X) >= 2");
        let narrow = compile_tc0(&g, &InputLayout::new().with_str("X", 4), &reg()).unwrap();
        let wide = compile_tc0(&g, &InputLayout::new().with_str("X", 9), &reg()).unwrap();
        assert_eq!(narrow.metrics().depth, wide.metrics().depth);
    }

    #[test]
    fn row_function_bits_compile() {
        let layout = InputLayout::new().with_num("x", 3).with_str("Z", 12);
        let c = compile_fn_bits("Row", &layout, &reg()).unwrap();
        assert_eq!(c.outputs().len(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut z = BitSet::new();
            for b in 0..12 {
                if rng.gen_bool(0.4) {
                    z.insert(b);
                }
            }
            let x = rng.gen_range(0..=3u64);
            let want = row(x, &z);
            let got = c
                .eval(&Assignment::new().with_num("x", x).with_str("Z", z.clone()))
                .unwrap();
            for (p, bit) in got.iter().enumerate() {
                assert_eq!(*bit, want.contains(p as u64), "x={} Z={:?} bit {}", x, z, p);
            }
        }
    }

    #[test]
    fn fn_bits_rejections() {
        let r = compile_fn_bits("nosuch", &InputLayout::new(), &reg());
        assert!(matches!(r, Err(CircuitError::Unsupported(_))));
        let r = compile_fn_bits("pair", &InputLayout::new(), &reg());
        assert!(matches!(r, Err(CircuitError::Unsupported(_))));
        let r = compile_fn_bits("Row", &InputLayout::new().with_num("x", 3), &reg());
        assert_eq!(r.unwrap_err(), CircuitError::MissingVar("Z".into()));
    }
}

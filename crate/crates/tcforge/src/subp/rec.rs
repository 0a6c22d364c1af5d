use crate::kernel::{pair, row, set_cell, BitSet, Table2D};
use crate::logic::{
    eval_formula, eval_num_term, Assignment, Formula, FunctionRegistry, NumTerm, NUM_QUANT_CAP,
};

use super::SubpError;

/// String recursion with truncation. Stage 0 is `init` over the free
/// variables `i` (bit position) and `X` (input); stage x+1 applies `next`
/// over `i`, `x` (completed stage), `X`, and `F` (previous stage). Every
/// stage x is cut off at bit position `bound`, a term over `x` and `n`
/// where `n` is the input length.
#[derive(Debug, Clone)]
pub struct RecursionSpec {
    pub init: Formula,
    pub next: Formula,
    pub bound: NumTerm,
}

fn bound_env(x: u64, n: u64) -> Assignment {
    Assignment::new().with_num("x", x).with_num("n", n)
}

/// Evaluates the truncation bound at stage `x` for input length `n`.
pub fn bound_at(
    spec: &RecursionSpec,
    x: u64,
    n: u64,
    reg: &FunctionRegistry,
) -> Result<u64, SubpError> {
    let t = eval_num_term(&spec.bound, &bound_env(x, n), reg)?;
    if t > NUM_QUANT_CAP {
        return Err(SubpError::BoundTooWide(t));
    }
    Ok(t)
}

impl RecursionSpec {
    /// Samples the bound on a small grid and insists it never shrinks in
    /// either argument. A shrinking bound would let a later stage forget
    /// bits the recursion step still reads.
    pub fn check_monotone(&self, reg: &FunctionRegistry) -> Result<(), SubpError> {
        for x in 0..=8u64 {
            for n in 0..=8u64 {
                let here = bound_at(self, x, n, reg)?;
                if bound_at(self, x + 1, n, reg)? < here
                    || bound_at(self, x, n + 1, reg)? < here
                {
                    return Err(SubpError::NotMonotone);
                }
            }
        }
        Ok(())
    }
}

/// Stage 0: bits i < bound(0, |input|) where `init` holds.
pub fn init_row(
    spec: &RecursionSpec,
    input: &BitSet,
    reg: &FunctionRegistry,
) -> Result<BitSet, SubpError> {
    let t = bound_at(spec, 0, input.len(), reg)?;
    let mut env = Assignment::new().with_str("X", input.clone());
    let mut out = BitSet::new();
    for i in 0..t {
        env.set_num("i", i);
        if eval_formula(&spec.init, &env, reg)? {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Stage `step`+1 from stage `step`: bits i < bound(step+1, |input|)
/// where `next` holds with F set to the previous stage.
pub fn next_row(
    spec: &RecursionSpec,
    step: u64,
    input: &BitSet,
    prev: &BitSet,
    reg: &FunctionRegistry,
) -> Result<BitSet, SubpError> {
    let t = bound_at(spec, step + 1, input.len(), reg)?;
    let mut env = Assignment::new()
        .with_num("x", step)
        .with_str("X", input.clone())
        .with_str("F", prev.clone());
    let mut out = BitSet::new();
    for i in 0..t {
        env.set_num("i", i);
        if eval_formula(&spec.next, &env, reg)? {
            out.insert(i);
        }
    }
    Ok(out)
}

/// The value after `steps` stages.
pub fn rec_eval(
    spec: &RecursionSpec,
    steps: u64,
    input: &BitSet,
    reg: &FunctionRegistry,
) -> Result<BitSet, SubpError> {
    let mut cur = init_row(spec, input, reg)?;
    for step in 0..steps {
        cur = next_row(spec, step, input, &cur, reg)?;
    }
    Ok(cur)
}

/// All stages 0..=steps in order.
pub fn rec_trace(
    spec: &RecursionSpec,
    steps: u64,
    input: &BitSet,
    reg: &FunctionRegistry,
) -> Result<Vec<BitSet>, SubpError> {
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(init_row(spec, input, reg)?);
    for step in 0..steps {
        let next = next_row(spec, step, input, rows.last().unwrap(), reg)?;
        rows.push(next);
    }
    Ok(rows)
}

/// Runs the recursion for `a` stages on each of the `b` rows of `x`.
/// Cell row `pair(y, step)` of the result is stage `step` on input row y,
/// so one table carries every trace of the batch.
pub fn rec_eval_multi(
    spec: &RecursionSpec,
    a: u64,
    b: u64,
    x: &Table2D,
    reg: &FunctionRegistry,
) -> Result<Table2D, SubpError> {
    let mut out = Table2D::new();
    for y in 0..b {
        let input = row(y, x);
        let trace = rec_trace(spec, a, &input, reg)?;
        for (step, bits) in trace.iter().enumerate() {
            for i in bits.iter() {
                set_cell(&mut out, pair(y, step as u64), i);
            }
        }
    }
    Ok(out)
}

/// Validates a stored trace table against the recursion, bit by bit.
/// Stage rows are read back from `y` itself, so a corrupted intermediate
/// row is caught either where it deviates or at the stage built on it.
/// Bits at positions a and above are outside the quantified window and
/// are not inspected.
pub fn check_phi_f(
    spec: &RecursionSpec,
    a: u64,
    b: u64,
    x: &Table2D,
    y: &Table2D,
    reg: &FunctionRegistry,
) -> Result<bool, SubpError> {
    for yy in 0..b {
        let input = row(yy, x);
        let n = input.len();
        let t0 = bound_at(spec, 0, n, reg)?;
        let stored0 = row(pair(yy, 0), y);
        let mut env = Assignment::new().with_str("X", input.clone());
        for z in 0..a {
            env.set_num("i", z);
            let expected = z < t0 && eval_formula(&spec.init, &env, reg)?;
            if stored0.contains(z) != expected {
                return Ok(false);
            }
        }
        for xs in 0..a {
            let prev = row(pair(yy, xs), y);
            let t = bound_at(spec, xs + 1, n, reg)?;
            let stored = row(pair(yy, xs + 1), y);
            let mut env = Assignment::new()
                .with_num("x", xs)
                .with_str("X", input.clone())
                .with_str("F", prev);
            for z in 0..a {
                env.set_num("i", z);
                let expected = z < t && eval_formula(&spec.next, &env, reg)?;
                if stored.contains(z) != expected {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::table_from_rows;
    use crate::logic::{parse_formula, parse_num_term};

    /// Each stage shifts the input's stage-0 bits left by one.
    fn shift_spec(reg: &FunctionRegistry) -> RecursionSpec {
        RecursionSpec {
            init: parse_formula("X(i)", reg).unwrap(),
            next: parse_formula("E j < i : (j + 1 = i & F(j))", reg).unwrap(),
            bound: parse_num_term("x + n + 1", reg).unwrap(),
        }
    }

    #[test]
    fn shifts_a_singleton() {
        let reg = FunctionRegistry::standard();
        let spec = shift_spec(&reg);
        spec.check_monotone(&reg).unwrap();
        let input = BitSet::from_indices([0]);
        assert_eq!(
            rec_eval(&spec, 3, &input, &reg).unwrap(),
            BitSet::from_indices([3])
        );
        assert_eq!(rec_eval(&spec, 0, &input, &reg).unwrap(), input);
        let trace = rec_trace(&spec, 3, &input, &reg).unwrap();
        assert_eq!(trace.len(), 4);
        for (step, bits) in trace.iter().enumerate() {
            assert_eq!(*bits, BitSet::from_indices([step as u64]));
        }
    }

    #[test]
    fn stage_zero_is_cut_at_the_bound() {
        let reg = FunctionRegistry::standard();
        let spec = RecursionSpec {
            init: parse_formula("X(i)", &reg).unwrap(),
            next: parse_formula("F(i)", &reg).unwrap(),
            bound: parse_num_term("1", &reg).unwrap(),
        };
        let input = BitSet::from_indices([0, 2]);
        assert_eq!(
            rec_eval(&spec, 0, &input, &reg).unwrap(),
            BitSet::from_indices([0])
        );
        assert_eq!(
            rec_eval(&spec, 5, &input, &reg).unwrap(),
            BitSet::from_indices([0])
        );

        let empty = RecursionSpec {
            bound: parse_num_term("0", &reg).unwrap(),
            ..spec
        };
        assert_eq!(rec_eval(&empty, 2, &input, &reg).unwrap(), BitSet::new());
    }

    #[test]
    fn runaway_bound_is_an_error() {
        let reg = FunctionRegistry::standard();
        let spec = RecursionSpec {
            init: parse_formula("X(i)", &reg).unwrap(),
            next: parse_formula("F(i)", &reg).unwrap(),
            bound: parse_num_term("n * n * n * n * n", &reg).unwrap(),
        };
        let wide = BitSet::from_indices([200]);
        assert!(matches!(
            rec_eval(&spec, 1, &wide, &reg),
            Err(SubpError::BoundTooWide(_))
        ));
    }

    #[test]
    fn shrinking_bound_is_rejected() {
        let mut reg = FunctionRegistry::standard();
        reg.register_min_witness(
            "dec",
            vec!["x".into()],
            vec![],
            "w".into(),
            parse_num_term("8", &FunctionRegistry::standard()).unwrap(),
            parse_formula("w + x = 8", &FunctionRegistry::standard()).unwrap(),
        )
        .unwrap();
        let spec = RecursionSpec {
            init: parse_formula("X(i)", &reg).unwrap(),
            next: parse_formula("F(i)", &reg).unwrap(),
            bound: parse_num_term("dec(x)", &reg).unwrap(),
        };
        assert_eq!(spec.check_monotone(&reg), Err(SubpError::NotMonotone));

        let fine = shift_spec(&reg);
        assert_eq!(fine.check_monotone(&reg), Ok(()));
    }

    #[test]
    fn batch_table_slices_match_the_traces() {
        let reg = FunctionRegistry::standard();
        let spec = shift_spec(&reg);
        let inputs = [
            BitSet::from_indices([0]),
            BitSet::from_indices([1, 2]),
            BitSet::new(),
        ];
        let x = table_from_rows(&inputs);
        let a = 3;
        let b = inputs.len() as u64;
        let multi = rec_eval_multi(&spec, a, b, &x, &reg).unwrap();
        for (yy, input) in inputs.iter().enumerate() {
            let trace = rec_trace(&spec, a, input, &reg).unwrap();
            for (step, bits) in trace.iter().enumerate() {
                assert_eq!(
                    row(pair(yy as u64, step as u64), &multi),
                    *bits,
                    "input {} stage {}",
                    yy,
                    step
                );
            }
        }
    }

    #[test]
    fn stored_traces_verify_and_mutations_fail() {
        let reg = FunctionRegistry::standard();
        let spec = shift_spec(&reg);
        let inputs = [BitSet::from_indices([0]), BitSet::from_indices([1, 3])];
        let x = table_from_rows(&inputs);
        let a = 5;
        let b = inputs.len() as u64;
        let good = rec_eval_multi(&spec, a, b, &x, &reg).unwrap();
        assert!(check_phi_f(&spec, a, b, &x, &good, &reg).unwrap());

        for yy in 0..b {
            for xs in 0..=a {
                for z in 0..a {
                    let mut bad = good.clone();
                    let code = pair(pair(yy, xs), z);
                    if bad.contains(code) {
                        bad.remove(code);
                    } else {
                        bad.insert(code);
                    }
                    assert!(
                        !check_phi_f(&spec, a, b, &x, &bad, &reg).unwrap(),
                        "flip at y={} stage={} bit={} went unnoticed",
                        yy,
                        xs,
                        z
                    );
                }
            }
        }
    }
}

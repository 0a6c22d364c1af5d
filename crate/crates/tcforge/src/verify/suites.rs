use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{compile_mul, compile_sigma0, compile_tc0, InputLayout};
use crate::kernel::{
    comprehend, fse, get_cell, min_witness, numones, pair, parse_table, random_bitset,
    random_bitset_varlen, row, set_cell, table_from_rows, unpair, BitSet, Table2D,
};
use crate::logic::{
    classify, eliminate_counting, eliminate_counting_traced, eval_formula, lower_th_to_count,
    parse_formula, parse_num_term, Assignment, FormulaClass, FunctionRegistry,
};
use crate::rsuv::{
    count_via_mul, decode_num, encode_num, eval_delta, eval_delta_formula, flat_translate,
    sharp_translate, DeltaEnv, DeltaTerm,
};
use crate::subp::{
    check_phi_f, expected_layers, gap_array, gap_reach, gate_value, nck_eval, parse_digraph,
    rec_eval_multi, rec_trace, GateSpec, Layer, LayeredCircuit, RecursionSpec,
};
use crate::tc0alg::{
    add_bits, block_bound_checks, check_numones_array, finite_union, mul_bits,
    multi_counting_arrays, numones_array, php_collision, sum_prime, tot_numones, union, Tc0Error,
};

use super::{genform, oracle::oracle_eval, Runner};

/// Bit set to bignum through a byte buffer; shares nothing with the
/// word-level encoding under test.
fn big(x: &BitSet) -> BigUint {
    let mut bytes = Vec::new();
    for i in x.iter() {
        let byte = (i / 8) as usize;
        if bytes.len() <= byte {
            bytes.resize(byte + 1, 0u8);
        }
        bytes[byte] |= 1 << (i % 8);
    }
    BigUint::from_bytes_le(&bytes)
}

fn word(v: u64) -> BitSet {
    BitSet::from_words(vec![v])
}

fn env2(x: &BitSet, y: &BitSet) -> Assignment {
    Assignment::new()
        .with_str("X", x.clone())
        .with_str("Y", y.clone())
}

fn strs2(x: &BitSet, y: &BitSet) -> BTreeMap<String, BitSet> {
    BTreeMap::from([("X".to_string(), x.clone()), ("Y".to_string(), y.clone())])
}

pub(super) fn basic(r: &mut Runner) {
    r.check("pairing round trip", 200, |_, rng| {
        let x = rng.gen_range(0..1_000_000u64);
        let y = rng.gen_range(0..1_000_000u64);
        match unpair(pair(x, y)) {
            Ok(back) if back == (x, y) => Ok(()),
            other => Err(format!("pair({x},{y}) decoded to {other:?}")),
        }
    });
    r.check("small sums", 100, |_, rng| {
        let x = rng.gen::<u32>() as u64;
        let y = rng.gen::<u32>() as u64;
        let got = add_bits(&word(x), &word(y));
        if got == word(x + y) {
            Ok(())
        } else {
            Err(format!("{x} + {y} came out as {got}"))
        }
    });
    r.check("small products", 100, |_, rng| {
        let x = rng.gen::<u16>() as u64;
        let y = rng.gen::<u16>() as u64;
        let got = mul_bits(&word(x), &word(y));
        if got == word(x * y) {
            Ok(())
        } else {
            Err(format!("{x} * {y} came out as {got}"))
        }
    });
    r.check("threshold quantifier", 1, |_, _| {
        let reg = FunctionRegistry::standard();
        let phi = parse_formula("Th[2] z < 4 : X(z)", &reg).map_err(|e| e.to_string())?;
        let yes = Assignment::new().with_str("X", BitSet::from_indices([1, 3]));
        let no = Assignment::new().with_str("X", BitSet::from_indices([1]));
        match (
            eval_formula(&phi, &yes, &reg),
            eval_formula(&phi, &no, &reg),
        ) {
            (Ok(true), Ok(false)) => Ok(()),
            other => Err(format!("threshold evaluation returned {other:?}")),
        }
    });
    r.check("compiled formula", 1, |_, _| {
        let reg = FunctionRegistry::standard();
        let phi = parse_formula("Th[2] z < 4 : X(z)", &reg).map_err(|e| e.to_string())?;
        let layout = InputLayout::new().with_str("X", 4);
        let c = compile_tc0(&phi, &layout, &reg).map_err(|e| e.to_string())?;
        for mask in 0..16u64 {
            let env = Assignment::new().with_str("X", word(mask));
            let got = c.eval(&env).map_err(|e| e.to_string())?[0];
            let want = eval_formula(&phi, &env, &reg).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("mask {mask:04b}: circuit {got}, evaluator {want}"));
            }
        }
        Ok(())
    });
    r.check("reachability", 1, |_, _| {
        let (a, e) = parse_digraph("a=4; 0->1; 1->2;").map_err(|e| e.to_string())?;
        match (gap_reach(a, &e, 2), gap_reach(a, &e, 3)) {
            (Ok(true), Ok(false)) => Ok(()),
            other => Err(format!("reachability answered {other:?}")),
        }
    });
}

pub(super) fn kernel(r: &mut Runner) {
    r.check("pairing is injective on a grid", 1, |_, _| {
        let mut seen = HashSet::new();
        for x in 0..=100u64 {
            for y in 0..=100u64 {
                if !seen.insert(pair(x, y)) {
                    return Err(format!("code {} repeats at ({x},{y})", pair(x, y)));
                }
            }
        }
        Ok(())
    });
    r.check("pair codes decode back", 500, |_, rng| {
        let x = rng.gen_range(0..1_000_000_000u64);
        let y = rng.gen_range(0..1_000_000_000u64);
        match unpair(pair(x, y)) {
            Ok(back) if back == (x, y) => Ok(()),
            other => Err(format!("({x},{y}) decoded to {other:?}")),
        }
    });
    r.check("counting matches a filtered scan", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 128);
        let z = rng.gen_range(0..=160u64);
        let want = x.iter().filter(|&i| i < z).count() as u64;
        if numones(z, &x) == want {
            Ok(())
        } else {
            Err(format!("numones({z}, {x}) != {want}"))
        }
    });
    r.check("first difference position", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 64);
        let y = random_bitset_varlen(rng, 64);
        let want = (0..x.len())
            .find(|&z| x.contains(z) != y.contains(z))
            .unwrap_or(x.len());
        if fse(&x, &y) == want {
            Ok(())
        } else {
            Err(format!("fse({x}, {y}) != {want}"))
        }
    });
    r.check("least witnesses and comprehension windows", 300, |_, rng| {
        let s = random_bitset_varlen(rng, 32);
        let t = rng.gen_range(0..=40u64);
        let want = (0..t).find(|&z| s.contains(z)).unwrap_or(t);
        if min_witness(|z| s.contains(z), t) != want {
            return Err(format!("min witness below {t} in {s} is not {want}"));
        }
        if comprehend(|z| s.contains(z), t) != s.below(t) {
            return Err(format!("comprehension window {t} of {s} is off"));
        }
        Ok(())
    });
    r.check("table cells round trip", 200, |_, rng| {
        let rows: Vec<BitSet> = (0..rng.gen_range(0..8))
            .map(|_| random_bitset_varlen(rng, 16))
            .collect();
        let t = table_from_rows(&rows);
        for (x, r0) in rows.iter().enumerate() {
            if row(x as u64, &t) != *r0 {
                return Err(format!("row {x} came back as {}", row(x as u64, &t)));
            }
            for i in 0..16 {
                if get_cell(&t, x as u64, i) != r0.contains(i) {
                    return Err(format!("cell ({x},{i}) is off"));
                }
            }
        }
        Ok(())
    });
    r.check("table text form round trips", 1, |_, _| {
        let (t, rows) = parse_table("[{0,1};{};{2}]").map_err(|e| e.to_string())?;
        if rows == 3
            && row(0, &t) == BitSet::from_indices([0, 1])
            && row(2, &t) == BitSet::from_indices([2])
        {
            Ok(())
        } else {
            Err("parsed rows are off".to_string())
        }
    });
}

pub(super) fn mul_oracle(r: &mut Runner) {
    r.check("products below 64, exhaustively", 4096, |t, _| {
        let (x, y) = (t >> 6, t & 63);
        let got = mul_bits(&word(x), &word(y));
        if got == word(x * y) {
            Ok(())
        } else {
            Err(format!("{x} * {y} came out as {got}"))
        }
    });
    r.check("random products at width 2048", 200, |_, rng| {
        let x = random_bitset(rng, 2048);
        let y = random_bitset(rng, 2048);
        if big(&mul_bits(&x, &y)) == big(&x) * big(&y) {
            Ok(())
        } else {
            Err(format!("wide product of {}-bit operands is off", 2048))
        }
    });
}

pub(super) fn mul_laws(r: &mut Runner) {
    r.check("multiplication commutes", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 256);
        let y = random_bitset_varlen(rng, 256);
        if mul_bits(&x, &y) == mul_bits(&y, &x) {
            Ok(())
        } else {
            Err(format!("{x} * {y} depends on the order"))
        }
    });
    r.check("multiplication associates", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 256);
        let y = random_bitset_varlen(rng, 256);
        let z = random_bitset_varlen(rng, 256);
        if mul_bits(&mul_bits(&x, &y), &z) == mul_bits(&x, &mul_bits(&y, &z)) {
            Ok(())
        } else {
            Err(format!("associativity broke on {x}, {y}, {z}"))
        }
    });
    r.check("multiplication distributes over addition", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 256);
        let y = random_bitset_varlen(rng, 256);
        let z = random_bitset_varlen(rng, 256);
        let lhs = mul_bits(&x, &add_bits(&y, &z));
        let rhs = add_bits(&mul_bits(&x, &y), &mul_bits(&x, &z));
        if lhs == rhs {
            Ok(())
        } else {
            Err(format!("distributivity broke on {x}, {y}, {z}"))
        }
    });
}

pub(super) fn row_append(r: &mut Runner) {
    r.check("appending a row adds its value", 200, |_, rng| {
        let n = rng.gen_range(0..12u64);
        let m = rng.gen_range(1..24u64);
        let rows: Vec<BitSet> = (0..=n).map(|_| random_bitset_varlen(rng, m)).collect();
        let z = table_from_rows(&rows);
        let (whole, _) = crate::tc0alg::sum_rows(n + 1, m, &z);
        let (head, _) = crate::tc0alg::sum_rows(n, m, &z);
        if whole == add_bits(&head, &row(n, &z)) {
            Ok(())
        } else {
            Err(format!("append law broke at n={n}, m={m}"))
        }
    });
}

pub(super) fn perm_count(r: &mut Runner) {
    r.check("counting is permutation invariant", 500, |_, rng| {
        let ell = rng.gen_range(1..=64u64);
        let mut perm: Vec<u64> = (0..ell).collect();
        perm.shuffle(rng);
        let x = random_bitset(rng, ell);
        let image = BitSet::from_indices(x.iter().map(|i| perm[i as usize]));
        if numones(ell, &x) == numones(ell, &image) {
            Ok(())
        } else {
            Err(format!("count changed under a permutation of 0..{ell}"))
        }
    });
}

pub(super) fn block_bounds(r: &mut Runner) {
    let before = block_bound_checks();
    r.check("block sums respect every cap", 300, |_, rng| {
        let n = rng.gen_range(0..=24u64);
        let m = rng.gen_range(1..=32u64);
        let rows: Vec<BitSet> = (0..m).map(|_| random_bitset_varlen(rng, n)).collect();
        let w = table_from_rows(&rows);
        let (bits, plan) = sum_prime(m, n, &w).map_err(|e| e.to_string())?;
        let want: u128 = rows
            .iter()
            .enumerate()
            .map(|(i, r0)| (r0.len() as u128) << i)
            .sum();
        if big(&bits) != BigUint::from(want) {
            return Err(format!("weighted sum at n={n}, m={m} is off"));
        }
        let (nv, ell) = ((n.max(1)) as u128, plan.ell);
        for &b in &plan.block_sums {
            let bv = b as u128;
            if bv >= 1 << (2 * ell).min(127) || bv >= 4 * nv * nv || bv >= nv << ell {
                return Err(format!("block sum {b} escapes its caps at n={n}, ell={ell}"));
            }
        }
        Ok(())
    });
    r.check("cap assertions executed", 1, |_, _| {
        let after = block_bound_checks();
        if after > before {
            Ok(())
        } else {
            Err("no block cap assertion ran".to_string())
        }
    });
}

pub(super) fn counting_arrays(r: &mut Runner) {
    r.check("arrays satisfy the literal checker", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 48);
        if check_numones_array(&x, &numones_array(&x)) {
            Ok(())
        } else {
            Err(format!("the counting array of {x} was rejected"))
        }
    });
    r.check("single cell flips are caught", 500, |_, rng| {
        let x = random_bitset_varlen(rng, 48);
        let good = numones_array(&x);
        let l = x.len();
        for _ in 0..100 {
            let z = rng.gen_range(0..=l);
            let v = rng.gen_range(0..=l);
            let mut mutated = good.clone();
            mutated.toggle(pair(z, v));
            if check_numones_array(&x, &mutated) {
                return Err(format!("toggling cell ({z},{v}) on {x} went unnoticed"));
            }
        }
        Ok(())
    });
    r.check("batched arrays match per-row arrays", 200, |_, rng| {
        let b = rng.gen_range(0..=6u64);
        let rows: Vec<BitSet> = (0..b).map(|_| random_bitset_varlen(rng, 12)).collect();
        let x = table_from_rows(&rows);
        let multi = multi_counting_arrays(b, &x);
        for u in 0..b {
            if row(u, &multi) != numones_array(&row(u, &x)) {
                return Err(format!("batched array of row {u} is off"));
            }
        }
        Ok(())
    });
}

pub(super) fn quantifiers(r: &mut Runner) {
    let reg = FunctionRegistry::standard();
    r.check("evaluator agrees with the substitution oracle", 1000, |_, rng| {
        let phi = genform::random_counting_formula(rng, 3);
        let x = random_bitset_varlen(rng, 8);
        let y = random_bitset_varlen(rng, 8);
        let main = eval_formula(&phi, &env2(&x, &y), &reg).map_err(|e| e.to_string())?;
        let second = oracle_eval(&phi, &strs2(&x, &y))?;
        if main == second {
            Ok(())
        } else {
            Err(format!("{phi} with X={x}, Y={y}: {main} vs {second}"))
        }
    });
}

pub(super) fn transforms(r: &mut Runner) {
    r.check("threshold lowering preserves truth", 200, |_, rng| {
        let phi = genform::random_threshold_formula(rng, 3);
        let mut reg = FunctionRegistry::standard();
        let psi = lower_th_to_count(&phi, &mut reg).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let x = random_bitset_varlen(rng, 8);
            let y = random_bitset_varlen(rng, 8);
            let env = env2(&x, &y);
            let a = eval_formula(&phi, &env, &reg).map_err(|e| e.to_string())?;
            let b = eval_formula(&psi, &env, &reg).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{phi} lowers to {psi}, split at X={x}, Y={y}"));
            }
        }
        Ok(())
    });
    r.check("counting elimination preserves truth", 200, |_, rng| {
        let phi = genform::random_threshold_formula(rng, 3);
        let mut reg = FunctionRegistry::standard();
        let psi = lower_th_to_count(&phi, &mut reg).map_err(|e| e.to_string())?;
        let chi = eliminate_counting(&psi, &reg).map_err(|e| e.to_string())?;
        if !matches!(
            classify(&chi),
            FormulaClass::SigB0 | FormulaClass::SigB0Th
        ) {
            return Err(format!("elimination left class {}", classify(&chi)));
        }
        for _ in 0..100 {
            let x = random_bitset_varlen(rng, 8);
            let y = random_bitset_varlen(rng, 8);
            let env = env2(&x, &y);
            let a = eval_formula(&phi, &env, &reg).map_err(|e| e.to_string())?;
            let b = eval_formula(&chi, &env, &reg).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("elimination of {psi} split at X={x}, Y={y}"));
            }
        }
        Ok(())
    });
    r.check("elimination steps strictly shrink symbol depth", 200, |_, rng| {
        let phi = genform::random_threshold_formula(rng, 3);
        let mut reg = FunctionRegistry::standard();
        let psi = lower_th_to_count(&phi, &mut reg).map_err(|e| e.to_string())?;
        let (_, steps) = eliminate_counting_traced(&psi, &reg).map_err(|e| e.to_string())?;
        for s in &steps {
            if s.before <= s.after {
                return Err(format!(
                    "step on {} went {} -> {}",
                    s.symbol, s.before, s.after
                ));
            }
        }
        Ok(())
    });
}

pub(super) fn circuit_diff(r: &mut Runner) {
    let reg = FunctionRegistry::standard();
    r.check("compiled formulas agree with evaluation", 120, |_, rng| {
        let phi = genform::random_counting_formula(rng, 3);
        let layout = InputLayout::new().with_str("X", 4).with_str("Y", 4);
        let c = compile_tc0(&phi, &layout, &reg).map_err(|e| e.to_string())?;
        let base = match classify(&phi) {
            FormulaClass::SigB0 => {
                Some(compile_sigma0(&phi, &layout, &reg).map_err(|e| e.to_string())?)
            }
            _ => None,
        };
        for mask in 0..256u64 {
            let (x, y) = (word(mask & 15), word(mask >> 4));
            let env = env2(&x, &y);
            let want = eval_formula(&phi, &env, &reg).map_err(|e| e.to_string())?;
            let got = c.eval(&env).map_err(|e| e.to_string())?[0];
            if got != want {
                return Err(format!("{phi} at X={x}, Y={y}: circuit {got}"));
            }
            if let Some(b) = &base {
                if b.eval(&env).map_err(|e| e.to_string())?[0] != want {
                    return Err(format!("{phi} at X={x}, Y={y}: base circuit is off"));
                }
            }
        }
        Ok(())
    });
    r.check("multiplier circuits multiply, exhaustively", 3, |t, _| {
        let n = [1u64, 2, 4][t as usize];
        let c = compile_mul(n);
        for x in 0..1 << n {
            for y in 0..1 << n {
                let env = env2(&word(x), &word(y));
                let out = c.eval(&env).map_err(|e| e.to_string())?;
                let got = out
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .fold(0u64, |acc, (j, _)| acc | 1 << j);
                if got != x * y {
                    return Err(format!("width {n}: {x} * {y} came out as {got}"));
                }
            }
        }
        Ok(())
    });
    r.check("an eight bit multiplier on random pairs", 200, |_, rng| {
        let c = compile_mul(8);
        let x = rng.gen_range(0..256u64);
        let y = rng.gen_range(0..256u64);
        let env = env2(&word(x), &word(y));
        let out = c.eval(&env).map_err(|e| e.to_string())?;
        let got = out
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u64, |acc, (j, _)| acc | 1 << j);
        if got == x * y {
            Ok(())
        } else {
            Err(format!("{x} * {y} came out as {got}"))
        }
    });
}

pub(super) fn circuit_depth(r: &mut Runner) {
    let widths = [4u64, 8, 16, 32, 64];
    r.check("depth is width independent", 1, |_, _| {
        let depths: Vec<u64> = widths.iter().map(|&n| compile_mul(n).metrics().depth).collect();
        if depths.iter().all(|&d| d == depths[0]) {
            Ok(())
        } else {
            Err(format!("depths {depths:?} across widths {widths:?}"))
        }
    });
    r.check("size stays within the cubic envelope", 1, |_, _| {
        let c = compile_mul(4).metrics().size as f64 / 64.0;
        for &n in &widths {
            let size = compile_mul(n).metrics().size as f64;
            if size > c * (n as f64).powi(3) {
                return Err(format!(
                    "width {n} has {size} gates, over {:.1}",
                    c * (n as f64).powi(3)
                ));
            }
        }
        Ok(())
    });
}

pub(super) fn count_via_mul_suite(r: &mut Runner) {
    r.check("prefix counts via one product", 1000, |_, rng| {
        let x = random_bitset_varlen(rng, 1024);
        let arr = count_via_mul(&big(&x));
        if arr != numones_array(&x) {
            return Err(format!("array via product is off for a {}-bit input", x.len()));
        }
        if !check_numones_array(&x, &arr) {
            return Err(format!("array via product fails the checker at {}", x.len()));
        }
        Ok(())
    });
}

fn bitlen(x: u64) -> u64 {
    64 - x.leading_zeros() as u64
}

pub(super) fn delta_ops(r: &mut Runner) {
    use DeltaTerm::{Add, Bit, Half, Len, Mod2, Monus, Msp, Mul, Smash, Succ, Var};
    let v = |n: &str| Box::new(Var(n.to_string()));
    r.check("binary operators, exhaustively below 256", 65536, |t, _| {
        let (x, y) = (t >> 8, t & 255);
        let env: DeltaEnv = BTreeMap::from([
            ("x".to_string(), BigUint::from(x)),
            ("y".to_string(), BigUint::from(y)),
        ]);
        let table: [(&str, DeltaTerm, BigUint); 6] = [
            ("add", Add(v("x"), v("y")), BigUint::from(x + y)),
            ("mul", Mul(v("x"), v("y")), BigUint::from(x * y)),
            ("monus", Monus(v("x"), v("y")), BigUint::from(x.saturating_sub(y))),
            (
                "smash",
                Smash(v("x"), v("y")),
                BigUint::from(1u8) << (bitlen(x) * bitlen(y)),
            ),
            ("msp", Msp(v("x"), v("y")), BigUint::from(x >> y.min(63))),
            ("bit", Bit(v("y"), v("x")), BigUint::from((x >> y.min(63)) & 1)),
        ];
        for (name, term, want) in table {
            let got = eval_delta(&term, &env).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("{name}({x},{y}) = {got}, expected {want}"));
            }
        }
        Ok(())
    });
    r.check("unary operators, exhaustively below 65536", 65536, |x, _| {
        let env: DeltaEnv = BTreeMap::from([("x".to_string(), BigUint::from(x))]);
        let table: [(&str, DeltaTerm, u64); 4] = [
            ("succ", Succ(v("x")), x + 1),
            ("half", Half(v("x")), x / 2),
            ("len", Len(v("x")), bitlen(x)),
            ("mod2", Mod2(v("x")), x & 1),
        ];
        for (name, term, want) in table {
            let got = eval_delta(&term, &env).map_err(|e| e.to_string())?;
            if got != BigUint::from(want) {
                return Err(format!("{name}({x}) = {got}, expected {want}"));
            }
        }
        Ok(())
    });
}

pub(super) fn php(r: &mut Runner) {
    r.check("a collision exists and the least is returned", 500, |_, rng| {
        let a = rng.gen_range(1..=200u64);
        let mut x = Table2D::new();
        let mut hole_of = Vec::with_capacity(a as usize + 1);
        for z in 0..=a {
            let y = rng.gen_range(0..a);
            set_cell(&mut x, y, z);
            hole_of.push(y);
        }
        let (y, z1, z2) = php_collision(a, &x).map_err(|e| e.to_string())?;
        let want_y = (0..a)
            .find(|&h| hole_of.iter().filter(|&&v| v == h).count() >= 2)
            .expect("a+1 pigeons in a holes always collide");
        let mut pigeons = (0..=a).filter(|&z| hole_of[z as usize] == want_y);
        let (want_z2, want_z1) = (pigeons.next().unwrap(), pigeons.next().unwrap());
        if (y, z1, z2) == (want_y, want_z1, want_z2) {
            Ok(())
        } else {
            Err(format!(
                "collision ({y},{z1},{z2}) instead of ({want_y},{want_z1},{want_z2})"
            ))
        }
    });
    r.check("a missing pigeon is reported", 200, |_, rng| {
        let a = rng.gen_range(1..=60u64);
        let mut x = Table2D::new();
        let mut hole_of = Vec::new();
        for z in 0..=a {
            let y = rng.gen_range(0..a);
            set_cell(&mut x, y, z);
            hole_of.push(y);
        }
        let dropped = rng.gen_range(0..=a);
        let mut broken = x.clone();
        broken.remove(pair(hole_of[dropped as usize], dropped));
        match php_collision(a, &broken) {
            Err(Tc0Error::Unmapped(z)) if z == dropped => Ok(()),
            other => Err(format!("dropping pigeon {dropped} gave {other:?}")),
        }
    });
    r.check("counting inequalities", 500, |_, rng| {
        let b = rng.gen_range(1..32u64);
        let x = random_bitset_varlen(rng, b);
        let y = random_bitset_varlen(rng, b);
        if numones(b, &union(b, &x, &y)) > numones(b, &x) + numones(b, &y) {
            return Err(format!("union count broke on {x}, {y}"));
        }
        let a = rng.gen_range(0..8u64);
        let rows: Vec<BitSet> = (0..=a).map(|_| random_bitset_varlen(rng, b)).collect();
        let z = table_from_rows(&rows);
        if tot_numones(a + 1, b, &z) != tot_numones(a, b, &z) + numones(b, &row(a, &z)) {
            return Err(format!("total count recurrence broke at a={a}"));
        }
        if numones(b, &finite_union(a, b, &z)) > tot_numones(a, b, &z) {
            return Err(format!("finite union count broke at a={a}"));
        }
        let k = rows.iter().map(|r0| numones(b, r0)).max().unwrap();
        if tot_numones(a, b, &z) > a * k {
            return Err(format!("total count cap broke at a={a}, k={k}"));
        }
        Ok(())
    });
}

pub(super) fn gap(r: &mut Runner) {
    r.check("saturation equals breadth first search", 1000, |_, rng| {
        let a = rng.gen_range(0..=50u64);
        let mut e = BitSet::new();
        if a > 0 {
            for _ in 0..rng.gen_range(0..=2 * a) {
                e.insert(pair(rng.gen_range(0..a), rng.gen_range(0..a)));
            }
        }
        let t = gap_array(a, &e);
        if a == 0 {
            return if t.is_empty() {
                Ok(())
            } else {
                Err("empty graph produced rows".to_string())
            };
        }
        let mut ball = BitSet::from_indices([0]);
        for k in 0..a {
            if row(k, &t) != ball {
                return Err(format!("row {k} differs from the radius-{k} ball"));
            }
            let mut next = ball.clone();
            for i in 0..a {
                if (0..a).any(|j| ball.contains(j) && e.contains(pair(j, i))) {
                    next.insert(i);
                }
            }
            ball = next;
        }
        if row(a - 1, &t) != ball {
            return Err("the last row is not a fixed point".to_string());
        }
        let target = rng.gen_range(0..a);
        match gap_reach(a, &e, target) {
            Ok(ans) if ans == ball.contains(target) => Ok(()),
            other => Err(format!("query on vertex {target} answered {other:?}")),
        }
    });
}

fn random_layered(rng: &mut ChaCha8Rng) -> LayeredCircuit {
    let a = rng.gen_range(2..=16u64);
    let k = rng.gen_range(1..=2u32);
    let layers = (0..expected_layers(a, k))
        .map(|_| Layer {
            gates: (0..=a)
                .map(|z| GateSpec {
                    z,
                    x: rng.gen_range(0..=a),
                    y: rng.gen_range(0..=a),
                    and: rng.gen_bool(0.5),
                })
                .collect(),
        })
        .collect();
    LayeredCircuit { a, k, layers }
}

fn memo_gate(
    c: &LayeredCircuit,
    x: &BitSet,
    d: usize,
    z: u64,
    memo: &mut HashMap<(usize, u64), bool>,
) -> bool {
    if d == 0 {
        return z <= c.a && x.contains(z);
    }
    if let Some(&v) = memo.get(&(d, z)) {
        return v;
    }
    let g = c.layers[d - 1]
        .gates
        .iter()
        .find(|g| g.z == z)
        .expect("well-wired circuit");
    let (p, q) = (
        memo_gate(c, x, d - 1, g.x, memo),
        memo_gate(c, x, d - 1, g.y, memo),
    );
    let v = if g.and { p && q } else { p || q };
    memo.insert((d, z), v);
    v
}

fn shift_left_spec(reg: &FunctionRegistry) -> RecursionSpec {
    RecursionSpec {
        init: parse_formula("X(i)", reg).expect("fixed formula parses"),
        next: parse_formula("E j < i : (j + 1 = i & F(j))", reg).expect("fixed formula parses"),
        bound: parse_num_term("x + n + 1", reg).expect("fixed term parses"),
    }
}

pub(super) fn nck_rec(r: &mut Runner) {
    r.check("layered circuits match memoized recursion", 300, |_, rng| {
        let c = random_layered(rng);
        let x = random_bitset_varlen(rng, c.a + 1);
        let t = nck_eval(&c, &x).map_err(|e| e.to_string())?;
        let mut memo = HashMap::new();
        for d in 0..=c.layers.len() {
            for z in 0..=c.a {
                if gate_value(&t, d as u64, z) != memo_gate(&c, &x, d, z, &mut memo) {
                    return Err(format!("layer {d} gate {z} is off at a={}", c.a));
                }
            }
        }
        Ok(())
    });
    let reg = FunctionRegistry::standard();
    let spec = shift_left_spec(&reg);
    let (a, b) = (4u64, 3u64);
    r.check("batched recursion equals stage by stage traces", 100, |_, rng| {
        let rows: Vec<BitSet> = (0..b).map(|_| random_bitset_varlen(rng, 12)).collect();
        let x = table_from_rows(&rows);
        let multi = rec_eval_multi(&spec, a, b, &x, &reg).map_err(|e| e.to_string())?;
        for (y, input) in rows.iter().enumerate() {
            let trace = rec_trace(&spec, a, input, &reg).map_err(|e| e.to_string())?;
            for (step, bits) in trace.iter().enumerate() {
                if row(pair(y as u64, step as u64), &multi) != *bits {
                    return Err(format!("input {y} stage {step} is off"));
                }
            }
        }
        Ok(())
    });
    r.check("trace validator rejects random corruption", 100, |_, rng| {
        let rows: Vec<BitSet> = (0..b).map(|_| random_bitset_varlen(rng, 6)).collect();
        let x = table_from_rows(&rows);
        let good = rec_eval_multi(&spec, a, b, &x, &reg).map_err(|e| e.to_string())?;
        if !check_phi_f(&spec, a, b, &x, &good, &reg).map_err(|e| e.to_string())? {
            return Err("a faithful trace was rejected".to_string());
        }
        let (y, xs, z) = (
            rng.gen_range(0..b),
            rng.gen_range(0..=a),
            rng.gen_range(0..a),
        );
        let mut bad = good.clone();
        bad.toggle(pair(pair(y, xs), z));
        if check_phi_f(&spec, a, b, &x, &bad, &reg).map_err(|e| e.to_string())? {
            return Err(format!("flip at y={y}, stage={xs}, bit={z} went unnoticed"));
        }
        Ok(())
    });
}

pub(super) fn rsuv_roundtrip(r: &mut Runner) {
    r.check("encoding inverts on all 16 bit values", 65536, |t, _| {
        let n = BigUint::from(t);
        let s = decode_num(&n);
        if s != word(t) {
            return Err(format!("{t} decoded to {s}"));
        }
        if encode_num(&s) != n {
            return Err(format!("{t} did not encode back"));
        }
        Ok(())
    });
    r.check("encoding inverts on wide strings", 1000, |_, rng| {
        let x = random_bitset_varlen(rng, 4096);
        if encode_num(&x) != big(&x) {
            return Err(format!("encoding disagrees with the byte path at {}", x.len()));
        }
        if decode_num(&encode_num(&x)) != x {
            return Err(format!("round trip broke on a {}-bit string", x.len()));
        }
        Ok(())
    });
    r.check("translations invert and preserve truth", 500, |_, rng| {
        let phi = genform::random_flat_formula(rng, 3);
        let down = flat_translate(&phi).map_err(|e| e.to_string())?;
        let back = sharp_translate(&down).map_err(|e| e.to_string())?;
        if back != phi {
            return Err(format!("{phi} came back as {back}"));
        }
        let reg = FunctionRegistry::standard();
        let x = random_bitset_varlen(rng, 8);
        let y = random_bitset_varlen(rng, 8);
        let denv: DeltaEnv = BTreeMap::from([
            ("X".to_string(), encode_num(&x)),
            ("Y".to_string(), encode_num(&y)),
        ]);
        let sorted = eval_formula(&phi, &env2(&x, &y), &reg).map_err(|e| e.to_string())?;
        let single = eval_delta_formula(&down, &denv).map_err(|e| e.to_string())?;
        if sorted == single {
            Ok(())
        } else {
            Err(format!("{phi} with X={x}, Y={y}: {sorted} vs {single}"))
        }
    });
}

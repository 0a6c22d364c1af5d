use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::logic::{Assignment, FormulaClass};

/// One gate of an unbounded-fanin circuit. Children are indices of earlier
/// gates, so a gate list in index order is already topologically sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Bit `bit` of the input variable `var`.
    Input { var: String, bit: u64 },
    ConstTrue,
    ConstFalse,
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    /// True when at least `k` children are true; `k` may exceed the fanin
    /// by one, giving a gate that is never true.
    Threshold(u64, Vec<usize>),
}

impl Gate {
    pub fn children(&self) -> &[usize] {
        match self {
            Gate::Input { .. } | Gate::ConstTrue | Gate::ConstFalse => &[],
            Gate::Not(g) => std::slice::from_ref(g),
            Gate::And(cs) | Gate::Or(cs) | Gate::Threshold(_, cs) => cs,
        }
    }

    fn map_children(self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::Not(c) => Gate::Not(f(c)),
            Gate::And(cs) => Gate::And(cs.into_iter().map(f).collect()),
            Gate::Or(cs) => Gate::Or(cs.into_iter().map(f).collect()),
            Gate::Threshold(k, cs) => Gate::Threshold(k, cs.into_iter().map(f).collect()),
            g => g,
        }
    }
}

/// Declared bit widths of the circuit inputs. A string variable of width n
/// exposes bits 0..n-1. A number variable is unary: bit j means j < x, so
/// the width is also the largest representable value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputLayout {
    pub strs: BTreeMap<String, u64>,
    pub nums: BTreeMap<String, u64>,
}

impl InputLayout {
    pub fn new() -> Self {
        InputLayout::default()
    }

    pub fn with_str(mut self, name: &str, width: u64) -> Self {
        self.strs.insert(name.to_string(), width);
        self
    }

    pub fn with_num(mut self, name: &str, width: u64) -> Self {
        self.nums.insert(name.to_string(), width);
        self
    }

    pub fn width_of(&self, var: &str) -> Option<u64> {
        self.strs.get(var).or_else(|| self.nums.get(var)).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    /// Longest output-to-input path; every gate counts one level.
    pub depth: u64,
    /// Gate count.
    pub size: u64,
    /// Total fanin over all gates.
    pub wires: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("expected a {expected} formula, found {got}")]
    WrongClass {
        expected: &'static str,
        got: FormulaClass,
    },
    #[error("variable {0:?} has no layout entry")]
    MissingVar(String),
    #[error("cannot compile: {0}")]
    Unsupported(String),
    #[error("term {term} can reach {bound}, too wide to unroll into gates")]
    BoundTooWide { term: String, bound: u64 },
    #[error("circuit has no outputs")]
    NoOutputs,
    #[error("gate {parent} lists child {child} at or past itself")]
    NotTopological { parent: usize, child: usize },
    #[error("gate {gate}: threshold {k} exceeds fanin {fanin} plus one")]
    ThresholdCount { gate: usize, k: u64, fanin: usize },
    #[error("output lists gate {0}, past the end of the gate list")]
    BadOutput(usize),
    #[error("gate reads {var}[{bit}], outside the declared width {width}")]
    InputWidth { var: String, bit: u64, width: u64 },
    #[error("input {name:?} carries {got}, over its declared width {width}")]
    ValueWidth { name: String, got: u64, width: u64 },
    #[error("assignment is missing input {0:?}")]
    MissingInput(String),
}

/// Immutable gate DAG with declared inputs and measured metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    outputs: Vec<usize>,
    layout: InputLayout,
    metrics: Metrics,
}

impl Circuit {
    /// Validates the topological order, threshold counts, output references,
    /// and input widths, then measures the result. Every construction and
    /// every import funnels through here.
    pub fn new(
        gates: Vec<Gate>,
        outputs: Vec<usize>,
        layout: InputLayout,
    ) -> Result<Circuit, CircuitError> {
        if outputs.is_empty() {
            return Err(CircuitError::NoOutputs);
        }
        for (i, g) in gates.iter().enumerate() {
            for &c in g.children() {
                if c >= i {
                    return Err(CircuitError::NotTopological { parent: i, child: c });
                }
            }
            match g {
                Gate::Threshold(k, cs) => {
                    if *k > cs.len() as u64 + 1 {
                        return Err(CircuitError::ThresholdCount {
                            gate: i,
                            k: *k,
                            fanin: cs.len(),
                        });
                    }
                }
                Gate::Input { var, bit } => match layout.width_of(var) {
                    None => return Err(CircuitError::MissingVar(var.clone())),
                    Some(w) if *bit >= w => {
                        return Err(CircuitError::InputWidth {
                            var: var.clone(),
                            bit: *bit,
                            width: w,
                        })
                    }
                    Some(_) => {}
                },
                _ => {}
            }
        }
        for &o in &outputs {
            if o >= gates.len() {
                return Err(CircuitError::BadOutput(o));
            }
        }
        let metrics = measure(&gates, &outputs);
        Ok(Circuit {
            gates,
            outputs,
            layout,
            metrics,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn layout(&self) -> &InputLayout {
        &self.layout
    }

    pub fn metrics(&self) -> Metrics {
        self.metrics
    }

    /// Topological gate-by-gate evaluation; returns the output bits in
    /// declared order.
    pub fn eval(&self, inputs: &Assignment) -> Result<Vec<bool>, CircuitError> {
        for (name, &w) in &self.layout.strs {
            let v = inputs
                .strs
                .get(name)
                .ok_or_else(|| CircuitError::MissingInput(name.clone()))?;
            if v.len() > w {
                return Err(CircuitError::ValueWidth {
                    name: name.clone(),
                    got: v.len(),
                    width: w,
                });
            }
        }
        for (name, &w) in &self.layout.nums {
            let &v = inputs
                .nums
                .get(name)
                .ok_or_else(|| CircuitError::MissingInput(name.clone()))?;
            if v > w {
                return Err(CircuitError::ValueWidth {
                    name: name.clone(),
                    got: v,
                    width: w,
                });
            }
        }
        let mut val = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            val[i] = match g {
                Gate::Input { var, bit } => {
                    if self.layout.strs.contains_key(var) {
                        inputs.strs[var].contains(*bit)
                    } else {
                        *bit < inputs.nums[var]
                    }
                }
                Gate::ConstTrue => true,
                Gate::ConstFalse => false,
                Gate::Not(c) => !val[*c],
                Gate::And(cs) => cs.iter().all(|&c| val[c]),
                Gate::Or(cs) => cs.iter().any(|&c| val[c]),
                Gate::Threshold(k, cs) => {
                    cs.iter().filter(|&&c| val[c]).count() as u64 >= *k
                }
            };
        }
        Ok(self.outputs.iter().map(|&o| val[o]).collect())
    }
}

fn measure(gates: &[Gate], outputs: &[usize]) -> Metrics {
    let mut depth = vec![0u64; gates.len()];
    let mut wires = 0u64;
    for (i, g) in gates.iter().enumerate() {
        let cs = g.children();
        wires += cs.len() as u64;
        depth[i] = cs.iter().map(|&c| depth[c] + 1).max().unwrap_or(0);
    }
    Metrics {
        depth: outputs.iter().map(|&o| depth[o]).max().unwrap_or(0),
        size: gates.len() as u64,
        wires,
    }
}

/// Incremental circuit constructor.
///
/// `folding` mode dedups structurally equal gates and simplifies around
/// constants: `and`/`or` drop neutral children, collapse on an absorbing
/// constant, and return the child itself at fanin one; `threshold` absorbs
/// constant children into the count. Empty `and` is true, empty `or` false,
/// threshold zero true.
///
/// `raw` mode emits every requested gate verbatim, so the shape of the
/// result is a function of the requested schema alone, never of which
/// children happen to be constant.
pub struct Builder {
    layout: InputLayout,
    gates: Vec<Gate>,
    dedup: Option<HashMap<Gate, usize>>,
    cached_true: Option<usize>,
    cached_false: Option<usize>,
}

impl Builder {
    pub fn folding(layout: InputLayout) -> Self {
        Builder {
            layout,
            gates: Vec::new(),
            dedup: Some(HashMap::new()),
            cached_true: None,
            cached_false: None,
        }
    }

    pub fn raw(layout: InputLayout) -> Self {
        Builder {
            layout,
            gates: Vec::new(),
            dedup: None,
            cached_true: None,
            cached_false: None,
        }
    }

    pub fn layout(&self) -> &InputLayout {
        &self.layout
    }

    fn push(&mut self, g: Gate) -> usize {
        if let Some(map) = &mut self.dedup {
            if let Some(&i) = map.get(&g) {
                return i;
            }
            let i = self.gates.len();
            map.insert(g.clone(), i);
            self.gates.push(g);
            i
        } else {
            self.gates.push(g);
            self.gates.len() - 1
        }
    }

    pub fn lit_true(&mut self) -> usize {
        if let Some(i) = self.cached_true {
            return i;
        }
        let i = self.push(Gate::ConstTrue);
        self.cached_true = Some(i);
        i
    }

    pub fn lit_false(&mut self) -> usize {
        if let Some(i) = self.cached_false {
            return i;
        }
        let i = self.push(Gate::ConstFalse);
        self.cached_false = Some(i);
        i
    }

    fn is_true(&self, g: usize) -> bool {
        matches!(self.gates[g], Gate::ConstTrue)
    }

    fn is_false(&self, g: usize) -> bool {
        matches!(self.gates[g], Gate::ConstFalse)
    }

    /// Bit `bit` of input `var`; bits at or past the declared width are
    /// identically false. The variable must be in the layout.
    pub fn input(&mut self, var: &str, bit: u64) -> usize {
        let w = self
            .layout
            .width_of(var)
            .expect("compilation checks the layout before building gates");
        if bit >= w {
            self.lit_false()
        } else {
            self.push(Gate::Input {
                var: var.to_string(),
                bit,
            })
        }
    }

    pub fn not(&mut self, g: usize) -> usize {
        if self.dedup.is_some() {
            if self.is_true(g) {
                return self.lit_false();
            }
            if self.is_false(g) {
                return self.lit_true();
            }
            if let Gate::Not(h) = self.gates[g] {
                return h;
            }
        }
        self.push(Gate::Not(g))
    }

    pub fn and(&mut self, children: Vec<usize>) -> usize {
        if self.dedup.is_none() {
            return self.push(Gate::And(children));
        }
        let mut cs = Vec::with_capacity(children.len());
        for c in children {
            if self.is_false(c) {
                return self.lit_false();
            }
            if !self.is_true(c) {
                cs.push(c);
            }
        }
        cs.sort_unstable();
        cs.dedup();
        match cs.len() {
            0 => self.lit_true(),
            1 => cs[0],
            _ => self.push(Gate::And(cs)),
        }
    }

    pub fn or(&mut self, children: Vec<usize>) -> usize {
        if self.dedup.is_none() {
            return self.push(Gate::Or(children));
        }
        let mut cs = Vec::with_capacity(children.len());
        for c in children {
            if self.is_true(c) {
                return self.lit_true();
            }
            if !self.is_false(c) {
                cs.push(c);
            }
        }
        cs.sort_unstable();
        cs.dedup();
        match cs.len() {
            0 => self.lit_false(),
            1 => cs[0],
            _ => self.push(Gate::Or(cs)),
        }
    }

    pub fn threshold(&mut self, k: u64, children: Vec<usize>) -> usize {
        if self.dedup.is_none() {
            debug_assert!(k <= children.len() as u64 + 1);
            return self.push(Gate::Threshold(k, children));
        }
        let mut k = k;
        let mut cs = Vec::with_capacity(children.len());
        for c in children {
            if self.is_true(c) {
                k = k.saturating_sub(1);
            } else if !self.is_false(c) {
                cs.push(c);
            }
        }
        if k == 0 {
            return self.lit_true();
        }
        if k > cs.len() as u64 {
            return self.lit_false();
        }
        // Thresholds count multiplicity, so children are sorted for the
        // dedup map but never deduplicated.
        cs.sort_unstable();
        self.push(Gate::Threshold(k, cs))
    }

    /// Drops gates unreachable from the outputs and seals the circuit.
    pub fn finish(self, outputs: Vec<usize>) -> Result<Circuit, CircuitError> {
        if outputs.is_empty() {
            return Err(CircuitError::NoOutputs);
        }
        for &o in &outputs {
            if o >= self.gates.len() {
                return Err(CircuitError::BadOutput(o));
            }
        }
        let mut live = vec![false; self.gates.len()];
        let mut stack = outputs.clone();
        while let Some(g) = stack.pop() {
            if live[g] {
                continue;
            }
            live[g] = true;
            stack.extend_from_slice(self.gates[g].children());
        }
        let mut remap = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.into_iter().enumerate() {
            if live[i] {
                remap[i] = gates.len();
                gates.push(g.map_children(|c| remap[c]));
            }
        }
        Circuit::new(
            gates,
            outputs.into_iter().map(|o| remap[o]).collect(),
            self.layout,
        )
    }
}

/// Rewrites every threshold gate into strict-majority form, k = floor(f/2)+1,
/// by padding its fanin with constants; other gates are copied unchanged.
/// Gate-for-gate equivalent to the original.
pub fn lower_to_majority(c: &Circuit) -> Circuit {
    let mut b = Builder::raw(c.layout().clone());
    let mut map = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let ng = match g {
            Gate::Threshold(k, cs) => {
                let f0 = cs.len() as u64;
                if *k == 0 {
                    b.lit_true()
                } else if *k > f0 {
                    b.lit_false()
                } else {
                    let (t, z) = maj_pads(*k, f0);
                    let mut padded: Vec<usize> = cs.iter().map(|&c| map[c]).collect();
                    for _ in 0..t {
                        let g = b.lit_true();
                        padded.push(g);
                    }
                    for _ in 0..z {
                        let g = b.lit_false();
                        padded.push(g);
                    }
                    let f = padded.len() as u64;
                    b.threshold(f / 2 + 1, padded)
                }
            }
            other => {
                let remapped = other.clone().map_children(|c| map[c]);
                b.push(remapped)
            }
        };
        map.push(ng);
    }
    let outs = c.outputs().iter().map(|&o| map[o]).collect();
    b.finish(outs)
        .expect("padding preserves a valid topological order")
}

/// True-pad and false-pad counts turning "at least k of f0" into a strict
/// majority over the padded fanin.
fn maj_pads(k: u64, f0: u64) -> (u64, u64) {
    let candidates = [
        (Some(0), (2 * k).checked_sub(f0 + 2)),
        (Some(0), (2 * k).checked_sub(f0 + 1)),
        ((f0 + 2).checked_sub(2 * k), Some(0)),
        ((f0 + 1).checked_sub(2 * k), Some(0)),
    ];
    for (t, z) in candidates {
        let (Some(t), Some(z)) = (t, z) else { continue };
        if (f0 + t + z) / 2 + 1 == k + t {
            return (t, z);
        }
    }
    unreachable!("a pad pair exists for every 1 <= k <= f0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BitSet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn asg_x(bits: &[u64]) -> Assignment {
        let mut s = BitSet::new();
        for &b in bits {
            s.insert(b);
        }
        Assignment::new().with_str("X", s)
    }

    #[test]
    fn const_true_circuit() {
        let c = Circuit::new(vec![Gate::ConstTrue], vec![0], InputLayout::new()).unwrap();
        assert_eq!(c.eval(&Assignment::new()).unwrap(), vec![true]);
        assert_eq!(c.metrics().depth, 0);
        assert_eq!(c.metrics().size, 1);
        assert_eq!(c.metrics().wires, 0);
    }

    #[test]
    fn or_of_four_inputs_measures() {
        let layout = InputLayout::new().with_str("X", 4);
        let mut b = Builder::folding(layout);
        let lits: Vec<usize> = (0..4).map(|i| b.input("X", i)).collect();
        let o = b.or(lits);
        let c = b.finish(vec![o]).unwrap();
        assert_eq!(c.metrics().depth, 1);
        assert_eq!(c.metrics().size, 5);
        assert_eq!(c.metrics().wires, 4);
        assert_eq!(c.eval(&asg_x(&[])).unwrap(), vec![false]);
        assert_eq!(c.eval(&asg_x(&[3])).unwrap(), vec![true]);
    }

    #[test]
    fn folding_conventions() {
        let mut b = Builder::folding(InputLayout::new().with_str("X", 2));
        let e_and = b.and(vec![]);
        assert!(b.is_true(e_and));
        let e_or = b.or(vec![]);
        assert!(b.is_false(e_or));
        let th0 = b.threshold(0, vec![]);
        assert!(b.is_true(th0));
        let x0 = b.input("X", 0);
        let dup = b.and(vec![x0, x0]);
        assert_eq!(dup, x0);
        let x0b = b.input("X", 0);
        assert_eq!(x0b, x0);
        let t = b.lit_true();
        let keep = b.and(vec![x0, t]);
        assert_eq!(keep, x0);
        let f = b.lit_false();
        let kill = b.and(vec![x0, f]);
        assert!(b.is_false(kill));
        let over = b.input("X", 7);
        assert!(b.is_false(over));
    }

    #[test]
    fn threshold_const_absorption() {
        let mut b = Builder::folding(InputLayout::new().with_str("X", 3));
        let t = b.lit_true();
        let x0 = b.input("X", 0);
        let x1 = b.input("X", 1);
        let g = b.threshold(2, vec![t, x0, x1]);
        match &b.gates[g] {
            Gate::Threshold(k, cs) => {
                assert_eq!(*k, 1);
                assert_eq!(cs.len(), 2);
            }
            other => panic!("expected a threshold, got {:?}", other),
        }
        let g2 = b.threshold(3, vec![x0, x1]);
        assert!(b.is_false(g2));
    }

    #[test]
    fn threshold_matches_or_and_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let layout = InputLayout::new().with_str("X", 6);
        let mut b = Builder::raw(layout);
        let lits: Vec<usize> = (0..6).map(|i| b.input("X", i)).collect();
        let th1 = b.threshold(1, lits.clone());
        let thn = b.threshold(6, lits.clone());
        let or_g = b.or(lits.clone());
        let and_g = b.and(lits);
        let c = b.finish(vec![th1, thn, or_g, and_g]).unwrap();
        for _ in 0..200 {
            let mut s = BitSet::new();
            for i in 0..6 {
                if rng.gen_bool(0.5) {
                    s.insert(i);
                }
            }
            let v = c.eval(&Assignment::new().with_str("X", s)).unwrap();
            assert_eq!(v[0], v[2], "threshold 1 must act as or");
            assert_eq!(v[1], v[3], "threshold fanin must act as and");
        }
    }

    #[test]
    fn construction_rejections() {
        let r = Circuit::new(vec![Gate::Not(0)], vec![0], InputLayout::new());
        assert_eq!(
            r.unwrap_err(),
            CircuitError::NotTopological { parent: 0, child: 0 }
        );
        let r = Circuit::new(vec![Gate::ConstTrue], vec![], InputLayout::new());
        assert_eq!(r.unwrap_err(), CircuitError::NoOutputs);
        let r = Circuit::new(vec![Gate::ConstTrue], vec![1], InputLayout::new());
        assert_eq!(r.unwrap_err(), CircuitError::BadOutput(1));
        let r = Circuit::new(
            vec![Gate::ConstTrue, Gate::Threshold(3, vec![0])],
            vec![1],
            InputLayout::new(),
        );
        assert_eq!(
            r.unwrap_err(),
            CircuitError::ThresholdCount { gate: 1, k: 3, fanin: 1 }
        );
        let r = Circuit::new(
            vec![Gate::Input { var: "X".into(), bit: 5 }],
            vec![0],
            InputLayout::new().with_str("X", 3),
        );
        assert_eq!(
            r.unwrap_err(),
            CircuitError::InputWidth { var: "X".into(), bit: 5, width: 3 }
        );
        let r = Circuit::new(
            vec![Gate::Input { var: "X".into(), bit: 0 }],
            vec![0],
            InputLayout::new(),
        );
        assert_eq!(r.unwrap_err(), CircuitError::MissingVar("X".into()));
    }

    #[test]
    fn finish_drops_unreachable_gates() {
        let layout = InputLayout::new().with_str("X", 2);
        let mut b = Builder::folding(layout);
        let x0 = b.input("X", 0);
        let x1 = b.input("X", 1);
        let _dangling = b.push(Gate::And(vec![x0, x1]));
        let keep = b.not(x0);
        let c = b.finish(vec![keep]).unwrap();
        assert_eq!(c.metrics().size, 2);
        assert_eq!(c.eval(&asg_x(&[0])).unwrap(), vec![false]);
        assert_eq!(c.eval(&asg_x(&[1])).unwrap(), vec![true]);
    }

    #[test]
    fn eval_validates_assignment() {
        let layout = InputLayout::new().with_str("X", 2).with_num("n", 3);
        let mut b = Builder::folding(layout);
        let x = b.input("X", 1);
        let n = b.input("n", 1);
        let g = b.and(vec![x, n]);
        let c = b.finish(vec![g]).unwrap();
        let missing = c.eval(&asg_x(&[1]));
        assert_eq!(missing.unwrap_err(), CircuitError::MissingInput("n".into()));
        let mut wide = BitSet::new();
        wide.insert(5);
        let r = c.eval(&Assignment::new().with_str("X", wide).with_num("n", 0));
        assert_eq!(
            r.unwrap_err(),
            CircuitError::ValueWidth { name: "X".into(), got: 6, width: 2 }
        );
        let r = c.eval(&asg_x(&[1]).with_num("n", 9));
        assert_eq!(
            r.unwrap_err(),
            CircuitError::ValueWidth { name: "n".into(), got: 9, width: 3 }
        );
        // n = 2 sets unary bits 0 and 1, so bit 1 reads true.
        let v = c.eval(&asg_x(&[1]).with_num("n", 2)).unwrap();
        assert_eq!(v, vec![true]);
        let v = c.eval(&asg_x(&[1]).with_num("n", 1)).unwrap();
        assert_eq!(v, vec![false]);
    }

    #[test]
    fn majority_lowering_is_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..40 {
            let w = 1 + round % 7;
            let layout = InputLayout::new().with_str("X", w);
            let mut b = Builder::raw(layout);
            let lits: Vec<usize> = (0..w).map(|i| b.input("X", i)).collect();
            let k = rng.gen_range(1..=w);
            let th = b.threshold(k, lits.clone());
            let nth = b.not(th);
            let k2 = rng.gen_range(0..=w + 1);
            let th2 = b.threshold(k2, lits);
            let o = b.or(vec![nth, th2]);
            let c = b.finish(vec![th, o]).unwrap();
            let m = lower_to_majority(&c);
            for g in m.gates() {
                if let Gate::Threshold(k, cs) = g {
                    assert_eq!(*k, cs.len() as u64 / 2 + 1, "strict majority form");
                }
            }
            for _ in 0..64 {
                let mut s = BitSet::new();
                for i in 0..w {
                    if rng.gen_bool(0.5) {
                        s.insert(i);
                    }
                }
                let a = Assignment::new().with_str("X", s);
                assert_eq!(c.eval(&a).unwrap(), m.eval(&a).unwrap());
            }
        }
    }

    #[test]
    fn maj_pads_solve_every_case() {
        for f0 in 1..=40u64 {
            for k in 1..=f0 {
                let (t, z) = maj_pads(k, f0);
                assert_eq!((f0 + t + z) / 2 + 1, k + t, "k={} f0={}", k, f0);
            }
        }
    }
}

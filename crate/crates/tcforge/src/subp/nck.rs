use serde::{Deserialize, Serialize};

use crate::kernel::{get_cell, BitSet, Table2D};

use super::SubpError;

/// Layered circuit over gates 0..=a per layer. Gate z on layer d+1 reads
/// gates x and y of layer d; the flag picks an and-gate over an or-gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredCircuit {
    pub a: u64,
    pub k: u32,
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub gates: Vec<GateSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub z: u64,
    pub x: u64,
    pub y: u64,
    pub and: bool,
}

/// Gate combination rule: and-gates conjoin their inputs, or-gates disjoin
/// them, selected by the first argument.
pub fn select(p: bool, q: bool, r: bool) -> bool {
    (p && (q && r)) || (!p && (q || r))
}

/// Layer count carried by a width bound and an exponent: the k-th power of
/// the base-2 logarithm, rounded up; width bounds 0 and 1 carry no layers.
pub fn expected_layers(a: u64, k: u32) -> u64 {
    if a <= 1 {
        return 0;
    }
    (a as f64).log2().powi(k as i32).ceil() as u64
}

impl LayeredCircuit {
    /// Well-wiring check: the layer count matches the width bound and
    /// exponent, and every layer lists each gate position exactly once
    /// with in-range inputs.
    pub fn validate(&self) -> Result<(), SubpError> {
        let expected = expected_layers(self.a, self.k);
        if self.layers.len() as u64 != expected {
            return Err(SubpError::LayerCount {
                a: self.a,
                k: self.k,
                expected,
                found: self.layers.len() as u64,
            });
        }
        for (d, layer) in self.layers.iter().enumerate() {
            let mut seen = vec![false; (self.a + 1) as usize];
            for g in &layer.gates {
                if g.z > self.a || g.x > self.a || g.y > self.a {
                    return Err(SubpError::IllWired {
                        layer: d,
                        detail: format!("gate ({},{},{}) is out of range", g.z, g.x, g.y),
                    });
                }
                if seen[g.z as usize] {
                    return Err(SubpError::IllWired {
                        layer: d,
                        detail: format!("gate {} is wired twice", g.z),
                    });
                }
                seen[g.z as usize] = true;
            }
            if let Some(z) = seen.iter().position(|&s| !s) {
                return Err(SubpError::IllWired {
                    layer: d,
                    detail: format!("gate {} is not wired", z),
                });
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("circuit serializes");
        s.push('\n');
        s
    }
}

/// Evaluates the circuit on the input bits, insisting on well-wiring.
/// Row d of the result is the value vector of layer d.
pub fn nck_eval(c: &LayeredCircuit, x: &BitSet) -> Result<Table2D, SubpError> {
    c.validate()?;
    Ok(eval_rows(c, x))
}

/// The permissive variant: an ill-wired circuit is evaluated as listed
/// (later duplicate entries win, unwired gates stay false) instead of
/// being rejected, mirroring a hypothesis that holds vacuously.
pub fn nck_eval_permissive(c: &LayeredCircuit, x: &BitSet) -> Table2D {
    eval_rows(c, x)
}

fn eval_rows(c: &LayeredCircuit, x: &BitSet) -> Table2D {
    let mut rows = Vec::with_capacity(c.layers.len() + 1);
    let mut cur = BitSet::new();
    for z in 0..=c.a {
        if x.contains(z) {
            cur.insert(z);
        }
    }
    rows.push(cur.clone());
    for layer in &c.layers {
        let mut next = BitSet::new();
        for g in &layer.gates {
            if g.z > c.a {
                continue;
            }
            let v = select(g.and, cur.contains(g.x), cur.contains(g.y));
            if v {
                next.insert(g.z);
            } else {
                next.remove(g.z);
            }
        }
        rows.push(next.clone());
        cur = next;
    }
    crate::kernel::table_from_rows(&rows)
}

/// Layer-d value of one gate, read from an evaluation table.
pub fn gate_value(table: &Table2D, d: u64, z: u64) -> bool {
    get_cell(table, d, z)
}

use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, CircuitError, Gate, InputLayout, Metrics};

/// On-disk circuit document. Gates are listed in topological order with
/// explicit ids so diffs stay readable; metrics are stored and re-derived
/// on import.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    inputs: Vec<InputDoc>,
    gates: Vec<GateDoc>,
    outputs: Vec<u64>,
    metrics: MetricsDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDoc {
    name: String,
    width: u64,
    /// "string" for bit-set inputs, "unary" for number inputs.
    kind: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    id: u64,
    /// One of IN, T, F, NOT, AND, OR, TH.
    op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    args: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bit: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricsDoc {
    depth: u64,
    size: u64,
    wires: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("gate at position {expected} has id {found}; ids must equal positions")]
    IdOrder { expected: u64, found: u64 },
    #[error("input {name:?}: {problem}")]
    BadInput { name: String, problem: String },
    #[error("gate {id} ({op}): {problem}")]
    BadGate { id: u64, op: String, problem: String },
    #[error("stored metrics {stored:?} disagree with recomputed {actual:?}")]
    MetricsMismatch { stored: Metrics, actual: Metrics },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Serialize a circuit as pretty-printed JSON.
pub fn export_json(c: &Circuit) -> String {
    let inputs = c
        .layout()
        .strs
        .iter()
        .map(|(name, &width)| InputDoc {
            name: name.clone(),
            width,
            kind: "string".into(),
        })
        .chain(c.layout().nums.iter().map(|(name, &width)| InputDoc {
            name: name.clone(),
            width,
            kind: "unary".into(),
        }))
        .collect();
    let gates = c
        .gates()
        .iter()
        .enumerate()
        .map(|(id, g)| gate_doc(id as u64, g))
        .collect();
    let m = c.metrics();
    let doc = CircuitDoc {
        inputs,
        gates,
        outputs: c.outputs().iter().map(|&o| o as u64).collect(),
        metrics: MetricsDoc {
            depth: m.depth,
            size: m.size,
            wires: m.wires,
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

fn gate_doc(id: u64, g: &Gate) -> GateDoc {
    let mut d = GateDoc {
        id,
        op: String::new(),
        k: None,
        args: None,
        var: None,
        bit: None,
    };
    let ids = |cs: &[usize]| Some(cs.iter().map(|&c| c as u64).collect());
    match g {
        Gate::Input { var, bit } => {
            d.op = "IN".into();
            d.var = Some(var.clone());
            d.bit = Some(*bit);
        }
        Gate::ConstTrue => d.op = "T".into(),
        Gate::ConstFalse => d.op = "F".into(),
        Gate::Not(c) => {
            d.op = "NOT".into();
            d.args = ids(std::slice::from_ref(c));
        }
        Gate::And(cs) => {
            d.op = "AND".into();
            d.args = ids(cs);
        }
        Gate::Or(cs) => {
            d.op = "OR".into();
            d.args = ids(cs);
        }
        Gate::Threshold(k, cs) => {
            d.op = "TH".into();
            d.k = Some(*k);
            d.args = ids(cs);
        }
    }
    d
}

/// Parse a document produced by `export_json`, revalidating everything:
/// ids must equal positions, each op carries exactly its own fields, the
/// wiring must pass circuit construction, and the stored metrics must
/// match the recomputed ones.
pub fn import_json(text: &str) -> Result<Circuit, ImportError> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    let mut layout = InputLayout::new();
    for inp in &doc.inputs {
        let dup = layout.strs.contains_key(&inp.name) || layout.nums.contains_key(&inp.name);
        if dup {
            return Err(ImportError::BadInput {
                name: inp.name.clone(),
                problem: "declared twice".into(),
            });
        }
        match inp.kind.as_str() {
            "string" => layout.strs.insert(inp.name.clone(), inp.width),
            "unary" => layout.nums.insert(inp.name.clone(), inp.width),
            other => {
                return Err(ImportError::BadInput {
                    name: inp.name.clone(),
                    problem: format!("unknown kind {:?}", other),
                })
            }
        };
    }
    let mut gates = Vec::with_capacity(doc.gates.len());
    for (pos, gd) in doc.gates.iter().enumerate() {
        if gd.id != pos as u64 {
            return Err(ImportError::IdOrder {
                expected: pos as u64,
                found: gd.id,
            });
        }
        gates.push(parse_gate(gd)?);
    }
    let outputs = doc.outputs.iter().map(|&o| o as usize).collect();
    let c = Circuit::new(gates, outputs, layout)?;
    let actual = c.metrics();
    let stored = Metrics {
        depth: doc.metrics.depth,
        size: doc.metrics.size,
        wires: doc.metrics.wires,
    };
    if stored != actual {
        return Err(ImportError::MetricsMismatch { stored, actual });
    }
    Ok(c)
}

fn parse_gate(gd: &GateDoc) -> Result<Gate, ImportError> {
    let bad = |problem: &str| ImportError::BadGate {
        id: gd.id,
        op: gd.op.clone(),
        problem: problem.into(),
    };
    let no_k = || if gd.k.is_some() { Err(bad("unexpected field k")) } else { Ok(()) };
    let no_args = || if gd.args.is_some() { Err(bad("unexpected field args")) } else { Ok(()) };
    let no_input_fields = || {
        if gd.var.is_some() || gd.bit.is_some() {
            Err(bad("unexpected field var or bit"))
        } else {
            Ok(())
        }
    };
    let args = || -> Result<Vec<usize>, ImportError> {
        let a = gd.args.as_ref().ok_or_else(|| bad("missing field args"))?;
        Ok(a.iter().map(|&c| c as usize).collect())
    };
    match gd.op.as_str() {
        "IN" => {
            no_k()?;
            no_args()?;
            let var = gd.var.clone().ok_or_else(|| bad("missing field var"))?;
            let bit = gd.bit.ok_or_else(|| bad("missing field bit"))?;
            Ok(Gate::Input { var, bit })
        }
        "T" | "F" => {
            no_k()?;
            no_args()?;
            no_input_fields()?;
            Ok(if gd.op == "T" {
                Gate::ConstTrue
            } else {
                Gate::ConstFalse
            })
        }
        "NOT" => {
            no_k()?;
            no_input_fields()?;
            let a = args()?;
            if a.len() != 1 {
                return Err(bad("NOT takes exactly one argument"));
            }
            Ok(Gate::Not(a[0]))
        }
        "AND" => {
            no_k()?;
            no_input_fields()?;
            Ok(Gate::And(args()?))
        }
        "OR" => {
            no_k()?;
            no_input_fields()?;
            Ok(Gate::Or(args()?))
        }
        "TH" => {
            no_input_fields()?;
            let k = gd.k.ok_or_else(|| bad("missing field k"))?;
            Ok(Gate::Threshold(k, args()?))
        }
        _ => Err(bad("unknown op")),
    }
}

/// Render the circuit in DOT, one node per gate plus a marker node per
/// output, edges running from child to parent.
pub fn export_dot(c: &Circuit) -> String {
    use std::fmt::Write;
    let mut s = String::from("digraph circuit {\n  rankdir=LR;\n");
    for (i, g) in c.gates().iter().enumerate() {
        let label = match g {
            Gate::Input { var, bit } => format!("IN {}[{}]", var, bit),
            Gate::ConstTrue => "T".into(),
            Gate::ConstFalse => "F".into(),
            Gate::Not(_) => "NOT".into(),
            Gate::And(_) => "AND".into(),
            Gate::Or(_) => "OR".into(),
            Gate::Threshold(k, _) => format!("TH[{}]", k),
        };
        writeln!(s, "  g{} [label=\"{}\"];", i, label).unwrap();
    }
    for (i, g) in c.gates().iter().enumerate() {
        for &child in g.children() {
            writeln!(s, "  g{} -> g{};", child, i).unwrap();
        }
    }
    for (j, &o) in c.outputs().iter().enumerate() {
        writeln!(s, "  o{} [label=\"out {}\" shape=doubleoctagon];", j, j).unwrap();
        writeln!(s, "  g{} -> o{};", o, j).unwrap();
    }
    s.push_str("}\n");
    s
}

//! Formula-driven constructions over tables: reachability by layered
//! saturation, layered boolean circuit evaluation, and bounded string
//! recursion, each paired with a checker for its defining formula.

use crate::logic::EvalError;

pub mod gap;
pub mod nck;
pub mod rec;

pub use gap::{gap_array, gap_reach, parse_digraph, ParseGraphError};
pub use nck::{
    expected_layers, gate_value, nck_eval, nck_eval_permissive, select, GateSpec, Layer,
    LayeredCircuit,
};
pub use rec::{
    bound_at, check_phi_f, init_row, next_row, rec_eval, rec_eval_multi, rec_trace, RecursionSpec,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SubpError {
    #[error("vertex {target} is out of range for {count} vertices")]
    BadVertex { target: u64, count: u64 },
    #[error("layer {layer} is ill-wired: {detail}")]
    IllWired { layer: usize, detail: String },
    #[error("a width-{a} circuit with depth exponent {k} needs {expected} layers, found {found}")]
    LayerCount {
        a: u64,
        k: u32,
        expected: u64,
        found: u64,
    },
    #[error("stage bound {0} is over the evaluation cap")]
    BoundTooWide(u64),
    #[error("the stage bound shrinks somewhere on the sample grid")]
    NotMonotone,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

//! Constant-depth threshold circuits: a gate-list representation with
//! validation and metrics, compilers from formulas and registered function
//! definitions, a fixed-schema multiplier, and JSON/DOT serialization.

pub mod circuit;
pub mod compile;
pub mod io;
pub mod mul;

pub use circuit::{lower_to_majority, Builder, Circuit, CircuitError, Gate, InputLayout, Metrics};
pub use compile::{compile_fn_bits, compile_sigma0, compile_tc0};
pub use io::{export_dot, export_json, import_json, ImportError};
pub use mul::compile_mul;

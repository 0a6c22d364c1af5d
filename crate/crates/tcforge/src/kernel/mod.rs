//! Naturals, finite sets of naturals, pairing, and the base counting
//! functions everything else is built from.

pub mod bitset;
pub mod funcs;
pub mod pairing;
pub mod rng;
pub mod table;

pub use bitset::{format_binary, BitSet, ParseSetError};
pub use funcs::{comprehend, fse, min_witness, numones, pd};
pub use pairing::{checked_pair, pair, unpair, NotAPairCode};
pub use rng::{random_bitset, random_bitset_varlen, seeded_rng};
pub use table::{
    format_table, get_cell, parse_table, row, row_count_below, row_len, set_cell,
    table_from_rows, table_rows, Table2D,
};

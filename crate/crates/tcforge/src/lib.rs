//! Workbench for two-sorted bounded arithmetic over the standard model.
//!
//! Number-sort objects are natural numbers; string-sort objects are finite
//! sets of naturals, viewed as bit strings where `X(i)` means `i ∈ X` and
//! `|X|` is one plus the largest element (0 for the empty set).
//!
//! The crate is organized in layers:
//!
//! * [`kernel`] — bit sets, the pairing function, two-dimensional tables
//!   coded through pairing, and the small counting/selection functions
//!   (`numones`, `pd`, `fse`, minimal witnesses, comprehension).
//! * [`logic`] — terms and formulas of the two-sorted language with
//!   threshold (`Th[s] z<t`) and modular (`Mod[m] z<t`) quantifiers,
//!   a parser, evaluator, syntactic classifier, and the two transformations
//!   between threshold formulas and explicit counting.
//! * [`tc0alg`] — carry-lookahead addition, counting arrays, the block
//!   summation pipeline, multiplication of bit sets, and the pigeonhole
//!   witness search.
//! * [`circuits`] — constant-depth threshold circuits, compilers from
//!   formulas and from the multiplication pipeline, evaluation, and
//!   JSON/DOT export.
//! * [`rsuv`] — the single-sorted view: numbers as binary strings,
//!   the `L_ΔCR` operator set over bignums, counting via one
//!   multiplication, and the two translations between sorted and
//!   single-sorted formulas.
//! * [`subp`] — graph reachability, layered circuit evaluation, and
//!   bounded recursion, each driven by formula-style specifications.
//! * [`verify`] — named randomized/exhaustive test suites shared by the
//!   CLI and the acceptance tests.

pub mod circuits;
pub mod kernel;
pub mod logic;
pub mod rsuv;
pub mod subp;
pub mod tc0alg;
pub mod verify;

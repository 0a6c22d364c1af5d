//! Named property suites over the whole crate, shared by the CLI and the
//! integration tests. A suite's verdict is a pure function of its seed:
//! every random draw comes from one sequential generator.

mod genform;
mod oracle;
mod suites;

pub use genform::{
    random_counting_formula, random_flat_formula, random_threshold_formula, GEN_STR_VARS,
};
pub use oracle::oracle_eval;

use std::fmt;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::kernel::seeded_rng;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub trials: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(|p| p.failures == 0)
    }

    /// One line per property plus a verdict line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            let status = if p.failures == 0 { "ok" } else { "FAILED" };
            out.push_str(&format!(
                "{:<48} {:>8} trials  {}\n",
                p.property, p.trials, status
            ));
            if let Some(ce) = &p.counterexample {
                out.push_str(&format!("    counterexample: {}\n", ce));
            }
        }
        out.push_str(&format!(
            "suite {} (seed {}): {}\n",
            self.suite,
            self.seed,
            if self.ok() { "ok" } else { "FAILED" }
        ));
        out
    }
}

/// Collects property outcomes for one suite run. Suites stop a property
/// at its first failure and keep the rendered counterexample.
pub(crate) struct Runner {
    rng: ChaCha8Rng,
    report: SuiteReport,
    cap: u64,
}

impl Runner {
    fn new(suite: &str, seed: u64, cap: u64) -> Runner {
        Runner {
            rng: seeded_rng(seed),
            report: SuiteReport {
                suite: suite.to_string(),
                seed,
                properties: Vec::new(),
            },
            cap,
        }
    }

    pub(crate) fn check(
        &mut self,
        property: &str,
        trials: u64,
        mut f: impl FnMut(u64, &mut ChaCha8Rng) -> Result<(), String>,
    ) {
        let mut done = 0;
        let mut failures = 0;
        let mut counterexample = None;
        for t in 0..trials.min(self.cap) {
            done = t + 1;
            if let Err(ce) = f(t, &mut self.rng) {
                failures = 1;
                counterexample = Some(ce);
                break;
            }
        }
        self.report.properties.push(PropertyReport {
            property: property.to_string(),
            trials: done,
            failures,
            counterexample,
        });
    }
}

pub const SUITES: [&str; 18] = [
    "basic",
    "kernel",
    "mul-oracle",
    "mul-laws",
    "row-append",
    "perm-count",
    "block-bounds",
    "counting-arrays",
    "quantifiers",
    "transforms",
    "circuit-diff",
    "circuit-depth",
    "count-via-mul",
    "delta-ops",
    "php",
    "gap",
    "nck-rec",
    "rsuv-roundtrip",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSuite(pub String);

impl fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown suite {:?}; available: {}",
            self.0,
            SUITES.join(", ")
        )
    }
}

impl std::error::Error for UnknownSuite {}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport, UnknownSuite> {
    run_suite_capped(name, seed, u64::MAX)
}

/// Same suites with every property cut off after `cap` trials; the quick
/// smoke setting used by this crate's own tests.
pub fn run_suite_capped(name: &str, seed: u64, cap: u64) -> Result<SuiteReport, UnknownSuite> {
    let mut r = Runner::new(name, seed, cap);
    match name {
        "basic" => suites::basic(&mut r),
        "kernel" => suites::kernel(&mut r),
        "mul-oracle" => suites::mul_oracle(&mut r),
        "mul-laws" => suites::mul_laws(&mut r),
        "row-append" => suites::row_append(&mut r),
        "perm-count" => suites::perm_count(&mut r),
        "block-bounds" => suites::block_bounds(&mut r),
        "counting-arrays" => suites::counting_arrays(&mut r),
        "quantifiers" => suites::quantifiers(&mut r),
        "transforms" => suites::transforms(&mut r),
        "circuit-diff" => suites::circuit_diff(&mut r),
        "circuit-depth" => suites::circuit_depth(&mut r),
        "count-via-mul" => suites::count_via_mul_suite(&mut r),
        "delta-ops" => suites::delta_ops(&mut r),
        "php" => suites::php(&mut r),
        "gap" => suites::gap(&mut r),
        "nck-rec" => suites::nck_rec(&mut r),
        "rsuv-roundtrip" => suites::rsuv_roundtrip(&mut r),
        _ => return Err(UnknownSuite(name.to_string())),
    }
    Ok(r.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_suite_passes_a_quick_run() {
        for name in SUITES {
            let report = run_suite_capped(name, 1, 3).unwrap();
            assert!(report.ok(), "{} failed:\n{}", name, report.render());
        }
    }

    #[test]
    fn unknown_names_are_refused() {
        let err = run_suite("no-such-suite", 1).unwrap_err();
        assert!(err.to_string().contains("basic"));
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let a = run_suite("basic", 9).unwrap();
        let b = run_suite("basic", 9).unwrap();
        assert_eq!(a.render(), b.render());
        assert!(a.ok());
    }
}

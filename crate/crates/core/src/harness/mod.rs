//! Randomized verification of the entropic inequalities, a brute-force
//! oracle for the optimized quantities, the bound-comparison falsifier and
//! protocol soundness sweeps.
//!
//! Trial `i` of a run with seed `s` draws everything from the stream
//! `(s, i)`, so any reported failure replays from `(suite, seed, trial)`.

mod brute;
mod falsify;
mod protocols;
mod suites;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::OptConfig;
use crate::tensor::random::{trial_rng, TrialRng};
use crate::{Error, Result};

pub use brute::{brute_force_min_divergence, BruteTarget, MAX_BRUTE_DIM};
pub use falsify::{
    classical_conditional_entropy, comparison_sides, falsify_bound_comparison, Counterexample, Direction,
    FalsifyReport, COUNTEREXAMPLE_MARGIN,
};
pub use protocols::{check_protocol_bounds, random_instance, BOUND_TOL};
pub use suites::SUITES;

/// Tolerance for checks that involve an inner optimization.
pub const OPTIMIZER_TOL: f64 = 1e-6;

/// One inequality `lhs ≤ rhs` evaluated in a trial.
#[derive(Clone, Debug)]
pub(crate) struct Check {
    pub quantity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub optimized: bool,
}

impl Check {
    pub fn le(quantity: impl Into<String>, lhs: f64, rhs: f64, optimized: bool) -> Self {
        Self { quantity: quantity.into(), lhs, rhs, optimized }
    }

    /// `|a − b| ≤ 0`.
    pub fn eq(quantity: impl Into<String>, a: f64, b: f64, optimized: bool) -> Self {
        let diff = if a == b { 0.0 } else { (a - b).abs() };
        Self { quantity: quantity.into(), lhs: diff, rhs: 0.0, optimized }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub seed: u64,
    pub quantity: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative beyond the tolerance means violated. NaN for
    /// trials that failed to evaluate.
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub tol: f64,
    pub checks: usize,
    pub failures: Vec<Failure>,
    /// Largest `lhs − rhs` over all checks (negative when everything holds
    /// with room to spare).
    pub max_violation: f64,
    /// Wall-clock time; excluded from replay comparisons.
    pub runtime_seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub(crate) type TrialFn = fn(&mut TrialRng, &[usize], &OptConfig) -> Result<Vec<Check>>;

/// Optimizer settings for a single trial: starts run serially since trials
/// already run in parallel.
pub(crate) fn trial_config(seed: u64, trial: usize) -> OptConfig {
    OptConfig { seed: seed ^ (trial as u64).rotate_left(32), parallel: false, ..OptConfig::sweep() }
}

/// Runs `trials` independent trials of `f` and gathers every failing check.
pub(crate) fn run_trials(
    suite: &str,
    f: impl Fn(&mut TrialRng, &OptConfig) -> Result<Vec<Check>> + Sync,
    trials: usize,
    dims: &[usize],
    seed: u64,
    tol: f64,
) -> SuiteReport {
    let start = Instant::now();
    let results: Vec<Result<Vec<Check>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            f(&mut rng, &trial_config(seed, t))
        })
        .collect();
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut max_violation = f64::NEG_INFINITY;
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(cs) => {
                for c in cs {
                    checks += 1;
                    let t = if c.optimized { tol.max(OPTIMIZER_TOL) } else { tol };
                    let excess = c.lhs - c.rhs;
                    if excess > max_violation || excess.is_nan() {
                        max_violation = if excess.is_nan() { f64::INFINITY } else { excess };
                    }
                    if !(excess <= t) {
                        failures.push(Failure {
                            trial,
                            seed,
                            quantity: c.quantity,
                            lhs: c.lhs,
                            rhs: c.rhs,
                            slack: -excess,
                            error: None,
                        });
                    }
                }
            }
            Err(e) => failures.push(Failure {
                trial,
                seed,
                quantity: "evaluation".into(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                slack: f64::NAN,
                error: Some(e.to_string()),
            }),
        }
    }
    SuiteReport {
        suite: suite.to_string(),
        trials,
        seed,
        dims: dims.to_vec(),
        tol,
        checks,
        failures,
        max_violation,
        runtime_seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs one inequality suite. `dims` lists subsystem dimensions, reused
/// cyclically when a suite needs more factors than given.
pub fn run_inequality_suite(suite_id: &str, trials: usize, dims: &[usize], seed: u64, tol: f64) -> Result<SuiteReport> {
    let f = SUITES
        .iter()
        .find(|s| s.id == suite_id)
        .ok_or_else(|| Error::UnknownSuite(suite_id.to_string()))?
        .run;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::usage("suite dimensions must be positive"));
    }
    if !(tol >= 0.0) {
        return Err(Error::usage("tolerance must be nonnegative"));
    }
    let total: usize = (0..3).map(|i| dims[i % dims.len()]).product();
    if total > crate::protocol::DIMENSION_BUDGET {
        return Err(Error::Budget(format!("suite dimensions {dims:?} are too large")));
    }
    Ok(run_trials(suite_id, |rng, cfg| f(rng, dims, cfg), trials, dims, seed, tol))
}

/// Dimension `i`, cycling through `dims`.
pub(crate) fn dim(dims: &[usize], i: usize) -> usize {
    dims[i % dims.len()]
}

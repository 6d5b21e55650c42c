use std::time::Instant;

use anyhow::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classifier::{classify, Verdict};
use crate::weyl::GroupLimits;

use super::{
    coble_sanity, eighth_point_experiment, injectivity_experiment, lattice_classify, tr_test, verify_q_identity,
    vr_invariance_experiment, weyl_order, weyl_relations, weyl_relations_corrupted, weyl_roots, CobleSanitySpec,
    Report,
};

const SEED: u64 = 20240601;
const SMALL_PRIME: u64 = 10007;
const LARGE_PRIME: u64 = 1_000_000_007;

/// One acceptance criterion: a number, a short name, and a time limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub number: u8,
    pub name: &'static str,
    pub limit_ms: u64,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { number: 1, name: "Coxeter relations for r = 5..12", limit_ms: 1_000 },
    Criterion { number: 2, name: "finite Weyl group orders and root counts", limit_ms: 15 * 60_000 },
    Criterion { number: 3, name: "cubic form identity and anticanonical cubes", limit_ms: 1_000 },
    Criterion { number: 4, name: "constrained isometry classification for r = 8..12", limit_ms: 1_000 },
    Criterion { number: 5, name: "Coble action relations and composition", limit_ms: 30_000 },
    Criterion { number: 6, name: "Coble action injectivity on short words", limit_ms: 5 * 60_000 },
    Criterion { number: 7, name: "restriction map injectivity on a box", limit_ms: 10 * 60_000 },
    Criterion { number: 8, name: "eighth base point class", limit_ms: 5 * 60_000 },
    Criterion { number: 9, name: "invariance of base-curve configurations", limit_ms: 2 * 60_000 },
    Criterion { number: 10, name: "statements about all pseudoautomorphisms and flops", limit_ms: u64::MAX },
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Smaller trial counts and no rank-7 group enumeration.
    pub quick: bool,
    /// Damage a generator matrix in criterion 1 so the suite must fail.
    pub corrupt_generator: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub elapsed_ms: u64,
    pub limit_ms: u64,
    pub detail: Value,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2}: {} ({} ms) {}",
            self.criterion,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed_ms,
            self.name
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub quick: bool,
    pub results: Vec<CriterionResult>,
    pub passed: bool,
}

fn summarize(reports: &[Report]) -> (bool, Value) {
    let passed = reports.iter().all(|r| r.passed);
    let detail = reports
        .iter()
        .map(|r| {
            let mut s = r.summary.clone();
            s.insert("command".into(), json!(r.spec.command));
            s.insert("spec".into(), serde_json::to_value(&r.spec).expect("spec serializes"));
            s.insert("violations".into(), json!(r.violations.len()));
            s.insert("passed".into(), json!(r.passed));
            Value::Object(s)
        })
        .collect();
    (passed, Value::Array(detail))
}

fn relations(opts: RunOptions) -> Result<(bool, Value)> {
    let mut reports = Vec::new();
    for r in 5..=12 {
        reports.push(if opts.corrupt_generator { weyl_relations_corrupted(r)? } else { weyl_relations(r)? });
    }
    let control = weyl_relations_corrupted(8)?;
    let (passed, detail) = summarize(&reports);
    Ok((passed && !control.passed, json!({"runs": detail, "corrupted_control_rejected": !control.passed})))
}

fn finite_types(opts: RunOptions) -> Result<(bool, Value)> {
    let mut reports = vec![weyl_order(5, GroupLimits::default())?, weyl_order(6, GroupLimits::default())?];
    if !opts.quick {
        reports.push(weyl_order(7, GroupLimits::default())?);
    }
    for (r, bound) in [(5, 2), (6, 2), (7, 3)] {
        reports.push(weyl_roots(r, bound)?);
    }
    let expected = [(5, 720u64), (6, 23040), (7, 2903040)];
    let orders_ok = reports
        .iter()
        .filter(|r| r.spec.command == "weyl order")
        .all(|r| expected.iter().any(|&(rr, o)| Some(rr) == r.spec.r && r.get("order") == Some(&json!(o))));
    let roots_ok = reports
        .iter()
        .filter(|r| r.spec.command == "weyl roots")
        .zip([30, 60, 126])
        .all(|(r, n)| r.get("count") == Some(&json!(n)));
    let (passed, detail) = summarize(&reports);
    Ok((passed && orders_ok && roots_ok, json!({"runs": detail, "rank_7_order_checked": !opts.quick})))
}

fn q_identity(opts: RunOptions) -> Result<(bool, Value)> {
    let trials = if opts.quick { 100 } else { 1000 };
    let reports = (5..=12).map(|r| verify_q_identity(r, trials, SEED)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(&reports))
}

fn classification() -> Result<(bool, Value)> {
    let reports = (8..=12).map(lattice_classify).collect::<Result<Vec<_>>>()?;
    let (mut passed, detail) = summarize(&reports);
    let nine = classify(9)?;
    let rejected: Vec<_> = nine.iter().filter(|s| s.verdict != Verdict::Accepted).collect();
    let movable = rejected.len() == 1
        && rejected[0].alpha == BigRational::from_integer(BigInt::from(-2))
        && rejected[0].verdict == Verdict::RejectedMovableCurve
        && rejected[0].canonical_hyperplane_squared == BigInt::from(-4);
    passed &= movable;
    Ok((passed, json!({"runs": detail, "r9_rejected_by_movable_curve_with_minus_4": movable})))
}

fn coble_relations(opts: RunOptions) -> Result<(bool, Value)> {
    let report = coble_sanity(CobleSanitySpec {
        r: 8,
        prime: SMALL_PRIME,
        seed: SEED,
        configs: if opts.quick { 3 } else { 10 },
        word_pairs: if opts.quick { 20 } else { 100 },
        max_len: 8,
    })?;
    Ok(summarize(&[report]))
}

fn coble_injectivity(opts: RunOptions) -> Result<(bool, Value)> {
    let trials = if opts.quick { 40 } else { 200 };
    let reports = [8, 9]
        .into_iter()
        .map(|r| injectivity_experiment(r, 8, trials, SMALL_PRIME, SEED))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&reports))
}

fn restriction(opts: RunOptions) -> Result<(bool, Value)> {
    let report = tr_test(8, 1, LARGE_PRIME, if opts.quick { 2 } else { 5 }, SEED)?;
    Ok(summarize(&[report]))
}

fn eighth_point(opts: RunOptions) -> Result<(bool, Value)> {
    let report = eighth_point_experiment(SMALL_PRIME, if opts.quick { 3 } else { 10 }, SEED)?;
    Ok(summarize(&[report]))
}

fn invariance(opts: RunOptions) -> Result<(bool, Value)> {
    let trials = if opts.quick { 10 } else { 50 };
    let reports = [9, 10]
        .into_iter()
        .map(|r| vr_invariance_experiment(r, SMALL_PRIME, trials, SEED))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&reports))
}

fn not_reproducible(earlier: &[CriterionResult]) -> (bool, Value) {
    let shadow = |n: u8| earlier.iter().find(|c| c.criterion == n).map(|c| c.passed);
    let (three, four) = match (shadow(3), shadow(4)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let run = |f: fn() -> Result<(bool, Value)>| f().map(|x| x.0).unwrap_or(false);
            (run(|| q_identity(RunOptions { quick: true, ..RunOptions::default() })), run(classification))
        }
    };
    (
        three && four,
        json!({
            "status": "not reproducible at desk scale",
            "reason": "the statements quantify over all pseudoautomorphisms and flops of the blow-up; \
                       only their lattice-level consequences are checkable",
            "lattice_shadows": {"criterion_3": three, "criterion_4": four},
        }),
    )
}

/// Runs the selected criteria in order. An empty selection runs nothing and
/// passes.
pub fn run_criteria(selected: &[u8], opts: RunOptions) -> Result<SuiteReport> {
    let mut results: Vec<CriterionResult> = Vec::new();
    for c in CRITERIA.iter().filter(|c| selected.contains(&c.number)) {
        let start = Instant::now();
        let (passed, detail) = match c.number {
            1 => relations(opts)?,
            2 => finite_types(opts)?,
            3 => q_identity(opts)?,
            4 => classification()?,
            5 => coble_relations(opts)?,
            6 => coble_injectivity(opts)?,
            7 => restriction(opts)?,
            8 => eighth_point(opts)?,
            9 => invariance(opts)?,
            _ => not_reproducible(&results),
        };
        let elapsed_ms = start.elapsed().as_millis() as u64;
        results.push(CriterionResult {
            criterion: c.number,
            name: c.name.to_string(),
            passed: passed && elapsed_ms <= c.limit_ms,
            elapsed_ms,
            limit_ms: c.limit_ms,
            detail,
        });
    }
    let passed = results.iter().all(|r| r.passed);
    Ok(SuiteReport { quick: opts.quick, results, passed })
}

pub fn run_all(quick: bool) -> Result<SuiteReport> {
    let all: Vec<u8> = CRITERIA.iter().map(|c| c.number).collect();
    run_criteria(&all, RunOptions { quick, ..RunOptions::default() })
}

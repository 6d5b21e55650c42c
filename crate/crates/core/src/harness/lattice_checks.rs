use anyhow::Result;
use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::classifier::{classify, Verdict};
use crate::intersection::{self_check, triple};
use crate::lattice::{enumerate_roots, qform, LatticeVector};
use crate::weyl::{enumerate_group, generator_matrix, relation_failures, Generator, GroupLimits};

use super::{trial_rng, ExperimentSpec, Report};

fn relations_report(r: usize, corrupt: bool) -> Result<Report> {
    let mut report = Report::new(ExperimentSpec { r: Some(r), ..ExperimentSpec::new("weyl relations") });
    let gens = Generator::all(r);
    let mut mats = gens.iter().map(|&g| generator_matrix(g, r)).collect::<Result<Vec<_>, _>>()?;
    if corrupt {
        let m = &mut mats[0];
        let bumped = m.get(0, 0) + BigInt::from(1);
        m.set(0, 0, bumped);
        report.set("corrupted_generator", gens[0].to_string());
    }
    let failures = relation_failures(&gens, &mats);
    for (g, h, m) in &failures {
        report.violation(json!({"relation": format!("({g} {h})^{m}")}));
    }
    let n = gens.len();
    report.set("generators", n);
    report.set("relations_checked", n + n * (n - 1) / 2);
    report.passed = failures.is_empty();
    Ok(report)
}

/// Checks `g² = 1` and `(gh)^m = 1` for every pair of generator matrices.
pub fn weyl_relations(r: usize) -> Result<Report> {
    relations_report(r, false)
}

/// The same check with one generator matrix deliberately damaged; a working
/// checker must fail it.
pub fn weyl_relations_corrupted(r: usize) -> Result<Report> {
    relations_report(r, true)
}

/// Order of the finite Weyl group, compared with the classical formula for
/// its Dynkin type.
pub fn weyl_order(r: usize, limits: GroupLimits) -> Result<Report> {
    let mut report = Report::new(ExperimentSpec { r: Some(r), ..ExperimentSpec::new("weyl order") });
    let (name, classical) = match r {
        5 => ("A5", (1..=6u64).product::<u64>()),
        6 => ("D6", (1u64 << 5) * (1..=6u64).product::<u64>()),
        7 => ("E7", 2_903_040),
        _ => ("infinite", 0),
    };
    report.set("type", name);
    match enumerate_group(r, limits) {
        Ok(order) => {
            report.set("order", order);
            report.set("classical_order", classical);
            report.passed = order as u64 == classical;
        }
        Err(e) => {
            report.set("error", e.to_string());
            report.passed = false;
        }
    }
    Ok(report)
}

/// Roots of `H_r` in a saturated box.
pub fn weyl_roots(r: usize, bound: u32) -> Result<Report> {
    let mut report =
        Report::new(ExperimentSpec { r: Some(r), bound: Some(bound), ..ExperimentSpec::new("weyl roots") });
    let classical = match r {
        5 => 30,
        6 => 60,
        7 => 126,
        _ => 0,
    };
    match enumerate_roots(r, bound) {
        Ok(roots) => {
            report.set("count", roots.len());
            report.set("saturated_at", bound + 1);
            report.set("classical_count", classical);
            report.passed = roots.len() == classical;
        }
        Err(e) => {
            report.set("error", e.to_string());
            report.passed = false;
        }
    }
    Ok(report)
}

/// Every candidate `(σ, α, L)` with its verdict; passes iff the identity is
/// the unique survivor.
pub fn lattice_classify(r: usize) -> Result<Report> {
    let mut report = Report::new(ExperimentSpec { r: Some(r), ..ExperimentSpec::new("lattice classify") });
    let solutions = match classify(r) {
        Ok(s) => s,
        Err(e) => {
            report.set("error", e.to_string());
            report.passed = false;
            return Ok(report);
        }
    };
    for s in &solutions {
        report.record(serde_json::to_value(s)?);
    }
    let accepted: Vec<_> = solutions.iter().filter(|s| s.verdict == Verdict::Accepted).collect();
    let identity = accepted.len() == 1
        && accepted[0].sigma == 1
        && accepted[0].alpha == num_rational::BigRational::from_integer(0.into())
        && accepted[0].l.iter().all(|c| *c == num_rational::BigRational::from_integer(0.into()));
    report.set("accepted", accepted.len());
    report.passed = identity;
    Ok(report)
}

fn sums(r: usize, indices: &[usize]) -> LatticeVector {
    let mut c = vec![0i64; r + 1];
    for &i in indices {
        c[i] += 1;
    }
    LatticeVector::from_i64s(&c)
}

/// `q(D) = D² · k` on the basis, all pair and triple sums of basis vectors,
/// and random vectors; `(-K)³ = 64 - 8r` for `r = 0..=12`; generator
/// invariance of the triple product on random triples.
pub fn verify_q_identity(r: usize, trials: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new(ExperimentSpec {
        r: Some(r),
        trials: Some(trials),
        seed: Some(seed),
        ..ExperimentSpec::new("verify q-identity")
    });
    let k = LatticeVector::half_anticanonical(r);
    let check = |d: &LatticeVector| -> Result<Option<(BigInt, BigInt)>> {
        let lhs = qform(d);
        let rhs = triple(d, d, &k)?;
        Ok((lhs != rhs).then_some((lhs, rhs)))
    };

    let n = r + 1;
    let mut spanning = Vec::new();
    for a in 0..n {
        spanning.push(sums(r, &[a]));
        for b in a + 1..n {
            spanning.push(sums(r, &[a, b]));
            for c in b + 1..n {
                spanning.push(sums(r, &[a, b, c]));
            }
        }
    }
    let random: Vec<LatticeVector> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            LatticeVector::from_i64s(&(0..n).map(|_| rng.random_range(-20..=20)).collect::<Vec<_>>())
        })
        .collect();
    for (set, vectors) in [("spanning", &spanning), ("random", &random)] {
        for d in vectors.iter() {
            if let Some((lhs, rhs)) = check(d)? {
                report.violation(json!({"set": set, "divisor": d, "q": lhs.to_string(), "triple": rhs.to_string()}));
            }
        }
    }
    report.set("spanning_checked", spanning.len());
    report.set("random_checked", random.len());

    let mut cubes_ok = true;
    for rr in 0..=12usize {
        let minus_k = LatticeVector::canonical(rr).neg();
        let cube = triple(&minus_k, &minus_k, &minus_k)?;
        let expected = BigInt::from(64 - 8 * rr as i64);
        cubes_ok &= cube == expected;
        report.record(json!({"r": rr, "anticanonical_cube": cube.to_string(), "expected": expected.to_string()}));
    }
    report.set("anticanonical_cubes_ok", cubes_ok);
    let self_ok = self_check(r).is_ok();
    report.set("self_check", self_ok);

    // Permutations preserve the whole cubic form. The Cremona reflection is
    // only a pseudoautomorphism: it changes the cubic form but preserves every
    // product against the anticanonical direction.
    let mut rng = trial_rng(seed, u64::MAX);
    let mut invariance_failures = 0usize;
    for g in Generator::all(r) {
        let m = generator_matrix(g, r)?;
        for _ in 0..20 {
            let v: Vec<LatticeVector> = (0..3)
                .map(|_| LatticeVector::from_i64s(&(0..n).map(|_| rng.random_range(-5..=5)).collect::<Vec<_>>()))
                .collect();
            let mv = v.iter().map(|x| m.apply(x)).collect::<Result<Vec<_>, _>>()?;
            let third = if g == Generator::S { (&k, &k) } else { (&v[2], &mv[2]) };
            if triple(&v[0], &v[1], third.0)? != triple(&mv[0], &mv[1], third.1)? {
                invariance_failures += 1;
            }
        }
    }
    report.set("weyl_invariance_failures", invariance_failures);
    let h = LatticeVector::basis(r, 0);
    let sh = generator_matrix(Generator::S, r)?.apply(&h)?;
    report.set("cremona_hyperplane_cube", triple(&sh, &sh, &sh)?.to_string());
    report.passed = report.violations.is_empty() && cubes_ok && self_ok && invariance_failures == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_and_their_negative_control() {
        assert!(weyl_relations(8).unwrap().passed);
        let bad = weyl_relations_corrupted(8).unwrap();
        assert!(!bad.passed);
        assert!(!bad.violations.is_empty());
    }

    #[test]
    fn small_group_order() {
        let report = weyl_order(5, GroupLimits::default()).unwrap();
        assert!(report.passed);
        assert_eq!(report.get("order").unwrap(), 720);
        let capped = weyl_order(6, GroupLimits { max_elements: 1000, ..GroupLimits::default() }).unwrap();
        assert!(!capped.passed);
        assert!(capped.get("error").is_some());
    }

    #[test]
    fn classify_report() {
        let report = lattice_classify(9).unwrap();
        assert!(report.passed);
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.records[1]["alpha"], "-2");
        assert!(!lattice_classify(7).unwrap().passed);
    }

    #[test]
    fn q_identity_report() {
        let report = verify_q_identity(6, 50, 3).unwrap();
        assert!(report.passed, "{:?} {:?}", report.violations, report.summary);
        assert_eq!(report.get("spanning_checked").unwrap(), 7 + 21 + 35);
        assert_eq!(report.get("cremona_hyperplane_cube").unwrap(), "-5");
        assert_eq!(report, verify_q_identity(6, 50, 3).unwrap());
    }
}

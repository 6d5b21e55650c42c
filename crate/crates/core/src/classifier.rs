//! Exact classification of the lattice maps `ι` of the form
//! `ι(E_i) = σ E_i + L`, `ι(H) = σ H + 4L` that preserve the quadratic form,
//! together with the two numerical exclusions that remove `σ = -1`.
//!
//! The candidates are pinned down by `q(E_i, L) = α` and `q(H, L) = 4α` for a
//! scalar `α`, whose unique solution is `L = α·k`. Pairing `ι(E_1) - σE_1`
//! with `k` then gives `1 - σ = α(8 - r)`. For `r = 8` that relation is
//! vacuous and `q(k) = 0` forces `α = 0` instead.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::field::Rationals;
use crate::intersection::triple;
use crate::lattice::{GramForm, LatticeVector};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("classification needs r >= 8, got r = {0}")]
    RankTooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Accepted,
    RejectedNonIntegral,
    RejectedEffectiveCone,
    RejectedMovableCurve,
}

/// Outcome of one exclusion filter on one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterOutcome {
    Pass,
    Fail,
    /// The filter's hypothesis does not hold for this candidate.
    NotApplicable,
}

/// The three filters, each evaluated independently of the others.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FilterResults {
    pub integrality: FilterOutcome,
    pub effective_cone: FilterOutcome,
    pub movable_curve: FilterOutcome,
}

impl FilterResults {
    fn failures(&self) -> Vec<Verdict> {
        let mut out = Vec::new();
        if self.integrality == FilterOutcome::Fail {
            out.push(Verdict::RejectedNonIntegral);
        }
        if self.effective_cone == FilterOutcome::Fail {
            out.push(Verdict::RejectedEffectiveCone);
        }
        if self.movable_curve == FilterOutcome::Fail {
            out.push(Verdict::RejectedMovableCurve);
        }
        out
    }
}

/// One candidate `(σ, α, L)` with the evidence behind its verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstrainedSolution {
    pub r: usize,
    pub sigma: i8,
    #[serde(serialize_with = "rational_string")]
    pub alpha: BigRational,
    #[serde(rename = "L", serialize_with = "rational_strings")]
    pub l: Vec<BigRational>,
    pub verdict: Verdict,
    pub filters: FilterResults,
    /// `q(L)`, which must equal `α²(8 - r)`.
    #[serde(serialize_with = "rational_string")]
    pub q_of_l: BigRational,
    /// `K · H · H`, the number the movable-curve filter rests on.
    #[serde(serialize_with = "crate::lattice::bigint_to_json")]
    pub canonical_hyperplane_squared: BigInt,
    /// Whether the candidate map preserves the form on all of `H_r ⊗ Q`.
    pub is_isometry: bool,
    pub fixes_anticanonical: bool,
}

fn rational_string<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn rational_strings<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational bilinear form of `H_r`.
fn pair(u: &[BigRational], v: &[BigRational]) -> BigRational {
    let gram = GramForm::new(u.len() - 1);
    u.iter().zip(v).enumerate().map(|(i, (a, b))| rat(gram.entry(i, i)) * a * b).sum()
}

fn half_anticanonical(r: usize) -> Vec<BigRational> {
    LatticeVector::half_anticanonical(r).coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

/// Solves `q(h_0, L) = 4α`, `q(h_i, L) = α` by exact elimination.
pub fn solve_for_l(r: usize, alpha: &BigRational) -> Vec<BigRational> {
    let gram = GramForm::new(r);
    let m: Vec<Vec<BigRational>> = (0..=r).map(|i| (0..=r).map(|j| rat(gram.entry(i, j))).collect()).collect();
    let mut rhs = vec![alpha.clone(); r + 1];
    rhs[0] = rat(4) * alpha;
    linalg::solve(&Rationals, &m, &rhs).expect("the Gram matrix is invertible")
}

/// Whether the unique solution of the linear system for `α` is `α·k`.
pub fn verify_l_shape(r: usize, alpha: &BigRational) -> bool {
    let expected: Vec<BigRational> = half_anticanonical(r).iter().map(|c| c * alpha).collect();
    solve_for_l(r, alpha) == expected
}

/// Images of `h_0, …, h_r` under the candidate map.
fn candidate_images(sigma: i8, l: &[BigRational]) -> Vec<Vec<BigRational>> {
    let s = rat(sigma as i64);
    (0..l.len())
        .map(|i| {
            let weight = if i == 0 { rat(4) } else { BigRational::one() };
            let mut v: Vec<BigRational> = l.iter().map(|c| c * &weight).collect();
            v[i] += &s;
            v
        })
        .collect()
}

fn audit(sigma: i8, l: &[BigRational]) -> (bool, bool) {
    let r = l.len() - 1;
    let images = candidate_images(sigma, l);
    let gram = GramForm::new(r);
    let isometry = (0..=r).all(|i| (0..=r).all(|j| pair(&images[i], &images[j]) == rat(gram.entry(i, j))));
    let k = half_anticanonical(r);
    let mut image_k = vec![BigRational::zero(); r + 1];
    for (i, c) in k.iter().enumerate() {
        for (acc, x) in image_k.iter_mut().zip(&images[i]) {
            *acc += c * x;
        }
    }
    (isometry, image_k == k)
}

fn filters(sigma: i8, alpha: &BigRational, l: &[BigRational]) -> FilterResults {
    let integral = l.iter().all(|c| c.is_integer());
    let integrality = if integral { FilterOutcome::Pass } else { FilterOutcome::Fail };
    // both geometric filters speak about an actual divisor class
    let geometric = |fails: bool| match (integral, fails) {
        (false, _) => FilterOutcome::NotApplicable,
        (true, true) => FilterOutcome::Fail,
        (true, false) => FilterOutcome::Pass,
    };
    let zero = l.iter().all(|c| c.is_zero());
    // ι(E_i) + E_i = (1 + σ) E_i + L vanishes exactly when σ = -1 and L = 0
    let effective_cone = geometric(sigma == -1 && zero);
    // for σ = -1 and L = αk with α < 0, ι(H)² · K would have the sign of K·H² = -4 < 0
    let movable_curve = geometric(sigma == -1 && alpha.is_negative());
    FilterResults { integrality, effective_cone, movable_curve }
}

/// All candidates for rank `r`, each with its verdict.
pub fn classify(r: usize) -> Result<Vec<ConstrainedSolution>, ClassifierError> {
    if r < 8 {
        return Err(ClassifierError::RankTooSmall(r));
    }
    let khh = triple(&LatticeVector::canonical(r), &LatticeVector::basis(r, 0), &LatticeVector::basis(r, 0))
        .expect("same rank");
    let mut out = Vec::new();
    for sigma in [1i8, -1] {
        let alpha = if r == 8 { BigRational::zero() } else { rat(1 - sigma as i64) / rat(8 - r as i64) };
        let l = solve_for_l(r, &alpha);
        let q_of_l = pair(&l, &l);
        debug_assert_eq!(q_of_l, &alpha * &alpha * rat(8 - r as i64));
        let filters = filters(sigma, &alpha, &l);
        let failures = filters.failures();
        assert!(failures.len() <= 1, "filters disagree on candidate σ = {sigma}: {failures:?}");
        let verdict = failures.first().copied().unwrap_or(Verdict::Accepted);
        let (is_isometry, fixes_anticanonical) = audit(sigma, &l);
        out.push(ConstrainedSolution {
            r,
            sigma,
            alpha,
            l,
            verdict,
            filters,
            q_of_l,
            canonical_hyperplane_squared: khh.clone(),
            is_isometry,
            fixes_anticanonical,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn candidate(r: usize, sigma: i8) -> ConstrainedSolution {
        classify(r).unwrap().into_iter().find(|c| c.sigma == sigma).unwrap()
    }

    fn ints(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn only_the_identity_survives() {
        for r in 8..=12 {
            let all = classify(r).unwrap();
            let accepted: Vec<_> = all.iter().filter(|c| c.verdict == Verdict::Accepted).collect();
            assert_eq!(accepted.len(), 1);
            assert_eq!(accepted[0].sigma, 1);
            assert!(accepted[0].alpha.is_zero());
            assert!(accepted[0].l.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rank_eight() {
        let minus = candidate(8, -1);
        assert!(minus.alpha.is_zero());
        assert_eq!(minus.verdict, Verdict::RejectedEffectiveCone);
        // -id preserves the form but sends k to -k
        assert!(minus.is_isometry && !minus.fixes_anticanonical);
    }

    #[test]
    fn rank_nine_and_ten_are_integral_but_not_movable() {
        let c = candidate(9, -1);
        assert_eq!(c.alpha, rat(-2));
        assert_eq!(c.l, ints(&[-4, 2, 2, 2, 2, 2, 2, 2, 2, 2]));
        assert_eq!(c.verdict, Verdict::RejectedMovableCurve);
        assert_eq!(c.canonical_hyperplane_squared, BigInt::from(-4));
        // a genuine isometry fixing k; only the geometric filter removes it
        assert!(c.is_isometry && c.fixes_anticanonical);

        let c = candidate(10, -1);
        assert_eq!(c.alpha, rat(-1));
        assert_eq!(c.verdict, Verdict::RejectedMovableCurve);
        assert!(c.is_isometry);
    }

    #[test]
    fn rank_eleven_and_twelve_are_not_integral() {
        let c = candidate(11, -1);
        assert_eq!(c.alpha, BigRational::new(BigInt::from(-2), BigInt::from(3)));
        assert_eq!(c.verdict, Verdict::RejectedNonIntegral);
        assert_eq!(c.filters.movable_curve, FilterOutcome::NotApplicable);
        assert_eq!(candidate(12, -1).alpha, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(candidate(12, -1).verdict, Verdict::RejectedNonIntegral);
    }

    #[test]
    fn form_consistency() {
        for r in 8..=12 {
            for c in classify(r).unwrap() {
                assert_eq!(c.q_of_l, &c.alpha * &c.alpha * rat(8 - r as i64));
                // q(σE_i + L) = q(E_i) rearranges to q(L) = -2σα
                assert_eq!(c.q_of_l, rat(-2 * c.sigma as i64) * &c.alpha);
                assert!(c.is_isometry);
                assert_eq!(c.fixes_anticanonical, r > 8 || c.sigma == 1);
            }
        }
    }

    #[test]
    fn small_rank_is_refused() {
        assert_eq!(classify(7), Err(ClassifierError::RankTooSmall(7)));
    }

    #[test]
    fn l_shape_examples() {
        assert!(verify_l_shape(9, &BigRational::zero()));
        assert!(solve_for_l(9, &BigRational::zero()).iter().all(Zero::is_zero));
        assert_eq!(solve_for_l(9, &rat(-2)), ints(&[-4, 2, 2, 2, 2, 2, 2, 2, 2, 2]));
    }

    #[test]
    fn json_layout() {
        let v = serde_json::to_value(candidate(11, -1)).unwrap();
        assert_eq!(v["alpha"], "-2/3");
        assert_eq!(v["L"][0], "-4/3");
        assert_eq!(v["verdict"], "RejectedNonIntegral");
        assert_eq!(v["canonical_hyperplane_squared"], -4);
    }

    proptest! {
        #[test]
        fn l_is_always_alpha_times_k(r in 8usize..=12, num in -50i64..50, den in 1i64..20) {
            let alpha = BigRational::new(BigInt::from(num), BigInt::from(den));
            prop_assert!(verify_l_shape(r, &alpha));
        }
    }
}

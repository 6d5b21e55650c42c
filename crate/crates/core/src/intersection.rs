//! Triple intersection numbers of divisors on the blow-up of P³ at `r` points.
//!
//! Structure constants: `H³ = 1`, `E_i³ = 1`, and every monomial mixing two
//! different basis divisors vanishes. With these,
//! `q(D) = D · D · (-K/2)` for every divisor `D`.

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{bilinear, qform, LatticeError, LatticeVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntersectionError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("structure constant check failed: {0}")]
    SelfCheck(String),
}

/// `D1 · D2 · D3 = a_0 b_0 c_0 + Σ a_i b_i c_i`.
pub fn triple(d1: &LatticeVector, d2: &LatticeVector, d3: &LatticeVector) -> Result<BigInt, LatticeError> {
    for d in [d2, d3] {
        if d.rank() != d1.rank() {
            return Err(LatticeError::RankMismatch { left: d1.rank(), right: d.rank() });
        }
    }
    Ok(d1.coeffs().iter().zip(d2.coeffs()).zip(d3.coeffs()).map(|((a, b), c)| a * b * c).sum())
}

/// Whether `q(D) = D² · k` with `k = -K/2`.
pub fn q_equals_triple(d: &LatticeVector) -> bool {
    let k = LatticeVector::half_anticanonical(d.rank());
    triple(d, d, &k).map(|t| t == qform(d)).unwrap_or(false)
}

/// The two independent derivations pinning `E_i³ = 1`:
/// `q(E_i) = E_i² · k` on the basis, and `(-K)³ = 64 - 8r`.
pub fn self_check(r: usize) -> Result<(), IntersectionError> {
    let k = LatticeVector::half_anticanonical(r);
    for i in 0..=r {
        let e = LatticeVector::basis(r, i);
        let lhs = qform(&e);
        let rhs = triple(&e, &e, &k)?;
        if lhs != rhs {
            return Err(IntersectionError::SelfCheck(format!("q(h_{i}) = {lhs} but h_{i}² · k = {rhs}")));
        }
    }
    let minus_k = LatticeVector::canonical(r).neg();
    let cube = triple(&minus_k, &minus_k, &minus_k)?;
    let expected = BigInt::from(64 - 8 * r as i64);
    if cube != expected {
        return Err(IntersectionError::SelfCheck(format!("(-K)³ = {cube}, expected {expected}")));
    }
    Ok(())
}

/// `D · k · k`, the degree of the restriction of `D` to the base curve; it
/// coincides with the lattice pairing `(D, k)`.
pub fn degree_on_base_curve(d: &LatticeVector) -> Result<BigInt, LatticeError> {
    let k = LatticeVector::half_anticanonical(d.rank());
    let via_triple = triple(d, &k, &k)?;
    debug_assert_eq!(Some(&via_triple), bilinear(d, &k).ok().as_ref());
    Ok(via_triple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn canonical_times_hyperplane_squared() {
        for r in 5..=12 {
            let h0 = LatticeVector::basis(r, 0);
            assert_eq!(triple(&LatticeVector::canonical(r), &h0, &h0).unwrap(), BigInt::from(-4));
        }
    }

    #[test]
    fn exceptional_structure_constants() {
        let r = 8;
        let h0 = LatticeVector::basis(r, 0);
        for i in 1..=r {
            let e = LatticeVector::basis(r, i);
            assert!(triple(&h0, &h0, &e).unwrap().is_zero());
            assert!(triple(&h0, &e, &e).unwrap().is_zero());
            assert_eq!(triple(&e, &e, &e).unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn anticanonical_cube() {
        for r in 0..=12 {
            let minus_k = LatticeVector::canonical(r).neg();
            assert_eq!(triple(&minus_k, &minus_k, &minus_k).unwrap(), BigInt::from(64 - 8 * r as i64));
        }
    }

    #[test]
    fn q_identity_examples() {
        assert!(q_equals_triple(&LatticeVector::half_anticanonical(8)));
        assert!(q_equals_triple(&LatticeVector::basis(8, 0)));
        let k = LatticeVector::half_anticanonical(8);
        assert!(triple(&k, &k, &k).unwrap().is_zero());
    }

    #[test]
    fn self_checks_pass() {
        for r in 0..=12 {
            self_check(r).unwrap();
        }
    }

    #[test]
    fn rank_mismatch() {
        let a = LatticeVector::zero(5);
        let b = LatticeVector::zero(6);
        assert!(triple(&a, &a, &b).is_err());
    }

    #[test]
    fn degree_matches_pairing() {
        let d = LatticeVector::from_i64s(&[2, -1, -1, -1, -1, -1, -1, -1, 0]);
        assert_eq!(degree_on_base_curve(&d).unwrap(), BigInt::from(1));
    }
}

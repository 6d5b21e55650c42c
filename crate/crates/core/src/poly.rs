//! Univariate polynomials over `F_p` and their roots in `F_p`.

use crate::field::{Field, PrimeField};

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::new(vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, f: &PrimeField, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, c| f.add(&f.mul(&acc, &x), c))
    }

    pub fn add(&self, f: &PrimeField, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.add(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn sub(&self, f: &PrimeField, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.sub(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn scale(&self, f: &PrimeField, c: u64) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| f.mul(x, &c)).collect())
    }

    pub fn mul(&self, f: &PrimeField, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, f: &PrimeField, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(&divisor.coeffs[d]).expect("leading coefficient is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = f.mul(&rem[i], &lead_inv);
            if c == 0 {
                continue;
            }
            quot[i - d] = c;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let idx = i - d + j;
                rem[idx] = f.sub(&rem[idx], &f.mul(&c, b));
            }
        }
        rem.truncate(d);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, f: &PrimeField, divisor: &Poly) -> Poly {
        self.div_rem(f, divisor).1
    }

    pub fn monic(&self, f: &PrimeField) -> Poly {
        match self.coeffs.last() {
            Some(lead) => self.scale(f, f.inv(lead).expect("nonzero")),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, f: &PrimeField, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `base^exp mod modulus`.
    pub fn pow_mod(&self, f: &PrimeField, mut exp: u64, modulus: &Poly) -> Poly {
        let mut result = Poly::constant(1).rem(f, modulus);
        let mut base = self.rem(f, modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(f, &base).rem(f, modulus);
            }
            base = base.mul(f, &base).rem(f, modulus);
            exp >>= 1;
        }
        result
    }

    /// Distinct roots in `F_p`, sorted ascending. The zero polynomial has no
    /// well-defined root set and returns an empty list.
    pub fn roots(&self, f: &PrimeField) -> Vec<u64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let g = self.monic(f);
        // Split off the F_p-rational part: gcd(g, x^p - x).
        let xp = Poly::x().pow_mod(f, f.modulus(), &g);
        let split = g.gcd(f, &xp.sub(f, &Poly::x()));
        let mut roots = Vec::new();
        split_linear_factors(f, &split, 1, &mut roots);
        roots.sort_unstable();
        roots
    }
}

/// Equal-degree splitting of a squarefree product of distinct linear factors.
fn split_linear_factors(f: &PrimeField, g: &Poly, mut shift: u64, out: &mut Vec<u64>) {
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            // x + c
            out.push(f.neg(&g.coeff(0)));
            return;
        }
        Some(_) => {}
    }
    let p = f.modulus();
    let half = (p - 1) / 2;
    // Deterministic shifts 1, 2, 3, ...; each splits with probability about 1/2.
    loop {
        let t = Poly::new(vec![shift % p, 1]);
        shift += 1;
        let h = t.pow_mod(f, half, g).sub(f, &Poly::constant(1));
        let d = g.gcd(f, &h);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < g.degree().unwrap() {
            let (other, _) = g.div_rem(f, &d);
            split_linear_factors(f, &d, shift, out);
            split_linear_factors(f, &other.monic(f), shift, out);
            return;
        }
        if shift > p + 2 {
            // Only reachable for p = 3 with repeated failures.
            for x in 0..p {
                if g.eval(f, x) == 0 {
                    out.push(x);
                }
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_roots(f: &PrimeField, roots: &[u64]) -> Poly {
        roots.iter().fold(Poly::constant(1), |acc, &r| acc.mul(f, &Poly::new(vec![f.neg(&r), 1])))
    }

    #[test]
    fn roots_of_split_quartic() {
        let f = PrimeField::new(1_000_000_007).unwrap();
        let p = from_roots(&f, &[5, 17, 999_999_000, 3]);
        assert_eq!(p.roots(&f), vec![3, 5, 17, 999_999_000]);
    }

    #[test]
    fn irreducible_quadratic_has_no_roots() {
        // x² + 1 over p ≡ 3 mod 4
        let f = PrimeField::new(10007).unwrap();
        assert!(Poly::new(vec![1, 0, 1]).roots(&f).is_empty());
        let times_linear = Poly::new(vec![1, 0, 1]).mul(&f, &Poly::new(vec![f.neg(&42), 1]));
        assert_eq!(times_linear.roots(&f), vec![42]);
    }

    #[test]
    fn repeated_roots_are_reported_once() {
        let f = PrimeField::new(10007).unwrap();
        assert_eq!(from_roots(&f, &[7, 7, 9]).roots(&f), vec![7, 9]);
    }

    #[test]
    fn division_identity() {
        let f = PrimeField::new(101).unwrap();
        let a = Poly::new(vec![3, 0, 5, 7, 1]);
        let b = Poly::new(vec![2, 9]);
        let (q, r) = a.div_rem(&f, &b);
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    proptest! {
        #[test]
        fn roots_recover_planted(roots in proptest::collection::btree_set(0u64..10007, 1..6)) {
            let f = PrimeField::new(10007).unwrap();
            let roots: Vec<u64> = roots.into_iter().collect();
            let p = from_roots(&f, &roots).mul(&f, &Poly::new(vec![1, 0, 1]));
            prop_assert_eq!(p.roots(&f), roots);
        }
    }
}

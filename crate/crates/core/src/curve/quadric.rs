use serde::{Deserialize, Serialize};

use crate::config::ProjPoint;
use crate::field::{Field, PrimeField};
use crate::linalg;

use super::CurveError;

/// Monomials `x_i x_j` with `i ≤ j`, in the coefficient order used everywhere.
pub const QUADRIC_MONOMIALS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// A quadratic form on F_p⁴, stored by its ten monomial coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuadricForm {
    pub coeffs: [u64; 10],
}

impl QuadricForm {
    pub fn eval(&self, f: &PrimeField, x: &[u64; 4]) -> u64 {
        QUADRIC_MONOMIALS
            .iter()
            .zip(&self.coeffs)
            .fold(0, |acc, (&(i, j), c)| f.add(&acc, &f.mul(c, &f.mul(&x[i], &x[j]))))
    }

    /// `Q(x + y) - Q(x) - Q(y)`, twice the associated bilinear form.
    pub fn polar(&self, f: &PrimeField, x: &[u64; 4], y: &[u64; 4]) -> u64 {
        QUADRIC_MONOMIALS.iter().zip(&self.coeffs).fold(0, |acc, (&(i, j), c)| {
            let t = f.add(&f.mul(&x[i], &y[j]), &f.mul(&x[j], &y[i]));
            f.add(&acc, &f.mul(c, &t))
        })
    }

    pub fn gradient(&self, f: &PrimeField, x: &[u64; 4]) -> [u64; 4] {
        let mut g = [0u64; 4];
        for (&(i, j), c) in QUADRIC_MONOMIALS.iter().zip(&self.coeffs) {
            g[i] = f.add(&g[i], &f.mul(c, &x[j]));
            g[j] = f.add(&g[j], &f.mul(c, &x[i]));
        }
        g
    }

    /// The symmetric Gram matrix `S` with `Q(x) = xᵀ S x`; needs `p` odd.
    pub fn matrix(&self, f: &PrimeField) -> [[u64; 4]; 4] {
        let half = f.inv(&2).expect("p is odd");
        let mut m = [[0u64; 4]; 4];
        for (&(i, j), c) in QUADRIC_MONOMIALS.iter().zip(&self.coeffs) {
            if i == j {
                m[i][i] = *c;
            } else {
                let h = f.mul(c, &half);
                m[i][j] = h;
                m[j][i] = h;
            }
        }
        m
    }

    pub fn combine(f: &PrimeField, terms: &[(u64, &QuadricForm)]) -> QuadricForm {
        let mut coeffs = [0u64; 10];
        for (s, q) in terms {
            for (acc, c) in coeffs.iter_mut().zip(&q.coeffs) {
                *acc = f.add(acc, &f.mul(s, c));
            }
        }
        QuadricForm { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Two independent quadrics; their common zero locus is the base curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricPencil {
    pub q1: QuadricForm,
    pub q2: QuadricForm,
}

impl QuadricPencil {
    pub fn new(f: &PrimeField, q1: QuadricForm, q2: QuadricForm) -> Result<Self, CurveError> {
        if quadric_span_rank(f, &[q1, q2]) != 2 {
            return Err(CurveError::NotAPencil { dim: quadric_span_rank(f, &[q1, q2]) });
        }
        Ok(Self { q1, q2 })
    }

    pub fn contains(&self, f: &PrimeField, x: &[u64; 4]) -> bool {
        self.q1.eval(f, x) == 0 && self.q2.eval(f, x) == 0
    }

    pub fn forms(&self) -> [&QuadricForm; 2] {
        [&self.q1, &self.q2]
    }
}

pub fn quadric_span_rank(f: &PrimeField, qs: &[QuadricForm]) -> usize {
    let m: Vec<Vec<u64>> = qs.iter().map(|q| q.coeffs.to_vec()).collect();
    linalg::rank(f, &m)
}

/// Basis of the space of quadrics vanishing at every point.
pub fn quadrics_through(f: &PrimeField, points: &[ProjPoint<u64>]) -> Vec<QuadricForm> {
    let rows: Vec<Vec<u64>> = points
        .iter()
        .map(|p| {
            let x = p.coords();
            QUADRIC_MONOMIALS.iter().map(|&(i, j)| f.mul(&x[i], &x[j])).collect()
        })
        .collect();
    linalg::kernel(f, &rows, 10)
        .into_iter()
        .map(|v| QuadricForm { coeffs: v.try_into().expect("ten coefficients") })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::random_config;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pencil_and_net_dimensions() {
        let f = PrimeField::new(10007).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let c = random_config(&f, 9, &mut rng).unwrap();
            assert_eq!(quadrics_through(&f, &c.points[..8]).len(), 2);
            assert_eq!(quadrics_through(&f, &c.points[..7]).len(), 3);
            assert_eq!(quadrics_through(&f, &c.points).len(), 1);
            for q in quadrics_through(&f, &c.points[..8]) {
                assert!(c.points[..8].iter().all(|p| q.eval(&f, p.coords()) == 0));
            }
        }
        assert_eq!(quadrics_through(&f, &[]).len(), 10);
    }

    #[test]
    fn polar_gradient_and_matrix_agree() {
        let f = PrimeField::new(10007).unwrap();
        let q = QuadricForm { coeffs: [3, 1, 4, 1, 5, 9, 2, 6, 5, 3] };
        let x = [7, 11, 13, 17];
        let y = [19, 23, 29, 31];
        let g = q.gradient(&f, &x);
        let dot = (0..4).fold(0, |acc, i| f.add(&acc, &f.mul(&g[i], &y[i])));
        assert_eq!(q.polar(&f, &x, &y), dot);
        assert_eq!(q.polar(&f, &x, &x), f.mul(&2, &q.eval(&f, &x)));
        let m = q.matrix(&f);
        let mut xtsx = 0;
        for i in 0..4 {
            for j in 0..4 {
                xtsx = f.add(&xtsx, &f.mul(&x[i], &f.mul(&m[i][j], &x[j])));
            }
        }
        assert_eq!(xtsx, q.eval(&f, &x));
    }

    #[test]
    fn dependent_quadrics_are_not_a_pencil() {
        let f = PrimeField::new(10007).unwrap();
        let q = QuadricForm { coeffs: [1, 0, 0, 0, 1, 0, 0, 1, 0, 1] };
        let q2 = QuadricForm::combine(&f, &[(5, &q)]);
        assert!(matches!(QuadricPencil::new(&f, q, q2), Err(CurveError::NotAPencil { dim: 1 })));
    }
}

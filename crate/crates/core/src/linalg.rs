//! Dense Gaussian elimination over an exact [`Field`].

use crate::field::{Field, FieldError};

pub type Matrix<E> = Vec<Vec<E>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(field: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(pivot) = (row..rows).find(|&i| !field.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(row, pivot);
        let inv = field.inv(&m[row][col]).expect("pivot is nonzero");
        for x in m[row].iter_mut() {
            *x = field.mul(x, &inv);
        }
        for i in 0..rows {
            if i != row && !field.is_zero(&m[i][col]) {
                let factor = m[i][col].clone();
                let (src, dst) = if i < row {
                    let (a, b) = m.split_at_mut(row);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[row], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = field.sub(d, &field.mul(&factor, s));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    let mut work = m.clone();
    rref(field, &mut work).len()
}

/// A basis of `{x : M x = 0}` for a matrix with `cols` columns.
pub fn kernel<F: Field>(field: &F, m: &Matrix<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    let mut work = m.clone();
    let pivots = rref(field, &mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); cols];
            v[f] = field.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = field.neg(&work[row][f]);
            }
            v
        })
        .collect()
}

pub fn determinant<F: Field>(field: &F, m: &Matrix<F::Elem>) -> F::Elem {
    let n = m.len();
    let mut a = m.clone();
    let mut det = field.one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&i| !field.is_zero(&a[i][col])) else {
            return field.zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[col][col]);
        let inv = field.inv(&a[col][col]).expect("pivot is nonzero");
        for i in col + 1..n {
            if field.is_zero(&a[i][col]) {
                continue;
            }
            let factor = field.mul(&a[i][col], &inv);
            for j in col..n {
                let t = field.mul(&factor, &a[col][j]);
                a[i][j] = field.sub(&a[i][j], &t);
            }
        }
    }
    det
}

pub fn inverse<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>, FieldError> {
    let n = m.len();
    let mut aug: Matrix<F::Elem> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let pivots = rref(field, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(FieldError::DivisionByZero);
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// The unique solution of a square system `M x = b`.
pub fn solve<F: Field>(field: &F, m: &Matrix<F::Elem>, b: &[F::Elem]) -> Result<Vec<F::Elem>, FieldError> {
    let inv = inverse(field, m)?;
    Ok(mat_vec(field, &inv, b))
}

pub fn mat_vec<F: Field>(field: &F, m: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    m.iter().map(|row| row.iter().zip(v).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))).collect()
}

pub fn mat_mul<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter().zip(b).fold(field.zero(), |acc, (x, brow)| field.add(&acc, &field.mul(x, &brow[j])))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn q(rows: &[&[i64]]) -> Matrix<BigRational> {
        rows.iter().map(|r| r.iter().map(|&x| Rationals.from_i64(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let ker = kernel(&Rationals, &m, 3);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(mat_vec(&Rationals, &m, v).iter().all(|x| Rationals.is_zero(x)));
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(determinant(&Rationals, &m), Rationals.from_i64(18));
        let inv = inverse(&Rationals, &m).unwrap();
        let id = mat_mul(&Rationals, &m, &inv);
        for (i, row) in id.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, Rationals.from_i64(i64::from(i == j)));
            }
        }
        let singular = q(&[&[1, 2], &[2, 4]]);
        assert!(inverse(&Rationals, &singular).is_err());
        assert_eq!(determinant(&Rationals, &singular), Rationals.zero());
    }

    #[test]
    fn solve_over_prime_field() {
        let f = PrimeField::new(10007).unwrap();
        let m = vec![vec![1, 2], vec![3, 4]];
        let x = solve(&f, &m, &[5, 6]).unwrap();
        assert_eq!(mat_vec(&f, &m, &x), vec![5, 6]);
    }
}

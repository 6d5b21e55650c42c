//! The odd hyperbolic lattice `H_r = Z h_0 ⊕ Z h_1 ⊕ … ⊕ Z h_r`.
//!
//! The Gram matrix is `diag(2, -1, …, -1)`. Index 0 always holds the `h_0`
//! coefficient, indices `1..=r` hold `h_1, …, h_r`. Read through the strict
//! geometric marking the same vectors are divisor classes on the blow-up of
//! P³ at `r` points: `h_0` is the pulled-back hyperplane and `h_i` is the
//! exceptional divisor `E_i`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("reflection vector has q = {q}, expected -2")]
    NotARoot { q: BigInt },
    #[error("root system of H_{r} is infinite (q(k) = {} <= 0)", 8 - *r as i64)]
    InfiniteRootSystem { r: usize },
    #[error("rank {r} outside supported range {min}..={max}")]
    RankOutOfRange { r: usize, min: usize, max: usize },
    #[error("root enumeration not saturated at bound {bound}: {found} roots, {enlarged} at bound {}", bound + 1)]
    NotSaturated { bound: u32, found: usize, enlarged: usize },
    #[error("matrix is not square of size {expected}")]
    BadShape { expected: usize },
}

/// An element of `H_r`, equivalently a divisor class on the blow-up.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    coeffs: Vec<BigInt>,
}

/// Divisor classes share the lattice representation.
pub type DivisorClass = LatticeVector;

impl LatticeVector {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a lattice vector has at least the h_0 slot");
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(r: usize) -> Self {
        Self { coeffs: vec![BigInt::zero(); r + 1] }
    }

    /// The basis vector `h_index` of `H_r`.
    pub fn basis(r: usize, index: usize) -> Self {
        assert!(index <= r, "basis index {index} out of range for rank {r}");
        let mut v = Self::zero(r);
        v.coeffs[index] = BigInt::one();
        v
    }

    /// `k = 2h_0 - Σ h_i`, the class of `-K/2`.
    pub fn half_anticanonical(r: usize) -> Self {
        let mut coeffs = vec![BigInt::from(-1); r + 1];
        coeffs[0] = BigInt::from(2);
        Self { coeffs }
    }

    /// `K = -4h_0 + 2 Σ h_i`.
    pub fn canonical(r: usize) -> Self {
        let mut coeffs = vec![BigInt::from(2); r + 1];
        coeffs[0] = BigInt::from(-4);
        Self { coeffs }
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> &BigInt {
        &self.coeffs[index]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LatticeError> {
        same_rank(self, other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LatticeError> {
        same_rank(self, other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Coefficients as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

fn same_rank(u: &LatticeVector, v: &LatticeVector) -> Result<(), LatticeError> {
    if u.coeffs.len() != v.coeffs.len() {
        return Err(LatticeError::RankMismatch { left: u.rank(), right: v.rank() });
    }
    Ok(())
}

/// The symmetric form `(u, v) = 2 u_0 v_0 - Σ_{i≥1} u_i v_i`.
pub fn bilinear(u: &LatticeVector, v: &LatticeVector) -> Result<BigInt, LatticeError> {
    same_rank(u, v)?;
    let tail: BigInt = u.coeffs[1..].iter().zip(&v.coeffs[1..]).map(|(a, b)| a * b).sum();
    Ok(BigInt::from(2) * &u.coeffs[0] * &v.coeffs[0] - tail)
}

pub fn qform(u: &LatticeVector) -> BigInt {
    bilinear(u, u).expect("a vector always has its own rank")
}

/// Diagonal entries of the Gram matrix of `H_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GramForm {
    pub rank: usize,
}

impl GramForm {
    pub fn new(rank: usize) -> Self {
        Self { rank }
    }

    pub fn dim(&self) -> usize {
        self.rank + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        match (i == j, i) {
            (false, _) => 0,
            (true, 0) => 2,
            (true, _) => -1,
        }
    }

    /// Signature `(positive, negative)`; the form is diagonal so this is read off directly.
    pub fn signature(&self) -> (usize, usize) {
        (1, self.rank)
    }
}

/// A square integer matrix acting on column coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    dim: usize,
    entries: Vec<BigInt>,
}

impl Isometry {
    pub fn identity(r: usize) -> Self {
        let dim = r + 1;
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        Self { dim, entries }
    }

    /// Builds a candidate from rows without checking the isometry condition.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|row| row.len() != dim) {
            return Err(LatticeError::BadShape { expected: dim });
        }
        Ok(Self { dim, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::from_rows(rows.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// The matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[LatticeVector]) -> Result<Self, LatticeError> {
        let dim = columns.len();
        if columns.iter().any(|c| c.coeffs.len() != dim) {
            return Err(LatticeError::BadShape { expected: dim });
        }
        let mut entries = vec![BigInt::zero(); dim * dim];
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col.coeffs.iter().enumerate() {
                entries[i * dim + j] = x.clone();
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn rank(&self) -> usize {
        self.dim - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(<[BigInt]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> LatticeVector {
        LatticeVector::new((0..self.dim).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn apply(&self, v: &LatticeVector) -> Result<LatticeVector, LatticeError> {
        if v.coeffs.len() != self.dim {
            return Err(LatticeError::RankMismatch { left: self.rank(), right: v.rank() });
        }
        let coeffs =
            self.entries.chunks(self.dim).map(|row| row.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum()).collect();
        Ok(LatticeVector { coeffs })
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self, LatticeError> {
        if self.dim != other.dim {
            return Err(LatticeError::RankMismatch { left: self.rank(), right: other.rank() });
        }
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::identity(self.rank());
        for _ in 0..exp {
            acc = acc.compose(self).expect("same dimension");
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank())
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(Signed::abs).max().unwrap_or_default()
    }
}

/// The reflection `x ↦ x + (x, α) α` in a root `α` with `q(α) = -2`.
pub fn reflection(alpha: &LatticeVector) -> Result<Isometry, LatticeError> {
    let q = qform(alpha);
    if q != BigInt::from(-2) {
        return Err(LatticeError::NotARoot { q });
    }
    let r = alpha.rank();
    let columns: Vec<LatticeVector> = (0..=r)
        .map(|j| {
            let e = LatticeVector::basis(r, j);
            let c = bilinear(&e, alpha).expect("same rank");
            e.add(&alpha.scale(&c)).expect("same rank")
        })
        .collect();
    Isometry::from_columns(&columns)
}

/// True iff `Mᵀ G M = G`.
pub fn is_isometry(m: &Isometry) -> bool {
    let gram = GramForm::new(m.rank());
    let n = m.dim;
    for i in 0..n {
        for j in i..n {
            // (Mᵀ G M)_{ij} = Σ_k G_kk M_ki M_kj
            let mut acc = BigInt::zero();
            for k in 0..n {
                acc += BigInt::from(gram.entry(k, k)) * m.get(k, i) * m.get(k, j);
            }
            if acc != BigInt::from(gram.entry(i, j)) {
                return false;
            }
        }
    }
    true
}

/// Default coefficient box for [`enumerate_roots`].
pub const DEFAULT_ROOT_BOUND: u32 = 6;

/// All `α` with `q(α) = -2` and `(α, k) = 0` whose coefficients lie in
/// `[-bound, bound]`, for the finite cases `5 ≤ r ≤ 7`.
///
/// The result is checked for saturation: the box enlarged by one must
/// produce exactly the same set.
pub fn enumerate_roots(r: usize, bound: u32) -> Result<BTreeSet<LatticeVector>, LatticeError> {
    if r >= 8 {
        return Err(LatticeError::InfiniteRootSystem { r });
    }
    if r < 5 {
        return Err(LatticeError::RankOutOfRange { r, min: 5, max: 7 });
    }
    let roots = roots_in_box(r, bound as i64);
    let enlarged = roots_in_box(r, bound as i64 + 1);
    if roots != enlarged {
        return Err(LatticeError::NotSaturated { bound, found: roots.len(), enlarged: enlarged.len() });
    }
    Ok(roots)
}

/// Box search for `q(α) = -2`, `(α, k) = 0`, i.e. `Σ a_i = -4a_0` and
/// `Σ a_i² = 2a_0² + 2`, pruned on the remaining square budget.
fn roots_in_box(r: usize, bound: i64) -> BTreeSet<LatticeVector> {
    let mut out = BTreeSet::new();
    let mut tail = vec![0i64; r];
    for a0 in -bound..=bound {
        let target_sum = -4 * a0;
        let budget = 2 * a0 * a0 + 2;
        search_tail(&mut tail, 0, bound, target_sum, budget, &mut |t| {
            let mut coeffs = Vec::with_capacity(r + 1);
            coeffs.push(a0);
            coeffs.extend_from_slice(t);
            out.insert(LatticeVector::from_i64s(&coeffs));
        });
    }
    out
}

fn search_tail(
    tail: &mut [i64],
    pos: usize,
    bound: i64,
    sum_left: i64,
    squares_left: i64,
    emit: &mut dyn FnMut(&[i64]),
) {
    let remaining = (tail.len() - pos) as i64;
    if remaining == 0 {
        if sum_left == 0 && squares_left == 0 {
            emit(tail);
        }
        return;
    }
    // Cauchy-Schwarz: (Σ a)² ≤ n Σ a²
    if squares_left < 0 || sum_left * sum_left > remaining * squares_left {
        return;
    }
    for a in -bound..=bound {
        let sq = a * a;
        if sq > squares_left {
            continue;
        }
        tail[pos] = a;
        search_tail(tail, pos + 1, bound, sum_left - a, squares_left - sq, emit);
    }
    tail[pos] = 0;
}

pub(crate) fn bigint_to_json<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    if let Some(v) = x.to_i64() {
        s.serialize_i64(v)
    } else if let Some(v) = x.to_i128() {
        s.serialize_i128(v)
    } else {
        Err(serde::ser::Error::custom(format!("integer {x} exceeds the JSON integer range")))
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&JsonInt(c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<i128> = Vec::deserialize(d)?;
        if raw.is_empty() {
            return Err(serde::de::Error::custom("lattice vector needs at least one coefficient"));
        }
        Ok(Self::new(raw.into_iter().map(BigInt::from).collect()))
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<JsonInt<'_>>> =
            self.entries.chunks(self.dim).map(|row| row.iter().map(JsonInt).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<Vec<i128>> = Vec::deserialize(d)?;
        Self::from_rows(raw.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect())
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) struct JsonInt<'a>(pub &'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        bigint_to_json(self.0, s)
    }
}

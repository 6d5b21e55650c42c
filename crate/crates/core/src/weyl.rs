//! The Weyl group `W(3,r)` of the diagram `T(2,4,r-4)` and its reflection
//! representation on `H_r`.
//!
//! The diagram is the chain `τ_1 - τ_2 - … - τ_{r-1}` with one extra vertex
//! `s` hanging off `τ_4`. Words compose like matrices: the leftmost letter is
//! applied last, so `word_matrix(uv) = word_matrix(u) · word_matrix(v)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{bilinear, reflection, Isometry, LatticeVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("generator {generator} is not valid in rank {r}")]
    InvalidGenerator { generator: Generator, r: usize },
    #[error("cannot parse word token {token:?}")]
    Parse { token: String },
    #[error("rank {r} outside supported range {min}..={max}")]
    RankOutOfRange { r: usize, min: usize, max: usize },
    #[error("group enumeration exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("group enumeration needs about {needed} bytes, budget is {budget}")]
    MemoryBudget { needed: u64, budget: u64 },
    #[error("matrix entry {entry} does not fit the compact element key")]
    EntryOverflow { entry: i64 },
}

/// One of the involutive generators `τ_1, …, τ_{r-1}, s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Tau(usize),
    S,
}

impl Generator {
    pub fn is_valid(self, r: usize) -> bool {
        match self {
            Generator::Tau(i) => (1..r).contains(&i),
            Generator::S => r >= 4,
        }
    }

    /// All generators for rank `r`, in the order `τ_1, …, τ_{r-1}, s`.
    pub fn all(r: usize) -> Vec<Generator> {
        let mut gens: Vec<Generator> = (1..r).map(Generator::Tau).collect();
        gens.push(Generator::S);
        gens
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Tau(i) => write!(f, "t{i}"),
            Generator::S => write!(f, "s"),
        }
    }
}

impl FromStr for Generator {
    type Err = WeylError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        let bad = || WeylError::Parse { token: token.to_string() };
        if token == "s" {
            return Ok(Generator::S);
        }
        let digits = token.strip_prefix('t').ok_or_else(bad)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let i: usize = digits.parse().map_err(|_| bad())?;
        if i == 0 || digits.starts_with('0') {
            return Err(bad());
        }
        Ok(Generator::Tau(i))
    }
}

/// A word in the generators. Words are free; equality in the group is
/// decided by comparing matrices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WeylWord {
    pub letters: Vec<Generator>,
}

impl WeylWord {
    pub fn new(letters: Vec<Generator>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &WeylWord) -> WeylWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        WeylWord { letters }
    }

    pub fn validate(&self, r: usize) -> Result<(), WeylError> {
        match self.letters.iter().find(|g| !g.is_valid(r)) {
            Some(&generator) => Err(WeylError::InvalidGenerator { generator, r }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for WeylWord {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s.split_whitespace().map(str::parse).collect::<Result<_, _>>()?;
        Ok(WeylWord { letters })
    }
}

impl Serialize for WeylWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeylWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub fn simple_root(g: Generator, r: usize) -> Result<LatticeVector, WeylError> {
    if !g.is_valid(r) {
        return Err(WeylError::InvalidGenerator { generator: g, r });
    }
    let mut coeffs = vec![0i64; r + 1];
    match g {
        Generator::Tau(i) => {
            coeffs[i] = 1;
            coeffs[i + 1] = -1;
        }
        Generator::S => {
            coeffs[0] = 1;
            coeffs[1..=4].fill(-1);
        }
    }
    Ok(LatticeVector::from_i64s(&coeffs))
}

pub fn generator_matrix(g: Generator, r: usize) -> Result<Isometry, WeylError> {
    let alpha = simple_root(g, r)?;
    Ok(reflection(&alpha).expect("simple roots have q = -2"))
}

pub fn word_matrix(w: &WeylWord, r: usize) -> Result<Isometry, WeylError> {
    w.validate(r)?;
    let mut acc = Isometry::identity(r);
    for &g in &w.letters {
        acc = acc.compose(&generator_matrix(g, r)?).expect("same rank");
    }
    Ok(acc)
}

pub fn is_identity_element(w: &WeylWord, r: usize) -> Result<bool, WeylError> {
    Ok(word_matrix(w, r)?.is_identity())
}

/// Order of `gh` read off the diagram: 3 on an edge, 2 otherwise.
pub fn coxeter_order(g: Generator, h: Generator) -> u32 {
    let adjacent = match (g, h) {
        (Generator::Tau(i), Generator::Tau(j)) => i.abs_diff(j) == 1,
        (Generator::S, Generator::Tau(i)) | (Generator::Tau(i), Generator::S) => i == 4,
        (Generator::S, Generator::S) => false,
    };
    if adjacent {
        3
    } else {
        2
    }
}

/// Checks `g² = 1` and `(gh)^{m(g,h)} = 1` for the standard generator matrices.
pub fn verify_relations(r: usize) -> Result<bool, WeylError> {
    let gens = Generator::all(r);
    let mats = gens.iter().map(|&g| generator_matrix(g, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(verify_relations_with(&gens, &mats))
}

/// Relation check against caller-supplied matrices, one per generator.
pub fn verify_relations_with(gens: &[Generator], mats: &[Isometry]) -> bool {
    relation_failures(gens, mats).is_empty()
}

/// Every `(g, h, m)` for which `(M_g M_h)^m ≠ 1`; `g = h` encodes `M_g² ≠ 1`.
pub fn relation_failures(gens: &[Generator], mats: &[Isometry]) -> Vec<(Generator, Generator, u32)> {
    assert_eq!(gens.len(), mats.len());
    let mut failures = Vec::new();
    for (a, (&g, mg)) in gens.iter().zip(mats).enumerate() {
        if !mg.compose(mg).map(|m| m.is_identity()).unwrap_or(false) {
            failures.push((g, g, 2));
        }
        for (&h, mh) in gens.iter().zip(mats).skip(a + 1) {
            let m = coxeter_order(g, h);
            let ok = mg.compose(mh).map(|p| p.pow(m).is_identity()).unwrap_or(false);
            if !ok {
                failures.push((g, h, m));
            }
        }
    }
    failures
}

/// Limits for [`enumerate_group`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupLimits {
    pub max_elements: usize,
    pub memory_bytes: u64,
}

impl Default for GroupLimits {
    fn default() -> Self {
        Self { max_elements: 4_000_000, memory_bytes: 8 << 30 }
    }
}

/// Breadth-first closure of the generator matrices; returns the group order.
///
/// Elements are stored as their matrices with entries packed into `i8`
/// (checked), which keeps `W(E_7)` at a few hundred megabytes.
pub fn enumerate_group(r: usize, limits: GroupLimits) -> Result<usize, WeylError> {
    if !(5..=7).contains(&r) {
        return Err(WeylError::RankOutOfRange { r, min: 5, max: 7 });
    }
    let n = r + 1;
    // Packed key, hash-table slot and box header.
    let per_element = (n * n + 48) as u64;
    let needed = per_element.saturating_mul(limits.max_elements as u64);
    if needed > limits.memory_bytes {
        return Err(WeylError::MemoryBudget { needed, budget: limits.memory_bytes });
    }

    let roots: Vec<Vec<i64>> = Generator::all(r)
        .into_iter()
        .map(|g| {
            let alpha = simple_root(g, r).expect("valid generator");
            alpha.coeffs().iter().map(|c| c.to_i64().expect("small")).collect()
        })
        .collect();

    let identity: Box<[i8]> = (0..n * n).map(|idx| i8::from(idx % (n + 1) == 0)).collect();
    let mut seen: HashSet<Box<[i8]>> = HashSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    let mut column = vec![0i64; n];

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for element in &frontier {
            for alpha in &roots {
                let child = reflect_columns(element, alpha, n, &mut column)?;
                if !seen.contains(&child) {
                    if seen.len() >= limits.max_elements {
                        return Err(WeylError::CapExceeded { cap: limits.max_elements });
                    }
                    seen.insert(child.clone());
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.len())
}

/// Left multiplication by the reflection in `alpha`: every column `x` of the
/// matrix becomes `x + (x, α) α`.
fn reflect_columns(m: &[i8], alpha: &[i64], n: usize, column: &mut [i64]) -> Result<Box<[i8]>, WeylError> {
    let mut out = vec![0i8; n * n];
    for j in 0..n {
        for i in 0..n {
            column[i] = m[i * n + j] as i64;
        }
        let pairing = 2 * column[0] * alpha[0] - (1..n).map(|i| column[i] * alpha[i]).sum::<i64>();
        for i in 0..n {
            let entry = column[i] + pairing * alpha[i];
            out[i * n + j] = i8::try_from(entry).map_err(|_| WeylError::EntryOverflow { entry })?;
        }
    }
    Ok(out.into_boxed_slice())
}

/// Pairing of two simple roots; `±1` exactly on diagram edges.
pub fn root_pairing(g: Generator, h: Generator, r: usize) -> Result<BigInt, WeylError> {
    Ok(bilinear(&simple_root(g, r)?, &simple_root(h, r)?).expect("same rank"))
}

//! Parameter vectors, Bernoulli bit vectors and permutations of `{0..n}`.

use std::ops::Index;

use crate::error::{Error, Result};

/// A parameter vector in `[0,1]^n` (the private draws `x` and `y`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("parameter entry {bad} outside [0,1]")));
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_unchecked(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl Index<usize> for ParamVector {
    type Output = f64;
    fn index(&self, idx: usize) -> &f64 {
        &self.0[idx]
    }
}

/// A vector of bits (`i`, `j`, or a codeword).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("bit vector entries must be 0 or 1"));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub(crate) fn from_unchecked(bits: Vec<u8>) -> Self {
        Self(bits)
    }

    /// Builds an `n`-bit vector with ones at `support`.
    pub fn from_support(n: usize, support: &[usize]) -> Self {
        let mut bits = vec![0; n];
        for &s in support {
            bits[s] = 1;
        }
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// `|i|`, the number of ones.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b == 1).map(|(s, _)| s)
    }

    /// `i · j`.
    pub fn dot(&self, other: &BitVector) -> usize {
        self.0.iter().zip(&other.0).map(|(&a, &b)| (a & b) as usize).sum()
    }
}

impl Index<usize> for BitVector {
    type Output = u8;
    fn index(&self, idx: usize) -> &u8 {
        &self.0[idx]
    }
}

/// A bijection `σ` on `{0, …, n-1}`.
///
/// Acting on a vector, `σ(v)` moves the entry at position `u` to position
/// `σ(u)`, so `σ⁻¹(v)[s] = v[σ(s)]`. Under this action, if the support of `v`
/// lies inside the image set `σ(I₀)` then `σ⁻¹(v)` is supported on `I₀`.
/// For any `σ`, `a · σ⁻¹(b) = σ(a) · b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    forward: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { forward: (0..n as u32).collect() }
    }

    /// Builds `σ` from its image table, `mapping[u] = σ(u)`.
    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(Error::invalid("mapping is not a bijection"));
            }
        }
        Ok(Self { forward: mapping.into_iter().map(|m| m as u32).collect() })
    }

    pub(crate) fn from_forward_unchecked(forward: Vec<u32>) -> Self {
        Self { forward }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// `σ(u)`.
    #[inline]
    pub fn image(&self, u: usize) -> usize {
        self.forward[u] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(u, &m)| u == m as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.forward.len()];
        for (u, &m) in self.forward.iter().enumerate() {
            inv[m as usize] = u as u32;
        }
        Self { forward: inv }
    }

    /// `self ∘ other`, i.e. `u ↦ self(other(u))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self { forward: other.forward.iter().map(|&m| self.forward[m as usize]).collect() })
    }

    /// The image set `σ({0, …, m-1})`, in order of the preimages.
    pub fn image_of_prefix(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        self.forward[..m].iter().map(|&v| v as usize)
    }

    /// `σ(v)`.
    pub fn apply<T: Copy + Default>(&self, v: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), v.len())?;
        let mut out = vec![T::default(); v.len()];
        for (u, &m) in self.forward.iter().enumerate() {
            out[m as usize] = v[u];
        }
        Ok(out)
    }

    /// `σ⁻¹(v)`.
    pub fn apply_inverse<T: Copy>(&self, v: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), v.len())?;
        Ok(self.forward.iter().map(|&m| v[m as usize]).collect())
    }

    /// `a · σ⁻¹(b)` without materializing the permuted vector.
    pub fn dot_inverse(&self, a: &[f64], b: &[u8]) -> Result<f64> {
        check_len(self.len(), a.len())?;
        check_len(self.len(), b.len())?;
        Ok(self
            .forward
            .iter()
            .zip(a)
            .map(|(&m, &av)| av * b[m as usize] as f64)
            .sum())
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

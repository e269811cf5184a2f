//! Dihedral parameters and mixed-radix state indexing.
//!
//! A problem instance lives on k registers, each holding one bit and one
//! integer mod N. States are indexed with the bits grouped in front:
//! `|b_1,...,b_k, x_1,...,x_k>`, bits most significant and register 1
//! outermost, so index = bits_value * N^k + ints_value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on state-vector length (amplitude count).
pub const DEFAULT_AMPLITUDE_BUDGET: usize = 1 << 24;

/// The pair (N, k) plus derived dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralParams {
    n: u64,
    k: usize,
    full_dim: usize,
    block_dim: usize,
    budget: usize,
}

impl DihedralParams {
    /// Construct with the default amplitude budget.
    pub fn new(n: u64, k: usize) -> Result<Self> {
        Self::with_budget(n, k, DEFAULT_AMPLITUDE_BUDGET)
    }

    /// Construct with an explicit amplitude budget. Fails if N < 2, k < 1,
    /// or (2N)^k exceeds the budget.
    pub fn with_budget(n: u64, k: usize, budget: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("N must be >= 2, got {n}")));
        }
        if k < 1 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        let mut full_dim: u128 = 1;
        for _ in 0..k {
            full_dim *= 2 * n as u128;
            if full_dim > budget as u128 {
                return Err(Error::ResourceLimit(format!(
                    "(2N)^k = (2*{n})^{k} exceeds the amplitude budget {budget}"
                )));
            }
        }
        let block_dim = 1usize << k;
        Ok(Self {
            n,
            k,
            full_dim: full_dim as usize,
            block_dim,
            budget,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// (2N)^k, the dimension of the full state space.
    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// 2^k, the dimension of the bit registers.
    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// N^k, the dimension of the integer registers.
    pub fn int_dim(&self) -> usize {
        self.full_dim >> self.k
    }

    /// Mixed-radix value of an integer-register tuple (register 1 outermost).
    pub fn ints_value(&self, ints: &[u64]) -> Result<usize> {
        if ints.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: ints.len(),
            });
        }
        let mut value = 0usize;
        for &x in ints {
            if x >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "integer register value {x} out of range [0, {})",
                    self.n
                )));
            }
            value = value * self.n as usize + x as usize;
        }
        Ok(value)
    }

    /// Inverse of [`ints_value`](Self::ints_value).
    pub fn ints_from_value(&self, mut value: usize) -> Vec<u64> {
        let mut ints = vec![0u64; self.k];
        for slot in ints.iter_mut().rev() {
            *slot = (value % self.n as usize) as u64;
            value /= self.n as usize;
        }
        ints
    }
}

/// A standard basis label: k bits and k integers mod N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateIndex {
    pub bits: Vec<u8>,
    pub ints: Vec<u64>,
}

impl StateIndex {
    pub fn new(bits: Vec<u8>, ints: Vec<u64>) -> Self {
        Self { bits, ints }
    }
}

/// Pack a bit vector (b_1 first) into a mask with b_1 most significant,
/// so ascending masks follow the canonical lexicographic order.
pub fn bits_to_mask(bits: &[u8]) -> Result<u32> {
    if bits.len() > 24 {
        return Err(Error::ResourceLimit(format!(
            "bit vectors limited to k <= 24, got {}",
            bits.len()
        )));
    }
    let mut mask = 0u32;
    for &b in bits {
        if b > 1 {
            return Err(Error::InvalidArgument(format!("bit value {b} not in {{0,1}}")));
        }
        mask = (mask << 1) | b as u32;
    }
    Ok(mask)
}

/// Inverse of [`bits_to_mask`].
pub fn mask_to_bits(mask: u32, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((mask >> (k - 1 - i)) & 1) as u8).collect()
}

/// Encode a [`StateIndex`] into [0, full_dim).
pub fn index_encode(idx: &StateIndex, params: &DihedralParams) -> Result<usize> {
    if idx.bits.len() != params.k() {
        return Err(Error::DimensionMismatch {
            expected: params.k(),
            actual: idx.bits.len(),
        });
    }
    let mask = bits_to_mask(&idx.bits)? as usize;
    let ints = params.ints_value(&idx.ints)?;
    Ok(mask * params.int_dim() + ints)
}

/// Decode a flat index back into bits and integers.
pub fn index_decode(value: usize, params: &DihedralParams) -> Result<StateIndex> {
    if value >= params.full_dim() {
        return Err(Error::InvalidArgument(format!(
            "index {value} out of range [0, {})",
            params.full_dim()
        )));
    }
    let mask = (value / params.int_dim()) as u32;
    let ints = params.ints_from_value(value % params.int_dim());
    Ok(StateIndex::new(mask_to_bits(mask, params.k()), ints))
}

/// Flat index from a (mask, ints-value) pair; the hot path used by the
/// state and basis modules.
#[inline]
pub fn flat_index(mask: u32, ints_value: usize, params: &DihedralParams) -> usize {
    mask as usize * params.int_dim() + ints_value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_recomputed_at_construction() {
        let p = DihedralParams::new(3, 2).unwrap();
        assert_eq!(p.full_dim(), 36);
        assert_eq!(p.block_dim(), 4);
        assert_eq!(p.int_dim(), 9);
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(
            DihedralParams::with_budget(2, 13, 1 << 24),
            Err(Error::ResourceLimit(_))
        ));
        // 4^12 = 2^24 is exactly at the budget.
        assert!(DihedralParams::with_budget(2, 12, 1 << 24).is_ok());
    }

    #[test]
    fn rejects_degenerate_params() {
        assert!(DihedralParams::new(1, 2).is_err());
        assert!(DihedralParams::new(4, 0).is_err());
    }

    #[test]
    fn encode_all_zero_is_zero() {
        let p = DihedralParams::new(3, 2).unwrap();
        let idx = StateIndex::new(vec![0, 0], vec![0, 0]);
        assert_eq!(index_encode(&idx, &p).unwrap(), 0);
    }

    #[test]
    fn encode_bits_major() {
        // N=2, k=1: value = b*N + x.
        let p = DihedralParams::new(2, 1).unwrap();
        let idx = StateIndex::new(vec![1], vec![0]);
        assert_eq!(index_encode(&idx, &p).unwrap(), 2);
    }

    #[test]
    fn encode_decode_round_trip() {
        let p = DihedralParams::new(3, 2).unwrap();
        let idx = StateIndex::new(vec![0, 1], vec![2, 0]);
        let v = index_encode(&idx, &p).unwrap();
        // Independent mixed-radix evaluation: bits (0,1) -> 1, ints (2,0) -> 6.
        assert_eq!(v, 1 * 9 + 6);
        assert_eq!(index_decode(v, &p).unwrap(), idx);
    }

    #[test]
    fn out_of_range_component_rejected() {
        let p = DihedralParams::new(3, 2).unwrap();
        let idx = StateIndex::new(vec![0, 1], vec![3, 0]);
        assert!(index_encode(&idx, &p).is_err());
        let idx = StateIndex::new(vec![0, 2], vec![1, 0]);
        assert!(index_encode(&idx, &p).is_err());
        assert!(index_decode(36, &p).is_err());
    }
}

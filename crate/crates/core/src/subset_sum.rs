//! Subset-sum instances, solution enumeration, and density bookkeeping.
//!
//! A bit vector b is packed into a `u32` mask with b_1 most significant
//! (see [`crate::params::bits_to_mask`]), so ascending masks follow the
//! canonical lexicographic order used everywhere for solution lists.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DihedralParams;

/// Hard cap for brute-force enumeration.
pub const ENUMERATION_MAX_K: usize = 24;

/// A subset-sum instance (l, p) over Z_N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumInstance {
    pub l: Vec<u64>,
    pub p: u64,
    pub params: DihedralParams,
}

impl SubsetSumInstance {
    pub fn new(l: Vec<u64>, p: u64, params: &DihedralParams) -> Result<Self> {
        if l.len() != params.k() {
            return Err(Error::DimensionMismatch {
                expected: params.k(),
                actual: l.len(),
            });
        }
        if l.iter().any(|&x| x >= params.n()) || p >= params.n() {
            return Err(Error::InvalidArgument(format!(
                "instance components must lie in [0, {})",
                params.n()
            )));
        }
        Ok(Self {
            l,
            p,
            params: params.clone(),
        })
    }

    /// The density k / log2(N).
    pub fn density(&self) -> f64 {
        density(&self.params)
    }
}

/// All solutions of one instance, canonically ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub instance: SubsetSumInstance,
    /// Masks b with b.l = p (mod N), strictly ascending.
    pub solutions: Vec<u32>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Position of a mask in the canonical ordering.
    pub fn position_of(&self, mask: u32) -> Option<usize> {
        self.solutions.binary_search(&mask).ok()
    }
}

/// b . l mod N for a packed bit mask.
#[inline]
pub fn mask_dot(mask: u32, l: &[u64], n: u64) -> u64 {
    let k = l.len();
    let mut acc = 0u64;
    for (i, &li) in l.iter().enumerate() {
        if (mask >> (k - 1 - i)) & 1 == 1 {
            acc += li;
        }
    }
    acc % n
}

/// Brute-force scan of all 2^k bit vectors.
///
/// Zero-solution instances return an empty set rather than an error.
pub fn enumerate_solutions(instance: &SubsetSumInstance) -> Result<SolutionSet> {
    let buckets = solution_buckets(&instance.l, &instance.params)?;
    Ok(SolutionSet {
        instance: instance.clone(),
        solutions: buckets[instance.p as usize].clone(),
    })
}

/// All solution lists for a fixed l at once: bucket[p] holds the masks b
/// with b.l = p (mod N), canonically ordered. One 2^k pass with an
/// incremental subset-sum table.
pub fn solution_buckets(l: &[u64], params: &DihedralParams) -> Result<Vec<Vec<u32>>> {
    let k = params.k();
    if k > ENUMERATION_MAX_K {
        return Err(Error::ResourceLimit(format!(
            "brute-force enumeration limited to k <= {ENUMERATION_MAX_K}, got {k}"
        )));
    }
    if l.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            actual: l.len(),
        });
    }
    let n = params.n();
    let size = 1usize << k;
    let mut sums = vec![0u64; size];
    let mut buckets = vec![Vec::new(); n as usize];
    buckets[0].push(0);
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let reg = k - 1 - low;
        sums[mask] = (sums[mask & (mask - 1)] + l[reg]) % n;
        buckets[sums[mask] as usize].push(mask as u32);
    }
    Ok(buckets)
}

/// Draw l uniform in Z_N^k and a witness b uniform in {0,1}^k; p = b.l.
pub fn random_instance<R: Rng + ?Sized>(
    params: &DihedralParams,
    rng: &mut R,
) -> (Vec<u64>, u32, u64) {
    let l: Vec<u64> = (0..params.k()).map(|_| rng.random_range(0..params.n())).collect();
    let b = rng.random_range(0..params.block_dim() as u32);
    let p = mask_dot(b, &l, params.n());
    (l, b, p)
}

/// True iff b'.l = b.l (mod N) and b' != b.
pub fn verify_collision(l: &[u64], b: u32, b_prime: u32, n: u64) -> bool {
    b != b_prime && mask_dot(b, l, n) == mask_dot(b_prime, l, n)
}

/// Density k / log2(N).
pub fn density(params: &DihedralParams) -> f64 {
    params.k() as f64 / (params.n() as f64).log2()
}

/// Register count ceil(log2(N) + c * log2(log2(N))) used by the
/// collision-experiment sizing.
pub fn k_for_density(n: u64, c: f64) -> usize {
    let log_n = (n as f64).log2();
    (log_n + c * log_n.log2()).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::mask_to_bits;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst(n: u64, l: &[u64], p: u64) -> SubsetSumInstance {
        let params = DihedralParams::new(n, l.len()).unwrap();
        SubsetSumInstance::new(l.to_vec(), p, &params).unwrap()
    }

    /// Independent check: direct scan with per-mask dot products.
    fn brute_force(l: &[u64], p: u64, n: u64) -> Vec<u32> {
        (0..1u32 << l.len())
            .filter(|&m| mask_dot(m, l, n) == p)
            .collect()
    }

    #[test]
    fn two_solution_instance() {
        let s = enumerate_solutions(&inst(2, &[1, 1], 0)).unwrap();
        assert_eq!(s.solutions, vec![0b00, 0b11]);
        assert_eq!(mask_to_bits(s.solutions[1], 2), vec![1, 1]);
    }

    #[test]
    fn all_zero_l_accepts_everything() {
        let s = enumerate_solutions(&inst(5, &[0, 0, 0], 0)).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.solutions, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn singleton_instance() {
        let s = enumerate_solutions(&inst(7, &[1, 2, 3], 0)).unwrap();
        assert_eq!(s.solutions, vec![0]);
    }

    #[test]
    fn empty_instance_is_not_an_error() {
        let s = enumerate_solutions(&inst(2, &[0, 0], 1)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn enumeration_budget() {
        let params = DihedralParams::with_budget(2, 25, usize::MAX).unwrap();
        let i = SubsetSumInstance::new(vec![0; 25], 0, &params).unwrap();
        assert!(matches!(
            enumerate_solutions(&i),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn matches_independent_scan_on_random_instances() {
        let choices = [2u64, 3, 5, 8, 13, 16];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = choices[rng.random_range(0..choices.len())];
            let k = rng.random_range(1..=12usize);
            let params = DihedralParams::with_budget(n, k, usize::MAX).unwrap();
            let (l, b, p) = random_instance(&params, &mut rng);
            let s = enumerate_solutions(&SubsetSumInstance::new(l.clone(), p, &params).unwrap())
                .unwrap();
            assert_eq!(s.solutions, brute_force(&l, p, n));
            // Witness always present, ordering strictly increasing.
            assert!(s.position_of(b).is_some());
            assert!(s.solutions.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn collision_examples() {
        assert!(!verify_collision(&[1, 1], 0b00, 0b00, 2));
        assert!(verify_collision(&[1, 1], 0b00, 0b11, 2));
        assert!(!verify_collision(&[1, 2, 3], 0b000, 0b110, 7));
    }

    #[test]
    fn random_instance_is_self_consistent_and_reproducible() {
        let params = DihedralParams::new(5, 4).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let (l, b, p) = random_instance(&params, &mut r1);
            assert_eq!((l.clone(), b, p), random_instance(&params, &mut r2));
            assert_eq!(mask_dot(b, &l, 5), p);
        }
    }

    #[test]
    fn marginals_are_uniform() {
        // Each l_i count is Binomial(draws, 1/N); check 4 sigma per cell.
        let params = DihedralParams::new(5, 3).unwrap();
        let draws = 100_000usize;
        let mut counts = vec![[0usize; 5]; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..draws {
            let (l, _, _) = random_instance(&params, &mut rng);
            for (i, &x) in l.iter().enumerate() {
                counts[i][x as usize] += 1;
            }
        }
        let p = 1.0 / 5.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for reg in &counts {
            for &c in reg {
                assert!((c as f64 - draws as f64 * p).abs() <= 4.0 * sigma);
            }
        }
    }

    #[test]
    fn density_values() {
        assert_eq!(density(&DihedralParams::new(1024, 10).unwrap()), 1.0);
        assert_eq!(density(&DihedralParams::new(2, 2).unwrap()), 2.0);
        assert_eq!(k_for_density(256, 1.0), 11);
    }
}

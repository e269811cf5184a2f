//! Collision algorithms, the coset-space measurement, and the
//! bit-extraction demo.
//!
//! Both collision algorithms operate on one (l, p) block of the labeled
//! basis: the input |b> |chi_l> decomposes over the block's |T| vectors,
//! so a trial costs O(|T|) regardless of the full dimension. Sampled
//! execution draws the intermediate measurement outcome; exact execution
//! enumerates every branch instead and never samples.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::basis::{build_coset_state, CosetStateSpec, LabeledBasis};
use crate::error::{Error, Result};
use crate::params::{flat_index, DihedralParams};
use crate::state::{tensor_registers, DenseState};
use crate::subset_sum::{mask_dot, verify_collision};
use crate::unitary::{BasisChangeUnitary, IndicatorUnitary};

/// Which intermediate outcome a trial measured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Transcript {
    /// Algorithm with a full standard-basis measurement: the basis label
    /// the state collapsed to.
    StandardLabel { l: Vec<u64>, p: u64, m: usize },
    /// Algorithm with an indicator measurement: the measured bit.
    Indicator { bit: u8 },
}

/// Result of one sampled trial.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub b_prime: u32,
    pub t_size: usize,
    pub success: bool,
    pub transcript: Transcript,
}

/// Exact distribution over returned bit vectors.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    /// (mask, probability) over the block's solution list; every other
    /// mask has probability exactly zero.
    pub support: Vec<(u32, f64)>,
    pub t_size: usize,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.support.iter().map(|&(_, p)| p).sum()
    }

    /// P(b' != b).
    pub fn success_prob(&self, b: u32) -> f64 {
        self.support
            .iter()
            .filter(|&&(mask, _)| mask != b)
            .map(|&(_, p)| p)
            .sum()
    }

    pub fn prob_of(&self, mask: u32) -> f64 {
        self.support
            .iter()
            .find(|&&(m, _)| m == mask)
            .map_or(0.0, |&(_, p)| p)
    }
}

/// Either collision unitary, for the shared exact-distribution entry point.
pub enum CollisionUnitary<'a> {
    Standard(&'a BasisChangeUnitary),
    Indicator(&'a IndicatorUnitary),
}

struct Block<'a> {
    vectors: &'a [crate::basis::BasisVector],
    j0: usize,
    t_size: usize,
    masks: Vec<u32>,
}

fn input_block<'a>(basis: &'a LabeledBasis, l: &[u64], b: u32) -> Result<Block<'a>> {
    let params = basis.params();
    if l.len() != params.k() {
        return Err(Error::DimensionMismatch {
            expected: params.k(),
            actual: l.len(),
        });
    }
    let p = mask_dot(b, l, params.n());
    let l_value = params.ints_value(l)?;
    let vectors = basis.block(l_value, p);
    if vectors.is_empty() {
        return Err(Error::EmptySolutionSet { l: l.to_vec(), p });
    }
    let masks: Vec<u32> = vectors[0].support.iter().map(|&(m, _)| m).collect();
    let j0 = masks
        .iter()
        .position(|&m| m == b)
        .ok_or_else(|| Error::InvalidArgument(format!("b = {b} is not a solution for its block")))?;
    Ok(Block {
        vectors,
        j0,
        t_size: masks.len(),
        masks,
    })
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        draw -= w;
        if draw <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// One sampled run of the standard-basis collision algorithm: prepare
/// |b, l>, Fourier the integer registers, apply U_S, measure, undo U_S,
/// measure the first register.
pub fn algorithm1<R: Rng + ?Sized>(
    l: &[u64],
    b: u32,
    u: &BasisChangeUnitary,
    rng: &mut R,
) -> Result<Outcome> {
    let block = input_block(u.basis(), l, b)?;
    // |b^(j0), chi_l> = sum_m conj(v_m[j0]) |v_m>; measuring after U_S
    // samples a block label with that weight.
    let weights: Vec<f64> = block
        .vectors
        .iter()
        .map(|v| v.support[block.j0].1.norm_sqr())
        .collect();
    let measured = sample_index(&weights, rng);
    let v = &block.vectors[measured];
    // Undoing U_S leaves |v>; the first register then lands on b^(j) with
    // weight |v[j]|^2.
    let bit_weights: Vec<f64> = v.support.iter().map(|&(_, a)| a.norm_sqr()).collect();
    let b_prime = block.masks[sample_index(&bit_weights, rng)];
    Ok(Outcome {
        b_prime,
        t_size: block.t_size,
        success: verify_collision(l, b, b_prime, u.basis().params().n()),
        transcript: Transcript::StandardLabel {
            l: v.label.l.clone(),
            p: v.label.p,
            m: v.label.m,
        },
    })
}

/// Post-indicator-1 collapsed block state: the input minus its m = 0
/// component, normalized. Identical for every tilde family because the
/// m = 0 vector never rotates.
fn residual_block_state(block: &Block<'_>) -> Vec<Complex64> {
    let v0 = &block.vectors[0];
    let c0 = v0.support[block.j0].1.conj();
    let mut w: Vec<Complex64> = v0.support.iter().map(|&(_, a)| -(c0 * a)).collect();
    w[block.j0] += Complex64::ONE;
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut w {
        *z /= norm;
    }
    w
}

/// One sampled run of the indicator collision algorithm: as above but U_C
/// is applied and only the indicator qubit is measured before undoing.
pub fn algorithm2<R: Rng + ?Sized>(
    l: &[u64],
    b: u32,
    u: &IndicatorUnitary,
    rng: &mut R,
) -> Result<Outcome> {
    let block = input_block(u.basis(), l, b)?;
    let v0 = &block.vectors[0];
    debug_assert_eq!(v0.label.m, 0);
    let q0 = v0.support[block.j0].1.norm_sqr();
    let bit = u8::from(rng.random::<f64>() >= q0);
    let bit_weights: Vec<f64> = if bit == 0 {
        v0.support.iter().map(|&(_, a)| a.norm_sqr()).collect()
    } else {
        residual_block_state(&block)
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    };
    let b_prime = block.masks[sample_index(&bit_weights, rng)];
    Ok(Outcome {
        b_prime,
        t_size: block.t_size,
        success: verify_collision(l, b, b_prime, u.basis().params().n()),
        transcript: Transcript::Indicator { bit },
    })
}

/// Exact outcome distribution by exhaustive enumeration of the
/// intermediate measurement branches. No sampling.
pub fn exact_outcome_distribution(
    l: &[u64],
    b: u32,
    u: &CollisionUnitary<'_>,
) -> Result<OutcomeDistribution> {
    let basis = match u {
        CollisionUnitary::Standard(us) => us.basis(),
        CollisionUnitary::Indicator(uc) => uc.basis(),
    };
    let block = input_block(basis, l, b)?;
    let mut probs = vec![0.0f64; block.t_size];
    match u {
        CollisionUnitary::Standard(_) => {
            // Branch over the measured block label.
            for v in block.vectors {
                let branch = v.support[block.j0].1.norm_sqr();
                if branch == 0.0 {
                    continue;
                }
                for (slot, &(_, a)) in probs.iter_mut().zip(&v.support) {
                    *slot += branch * a.norm_sqr();
                }
            }
        }
        CollisionUnitary::Indicator(_) => {
            // Branch over the indicator bit.
            let v0 = &block.vectors[0];
            let q0 = v0.support[block.j0].1.norm_sqr();
            for (slot, &(_, a)) in probs.iter_mut().zip(&v0.support) {
                *slot += q0 * a.norm_sqr();
            }
            if block.t_size > 1 {
                let w = residual_block_state(&block);
                for (slot, z) in probs.iter_mut().zip(&w) {
                    *slot += (1.0 - q0) * z.norm_sqr();
                }
            }
        }
    }
    Ok(OutcomeDistribution {
        support: block.masks.iter().copied().zip(probs).collect(),
        t_size: block.t_size,
    })
}

/// Exact distribution for Algorithm 1 executed in dense-matrix mode:
/// materialized U_S, explicit state vectors, exhaustive enumeration of the
/// standard-basis measurement. Cross-validation only.
pub fn dense_mode_distribution_alg1(
    l: &[u64],
    b: u32,
    u: &BasisChangeUnitary,
    params: &DihedralParams,
) -> Result<OutcomeDistribution> {
    let m = crate::unitary::materialize_us(u, params)?;
    let lv = params.ints_value(l)?;
    let prepared = crate::state::HybridState::basis_state(params, b, l)?.to_dense();
    let vec = nalgebra::DVector::from_column_slice(prepared.amplitudes());
    let after = &m * vec;

    let int_dim = params.int_dim();
    let mut by_mask = vec![0.0f64; params.block_dim()];
    let adj = m.adjoint();
    for z in 0..params.full_dim() {
        let branch = after[z].norm_sqr();
        if branch < 1e-300 {
            continue;
        }
        // Collapse to |z>, undo U_S, then measure the bit registers.
        let col = adj.column(z);
        for mask in 0..params.block_dim() {
            let mut weight = 0.0;
            for x in 0..int_dim {
                weight += col[mask * int_dim + x].norm_sqr();
            }
            by_mask[mask] += branch * weight;
        }
    }
    let _ = lv;
    let support: Vec<(u32, f64)> = by_mask
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > 1e-13)
        .map(|(mask, &p)| (mask as u32, p))
        .collect();
    let t_size = support.len();
    Ok(OutcomeDistribution { support, t_size })
}

/// Measurement verdict of the coset-space projector pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    InC,
    InCPerp,
}

#[derive(Debug, Clone)]
pub struct DcspMeasurement {
    pub verdict: Verdict,
    /// ||Pi_C state||^2, the exact branch probability.
    pub prob_in_c: f64,
    pub collapsed: DenseState,
}

/// ||Pi_C state||^2 for the span of the m = 0 family.
pub fn prob_in_c(state: &DenseState, b0: &LabeledBasis) -> Result<f64> {
    let coeffs = b0_overlaps(state, b0)?;
    Ok(coeffs.iter().map(|(_, c)| c.norm_sqr()).sum())
}

fn b0_overlaps<'a>(
    state: &DenseState,
    b0: &'a LabeledBasis,
) -> Result<Vec<(&'a crate::basis::BasisVector, Complex64)>> {
    let params = b0.params();
    if state.params().full_dim() != params.full_dim() {
        return Err(Error::DimensionMismatch {
            expected: params.full_dim(),
            actual: state.params().full_dim(),
        });
    }
    let hybrid = state.to_hybrid();
    let amps = hybrid.amplitudes();
    b0.iter_b0()
        .map(|v| {
            let lv = params.ints_value(&v.label.l)?;
            let c: Complex64 = v
                .support
                .iter()
                .map(|&(mask, a)| a.conj() * amps[flat_index(mask, lv, params)])
                .sum();
            Ok((v, c))
        })
        .collect()
}

/// Projective measurement {Pi_C, Pi_Cperp}: samples the verdict with the
/// exact branch probability and returns the normalized post-measurement
/// state.
pub fn dcsp_measure<R: Rng + ?Sized>(
    state: &DenseState,
    b0: &LabeledBasis,
    rng: &mut R,
) -> Result<DcspMeasurement> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "dcsp_measure expects a unit state, got norm {norm}"
        )));
    }
    let params = b0.params();
    let overlaps = b0_overlaps(state, b0)?;
    let p_c: f64 = overlaps.iter().map(|(_, c)| c.norm_sqr()).sum();
    let in_c = rng.random::<f64>() < p_c;

    let mut projected = crate::state::HybridState::zero(params);
    for (v, c) in &overlaps {
        let lv = params.ints_value(&v.label.l)?;
        for &(mask, a) in &v.support {
            projected.amplitudes_mut()[flat_index(mask, lv, params)] += c * a;
        }
    }
    let collapsed = if in_c {
        let mut s = projected.to_dense();
        s.normalize()?;
        s
    } else {
        let mut s = projected.to_dense();
        let mut amps = state.amplitudes().to_vec();
        for (slot, proj) in amps.iter_mut().zip(s.amplitudes_mut().iter()) {
            *slot -= proj;
        }
        let mut s = DenseState::from_amplitudes(state.params(), amps)?;
        s.normalize()?;
        s
    };
    Ok(DcspMeasurement {
        verdict: if in_c { Verdict::InC } else { Verdict::InCPerp },
        prob_in_c: p_c,
        collapsed,
    })
}

/// Decision-problem sizing: k = ceil(log2(2N)) + k'.
#[derive(Debug, Clone)]
pub struct DcspParams {
    pub params: DihedralParams,
    pub kprime: usize,
}

impl DcspParams {
    pub fn new(n: u64, kprime: usize) -> Result<Self> {
        Self::with_budget(n, kprime, crate::params::DEFAULT_AMPLITUDE_BUDGET)
    }

    pub fn with_budget(n: u64, kprime: usize, budget: usize) -> Result<Self> {
        if kprime < 1 {
            return Err(Error::InvalidArgument("k' must be >= 1".into()));
        }
        let k = ceil_log2(2 * n) + kprime;
        Ok(Self {
            params: DihedralParams::with_budget(n, k, budget)?,
            kprime,
        })
    }

    /// P(verdict = InCperp | uniform standard input) >= 1 - this bound.
    pub fn false_accept_bound(&self) -> f64 {
        1.0 / 2f64.powi(self.kprime as i32 + 1)
    }
}

fn ceil_log2(m: u64) -> usize {
    (64 - (m - 1).leading_zeros()) as usize
}

/// Supplies fresh single-register coset states for a hidden d, with an
/// optional budget.
pub struct CosetOracle {
    d: u64,
    n: u64,
    remaining: Option<usize>,
    consumed: usize,
}

impl CosetOracle {
    pub fn new(d: u64, n: u64, budget: Option<usize>) -> Result<Self> {
        if d >= n {
            return Err(Error::InvalidArgument(format!("d = {d} out of range")));
        }
        Ok(Self {
            d,
            n,
            remaining: budget,
            consumed: 0,
        })
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    /// (|0, x> + |1, x + d>)/sqrt(2) with fresh uniform x.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<DenseState> {
        if let Some(rem) = &mut self.remaining {
            if *rem == 0 {
                return Err(Error::OracleExhausted {
                    consumed: self.consumed,
                });
            }
            *rem -= 1;
        }
        self.consumed += 1;
        let x = rng.random_range(0..self.n);
        let params = DihedralParams::new(self.n, 1)?;
        build_coset_state(&CosetStateSpec::new(self.d, vec![x]), &params)
    }
}

/// |b, y> -> |b, y - b*amount mod N> on a single-register state.
fn subtract_conditional(state: &DenseState, amount: u64) -> DenseState {
    let params = state.params();
    let n = params.n() as usize;
    let amount = (amount % params.n()) as usize;
    let mut out = DenseState::zero(params);
    for (idx, &amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (b, y) = (idx / n, idx % n);
        let target = if b == 1 { (y + n - amount) % n } else { y };
        out.amplitudes_mut()[b * n + target] = amp;
    }
    out
}

/// Projective measurement of bit `bit` of the integer register of a
/// single-register state. Returns the observed value and the collapsed
/// state.
fn measure_int_bit<R: Rng + ?Sized>(
    state: &DenseState,
    bit: usize,
    rng: &mut R,
) -> Result<(u8, DenseState)> {
    let params = state.params();
    let n = params.n() as usize;
    let mut p_one = 0.0;
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if (idx % n) >> bit & 1 == 1 {
            p_one += amp.norm_sqr();
        }
    }
    let observed = u8::from(rng.random::<f64>() < p_one);
    let mut amps = state.amplitudes().to_vec();
    for (idx, slot) in amps.iter_mut().enumerate() {
        if ((idx % n) >> bit & 1) as u8 != observed {
            *slot = Complex64::ZERO;
        }
    }
    let mut collapsed = DenseState::from_amplitudes(params, amps)?;
    collapsed.normalize()?;
    Ok((observed, collapsed))
}

const MAX_MAJORITY_BATCHES: usize = 16;

/// Recover the hidden d bit by bit: for bit i, subtract the known low
/// bits (conditioned on the bit register), measure the (i+1)-th least
/// significant integer bit of each register, and ask the coset-space
/// measurement whether the joint state is still a coset state. Each call
/// consumes k fresh oracle states; bits are decided by strict majority
/// over `repeats` calls (a tie adds one more batch).
pub fn dcp_solve<R: Rng + ?Sized>(
    oracle: &mut CosetOracle,
    dcsp: &DcspParams,
    repeats: usize,
    rng: &mut R,
) -> Result<u64> {
    let n = dcsp.params.n();
    if !n.is_power_of_two() {
        return Err(Error::InvalidArgument(
            "the bit-extraction demo needs N to be a power of two".into(),
        ));
    }
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be >= 1".into()));
    }
    let b0 = crate::basis::enumerate_basis(&dcsp.params, crate::basis::BasisSelection::B0)?;
    let bits = n.trailing_zeros() as usize;
    let k = dcsp.params.k();
    let mut d_low = 0u64;
    for i in 0..bits {
        let mut votes_one = 0usize;
        let mut votes_zero = 0usize;
        let mut batches = 0usize;
        let bit = loop {
            for _ in 0..repeats {
                let mut registers = Vec::with_capacity(k);
                for _ in 0..k {
                    let reg = oracle.draw(rng)?;
                    let reg = subtract_conditional(&reg, d_low);
                    let (_, collapsed) = measure_int_bit(&reg, i, rng)?;
                    registers.push(collapsed);
                }
                let joint = tensor_registers(&registers)?;
                let m = dcsp_measure(&joint, &b0, rng)?;
                match m.verdict {
                    Verdict::InC => votes_zero += 1,
                    Verdict::InCPerp => votes_one += 1,
                }
            }
            if votes_one != votes_zero {
                break u8::from(votes_one > votes_zero);
            }
            batches += 1;
            if batches >= MAX_MAJORITY_BATCHES {
                return Err(Error::ResourceLimit(
                    "majority vote failed to resolve".into(),
                ));
            }
        };
        d_low |= u64::from(bit) << i;
    }
    Ok(d_low)
}

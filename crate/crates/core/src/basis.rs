//! Coset states, the subset-sum basis, and its tilde/hat variants.
//!
//! For an instance block (l, p) with solution list T = {b^(0) < b^(1) < ...}
//! the basis vector with phase index m has hybrid-frame amplitude
//! omega_{|T|}^{m j} / sqrt(|T|) at |b^(j)> |chi_l>, so every vector is
//! supported on |T| coordinates of a single l block. The m = 0 vectors
//! span the space of k-register order-two coset states; the m >= 1
//! vectors span its orthogonal complement. Both facts are verified
//! numerically here ([`verify_coset_orthogonality`], [`coset_span_check`]).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::omega_table;
use crate::params::{flat_index, DihedralParams, StateIndex};
use crate::rng::stream_rng;
use crate::state::{DenseState, HybridState};
use crate::subset_sum::solution_buckets;

/// One order-two coset state: subgroup label d and coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetStateSpec {
    pub d: u64,
    pub xs: Vec<u64>,
}

impl CosetStateSpec {
    pub fn new(d: u64, xs: Vec<u64>) -> Self {
        Self { d, xs }
    }
}

/// 2^{-k/2} sum_b |b, x + b d> in the standard frame.
pub fn build_coset_state(spec: &CosetStateSpec, params: &DihedralParams) -> Result<DenseState> {
    let k = params.k();
    if spec.xs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            actual: spec.xs.len(),
        });
    }
    if spec.d >= params.n() || spec.xs.iter().any(|&x| x >= params.n()) {
        return Err(Error::InvalidArgument(format!(
            "coset spec components must lie in [0, {})",
            params.n()
        )));
    }
    let mut state = DenseState::zero(params);
    let amp = Complex64::new(1.0 / (params.block_dim() as f64).sqrt(), 0.0);
    for mask in 0..params.block_dim() as u32 {
        let shifted: Vec<u64> = spec
            .xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let b = (mask >> (k - 1 - i)) & 1;
                (x + b as u64 * spec.d) % params.n()
            })
            .collect();
        let iv = params.ints_value(&shifted)?;
        state.amplitudes_mut()[flat_index(mask, iv, params)] = amp;
    }
    Ok(state)
}

/// Label of one subset-sum basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisLabel {
    pub l: Vec<u64>,
    pub p: u64,
    pub m: usize,
}

/// One basis vector as its block-sparse hybrid support.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    pub label: BasisLabel,
    /// (mask, amplitude) pairs; the masks are exactly T_{l,p} in canonical
    /// order.
    pub support: Vec<(u32, Complex64)>,
}

impl BasisVector {
    /// |T_{l,p}| for this vector's block.
    pub fn t_size(&self) -> usize {
        self.support.len()
    }

    pub fn amplitude_at(&self, mask: u32) -> Complex64 {
        match self.support.binary_search_by_key(&mask, |&(m, _)| m) {
            Ok(i) => self.support[i].1,
            Err(_) => Complex64::ZERO,
        }
    }

    pub fn to_hybrid(&self, params: &DihedralParams) -> Result<HybridState> {
        let lv = params.ints_value(&self.label.l)?;
        let mut s = HybridState::zero(params);
        for &(mask, amp) in &self.support {
            s.amplitudes_mut()[flat_index(mask, lv, params)] = amp;
        }
        Ok(s)
    }

    pub fn to_dense(&self, params: &DihedralParams) -> Result<DenseState> {
        Ok(self.to_hybrid(params)?.to_dense())
    }

    /// <self|hybrid block amplitudes>: callers supply the coefficients of
    /// the target vector on this block's solution list.
    pub fn overlap_with_block(&self, block_amps: &[Complex64]) -> Complex64 {
        self.support
            .iter()
            .zip(block_amps)
            .map(|(&(_, a), &b)| a.conj() * b)
            .sum()
    }
}

/// Which basis family the entries came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisFamily {
    Canonical,
    Tilde,
    Hat,
}

/// Which part of the family to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisSelection {
    B0,
    BPerp,
    All,
}

/// The subset-sum basis (or a tilde/hat variant) as labeled sparse vectors.
///
/// Entries are ordered by (l value, p, m); the block of every (l, p) pair
/// is contiguous, which keeps per-instance lookups O(|T|).
#[derive(Debug, Clone)]
pub struct LabeledBasis {
    params: DihedralParams,
    family: BasisFamily,
    entries: Vec<BasisVector>,
    /// (start, len) into `entries`, indexed by l_value * N + p.
    block_ranges: Vec<(u32, u32)>,
    b0_count: usize,
}

impl LabeledBasis {
    pub fn params(&self) -> &DihedralParams {
        &self.params
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn entries(&self) -> &[BasisVector] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry count with m = 0.
    pub fn b0_count(&self) -> usize {
        self.b0_count
    }

    /// Entry count with m >= 1.
    pub fn bperp_count(&self) -> usize {
        self.entries.len() - self.b0_count
    }

    /// True when the family covers the whole (2N)^k-dimensional space.
    pub fn is_complete(&self) -> bool {
        self.entries.len() == self.params.full_dim()
    }

    /// The contiguous entries of block (l, p); empty if |T| = 0 or the
    /// selection excluded them.
    pub fn block(&self, l_value: usize, p: u64) -> &[BasisVector] {
        let (start, len) = self.block_ranges[l_value * self.params.n() as usize + p as usize];
        &self.entries[start as usize..start as usize + len as usize]
    }

    pub fn iter_b0(&self) -> impl Iterator<Item = &BasisVector> {
        self.entries.iter().filter(|v| v.label.m == 0)
    }

    pub fn iter_bperp(&self) -> impl Iterator<Item = &BasisVector> {
        self.entries.iter().filter(|v| v.label.m >= 1)
    }
}

/// Canonical basis vector for one label.
pub fn build_basis_vector(
    l: &[u64],
    p: u64,
    m: usize,
    params: &DihedralParams,
) -> Result<BasisVector> {
    let buckets = solution_buckets(l, params)?;
    if p >= params.n() {
        return Err(Error::InvalidArgument(format!("p = {p} out of range")));
    }
    let t = &buckets[p as usize];
    if t.is_empty() {
        return Err(Error::EmptySolutionSet { l: l.to_vec(), p });
    }
    if m >= t.len() {
        return Err(Error::InvalidArgument(format!(
            "m = {m} out of range for |T| = {}",
            t.len()
        )));
    }
    Ok(canonical_vector(l.to_vec(), p, m, t))
}

fn canonical_vector(l: Vec<u64>, p: u64, m: usize, t: &[u32]) -> BasisVector {
    let size = t.len();
    let table = omega_table(size);
    let scale = 1.0 / (size as f64).sqrt();
    let support = t
        .iter()
        .enumerate()
        .map(|(j, &mask)| (mask, table[(m * j) % size] * scale))
        .collect();
    BasisVector {
        label: BasisLabel { l, p, m },
        support,
    }
}

/// Enumerate the canonical subset-sum basis (or the requested part of it).
pub fn enumerate_basis(params: &DihedralParams, which: BasisSelection) -> Result<LabeledBasis> {
    enumerate_with(params, which, BasisFamily::Canonical, |_, _, _, entries| {
        Ok(entries)
    })
}

/// Per-block rotation of the m >= 1 span.
#[derive(Debug, Clone)]
pub enum RotationSpec {
    /// Reproduce the canonical basis exactly.
    Identity,
    /// First m >= 1 vector becomes the flat sum of all canonical m >= 1
    /// vectors; the rest complete it deterministically.
    Hat,
    /// Independent Haar-like rotation per block, seeded.
    Random { seed: u64 },
    /// Caller-supplied unitaries keyed by (l value, p). Blocks without an
    /// entry keep the canonical vectors. Matrices are validated.
    Explicit(BTreeMap<(usize, u64), DMatrix<Complex64>>),
}

/// Build a tilde basis: B0 entries identical to the canonical family, and
/// each (l, p) block's m >= 1 span re-rotated per the spec.
pub fn build_tilde_basis(params: &DihedralParams, spec: &RotationSpec) -> Result<LabeledBasis> {
    let family = match spec {
        RotationSpec::Hat => BasisFamily::Hat,
        RotationSpec::Identity => BasisFamily::Canonical,
        _ => BasisFamily::Tilde,
    };
    enumerate_with(params, BasisSelection::All, family, |l_value, p, t, entries| {
        let dim = t.len() - 1;
        if dim == 0 {
            return Ok(entries);
        }
        let rotation = match spec {
            RotationSpec::Identity => return Ok(entries),
            RotationSpec::Hat => hat_rotation(dim),
            RotationSpec::Random { seed } => random_unitary(dim, *seed, l_value, p),
            RotationSpec::Explicit(map) => match map.get(&(l_value, p)) {
                Some(r) => {
                    validate_unitary(r, dim)?;
                    r.clone()
                }
                None => return Ok(entries),
            },
        };
        Ok(rotate_block(entries, &rotation))
    })
}

/// Shared enumeration loop: builds each block's canonical vectors, lets
/// `transform` rewrite the block, then applies the selection filter.
fn enumerate_with<F>(
    params: &DihedralParams,
    which: BasisSelection,
    family: BasisFamily,
    mut transform: F,
) -> Result<LabeledBasis>
where
    F: FnMut(usize, u64, &[u32], Vec<BasisVector>) -> Result<Vec<BasisVector>>,
{
    let n = params.n() as usize;
    let int_dim = params.int_dim();
    let mut entries = Vec::new();
    let mut block_ranges = vec![(0u32, 0u32); int_dim * n];
    let mut b0_count = 0usize;
    for l_value in 0..int_dim {
        let l = params.ints_from_value(l_value);
        let buckets = solution_buckets(&l, params)?;
        for (p, t) in buckets.iter().enumerate() {
            if t.is_empty() {
                continue;
            }
            let block: Vec<BasisVector> = (0..t.len())
                .map(|m| canonical_vector(l.clone(), p as u64, m, t))
                .collect();
            let block = transform(l_value, p as u64, t, block)?;
            let start = entries.len() as u32;
            for v in block {
                let keep = match which {
                    BasisSelection::B0 => v.label.m == 0,
                    BasisSelection::BPerp => v.label.m >= 1,
                    BasisSelection::All => true,
                };
                if keep {
                    if v.label.m == 0 {
                        b0_count += 1;
                    }
                    entries.push(v);
                }
            }
            block_ranges[l_value * n + p] = (start, entries.len() as u32 - start);
        }
    }
    Ok(LabeledBasis {
        params: params.clone(),
        family,
        entries,
        block_ranges,
        b0_count,
    })
}

/// Replace the block's m >= 1 vectors by rotation rows applied to them.
fn rotate_block(block: Vec<BasisVector>, rotation: &DMatrix<Complex64>) -> Vec<BasisVector> {
    let t_size = block.len();
    let dim = t_size - 1;
    let mut out = Vec::with_capacity(t_size);
    out.push(block[0].clone());
    for new_m in 1..t_size {
        let mut support: Vec<(u32, Complex64)> = block[0]
            .support
            .iter()
            .map(|&(mask, _)| (mask, Complex64::ZERO))
            .collect();
        for old_m in 1..t_size {
            let coeff = rotation[(new_m - 1, old_m - 1)];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for (slot, &(_, amp)) in support.iter_mut().zip(&block[old_m].support) {
                slot.1 += coeff * amp;
            }
        }
        out.push(BasisVector {
            label: BasisLabel {
                m: new_m,
                ..block[new_m].label.clone()
            },
            support,
        });
    }
    debug_assert_eq!(rotation.nrows(), dim);
    out
}

/// Row 0 = flat sum; rows 1.. complete it by orthonormalizing standard
/// basis rows (deterministic).
fn hat_rotation(dim: usize) -> DMatrix<Complex64> {
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    let flat = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    rows.push(vec![flat; dim]);
    let mut candidate = 0usize;
    while rows.len() < dim {
        let mut v = vec![Complex64::ZERO; dim];
        v[candidate] = Complex64::ONE;
        candidate += 1;
        for row in &rows {
            let ip: Complex64 = row.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (slot, &r) in v.iter_mut().zip(row) {
                *slot -= ip * r;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for slot in &mut v {
                *slot /= norm;
            }
            rows.push(v);
        }
    }
    DMatrix::from_fn(dim, dim, |i, j| rows[i][j])
}

/// Haar-like unitary: QR of a complex Gaussian matrix with the phase fix
/// that makes the R diagonal real positive. Seeded per block.
fn random_unitary(dim: usize, seed: u64, l_value: usize, p: u64) -> DMatrix<Complex64> {
    let mut rng: ChaCha8Rng = stream_rng(seed, crate::rng::DOMAIN_ROTATION, (l_value as u64) << 32 | p);
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..dim {
        let d = r[(i, i)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::ONE };
        for row in 0..dim {
            q[(row, i)] *= phase;
        }
    }
    q
}

fn validate_unitary(r: &DMatrix<Complex64>, dim: usize) -> Result<()> {
    if r.nrows() != dim || r.ncols() != dim {
        return Err(Error::InvalidArgument(format!(
            "rotation block must be {dim}x{dim}, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let gram = r.adjoint() * r;
    let mut max_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            max_dev = max_dev.max((gram[(i, j)] - expect).norm());
        }
    }
    if max_dev > 1e-10 {
        return Err(Error::NonUnitaryRotation { max_dev });
    }
    Ok(())
}

/// Max |<v_i|v_j> - delta_ij| over all pairs of the family, computed on
/// densely materialized vectors. Intended for small params.
pub fn gram_max_deviation_dense(basis: &LabeledBasis) -> Result<f64> {
    let dense: Vec<DenseState> = basis
        .entries()
        .iter()
        .map(|v| v.to_dense(basis.params()))
        .collect::<Result<_>>()?;
    let mut max_dev = 0.0f64;
    for (i, a) in dense.iter().enumerate() {
        for (j, b) in dense.iter().enumerate().skip(i) {
            let ip = a.inner_product(b)?;
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            max_dev = max_dev.max((ip - expect).norm());
        }
    }
    Ok(max_dev)
}

/// Same check in the hybrid frame, restricted to same-l pairs (vectors
/// from different l blocks occupy disjoint coordinates). Cheap enough for
/// every supported parameter size.
pub fn gram_max_deviation_hybrid(basis: &LabeledBasis) -> f64 {
    let params = basis.params();
    let block_dim = params.block_dim();
    let mut max_dev = 0.0f64;
    let n = params.n() as usize;
    for l_value in 0..params.int_dim() {
        let mut vectors: Vec<(&BasisVector, Vec<Complex64>)> = Vec::new();
        for p in 0..n {
            for v in basis.block(l_value, p as u64) {
                let mut full = vec![Complex64::ZERO; block_dim];
                for &(mask, amp) in &v.support {
                    full[mask as usize] = amp;
                }
                vectors.push((v, full));
            }
        }
        for i in 0..vectors.len() {
            for j in i..vectors.len() {
                let ip: Complex64 = vectors[i]
                    .1
                    .iter()
                    .zip(&vectors[j].1)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
                max_dev = max_dev.max((ip - expect).norm());
            }
        }
    }
    max_dev
}

/// Result of checking every B-perp vector against every coset state.
#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub max_abs_inner: f64,
    pub coset_states: usize,
    pub bperp_vectors: usize,
}

/// Max |<coset state | v>| over all N^{k+1} coset states and all m >= 1
/// basis vectors. The claim under test asserts exact zero.
pub fn verify_coset_orthogonality(params: &DihedralParams) -> Result<OrthogonalityReport> {
    let bperp = enumerate_basis(params, BasisSelection::BPerp)?;
    let dense: Vec<DenseState> = bperp
        .entries()
        .iter()
        .map(|v| v.to_dense(params))
        .collect::<Result<_>>()?;
    let mut max_abs = 0.0f64;
    let mut coset_states = 0usize;
    for_each_coset_spec(params, |spec| {
        let c = build_coset_state(spec, params)?;
        coset_states += 1;
        for v in &dense {
            max_abs = max_abs.max(c.inner_product(v)?.norm());
        }
        Ok(())
    })?;
    Ok(OrthogonalityReport {
        max_abs_inner: max_abs,
        coset_states,
        bperp_vectors: dense.len(),
    })
}

/// Result of the spanning check.
#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    /// Numerical rank of the coset-state family (singular values > 1e-8).
    pub rank: usize,
    pub b0_count: usize,
    /// Largest residual norm of a coset state after projecting onto the
    /// m = 0 span.
    pub max_coset_residual: f64,
    /// Largest projection norm of an m >= 1 vector onto the m = 0 span.
    pub max_bperp_projection: f64,
}

/// Rank tolerance separating exact-zero structure from roundoff.
const RANK_TOLERANCE: f64 = 1e-8;

/// Verify that the m = 0 vectors are an orthonormal basis of the span of
/// the order-two coset states: rank of the coset family equals the m = 0
/// count and every coset state projects onto the m = 0 span with
/// negligible residual.
pub fn coset_span_check(params: &DihedralParams) -> Result<SpanReport> {
    let n = params.n();
    let family_size = (params.int_dim() as u64 * n) as usize;
    if params.full_dim() > 4096 || family_size > 4096 {
        return Err(Error::ResourceLimit(format!(
            "span check needs the dense coset family; {} states x dim {} is over budget",
            family_size,
            params.full_dim()
        )));
    }

    let mut columns: Vec<DenseState> = Vec::with_capacity(family_size);
    for_each_coset_spec(params, |spec| {
        columns.push(build_coset_state(spec, params)?);
        Ok(())
    })?;
    let matrix = DMatrix::from_fn(params.full_dim(), columns.len(), |r, c| {
        columns[c].amplitudes()[r]
    });
    let singular = matrix.svd(false, false).singular_values;
    let rank = singular.iter().filter(|&&s| s > RANK_TOLERANCE).count();

    let b0 = enumerate_basis(params, BasisSelection::B0)?;
    let b0_dense: Vec<DenseState> = b0
        .entries()
        .iter()
        .map(|v| v.to_dense(params))
        .collect::<Result<_>>()?;

    let projection_norm_sq = |state: &DenseState| -> Result<f64> {
        let mut acc = 0.0;
        for v in &b0_dense {
            acc += v.inner_product(state)?.norm_sqr();
        }
        Ok(acc)
    };

    let mut max_coset_residual = 0.0f64;
    for c in &columns {
        let residual_sq = (1.0 - projection_norm_sq(c)?).max(0.0);
        max_coset_residual = max_coset_residual.max(residual_sq.sqrt());
    }

    let bperp = enumerate_basis(params, BasisSelection::BPerp)?;
    let mut max_bperp_projection = 0.0f64;
    for v in bperp.entries() {
        let dense = v.to_dense(params)?;
        max_bperp_projection = max_bperp_projection.max(projection_norm_sq(&dense)?.sqrt());
    }

    Ok(SpanReport {
        rank,
        b0_count: b0.len(),
        max_coset_residual,
        max_bperp_projection,
    })
}

fn for_each_coset_spec<F>(params: &DihedralParams, mut f: F) -> Result<()>
where
    F: FnMut(&CosetStateSpec) -> Result<()>,
{
    let n = params.n();
    for d in 0..n {
        for xv in 0..params.int_dim() {
            let spec = CosetStateSpec::new(d, params.ints_from_value(xv));
            f(&spec)?;
        }
    }
    Ok(())
}

/// JSON-exportable form of a labeled basis (labels plus support lists).
#[derive(Debug, Serialize)]
pub struct BasisExport {
    pub n: u64,
    pub k: usize,
    pub family: BasisFamily,
    pub entries: Vec<BasisExportEntry>,
}

#[derive(Debug, Serialize)]
pub struct BasisExportEntry {
    pub l: Vec<u64>,
    pub p: u64,
    pub m: usize,
    pub support: Vec<BasisExportAmplitude>,
}

#[derive(Debug, Serialize)]
pub struct BasisExportAmplitude {
    pub b: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

impl LabeledBasis {
    pub fn export(&self) -> BasisExport {
        let k = self.params.k();
        BasisExport {
            n: self.params.n(),
            k,
            family: self.family,
            entries: self
                .entries
                .iter()
                .map(|v| BasisExportEntry {
                    l: v.label.l.clone(),
                    p: v.label.p,
                    m: v.label.m,
                    support: v
                        .support
                        .iter()
                        .map(|&(mask, amp)| BasisExportAmplitude {
                            b: crate::params::mask_to_bits(mask, k),
                            re: amp.re,
                            im: amp.im,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::omega;
    use crate::params::index_encode;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;

    #[test]
    fn coset_state_definition_expansion() {
        let p = DihedralParams::new(2, 1).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        // d=0, x=0: (|0,0> + |1,0>)/sqrt(2).
        let c = build_coset_state(&CosetStateSpec::new(0, vec![0]), &p).unwrap();
        assert_abs_diff_eq!(c.amplitudes()[0].re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(c.amplitudes()[2].re, r, epsilon = 1e-12);
        // d=1, x=0: (|0,0> + |1,1>)/sqrt(2).
        let c = build_coset_state(&CosetStateSpec::new(1, vec![0]), &p).unwrap();
        assert_abs_diff_eq!(c.amplitudes()[0].re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(c.amplitudes()[3].re, r, epsilon = 1e-12);
    }

    #[test]
    fn coset_state_norm_and_support() {
        let params = DihedralParams::new(5, 3).unwrap();
        let c = build_coset_state(&CosetStateSpec::new(3, vec![1, 4, 2]), &params).unwrap();
        assert_abs_diff_eq!(c.norm(), 1.0, epsilon = 1e-12);
        let nonzero = c.amplitudes().iter().filter(|a| a.norm() > 1e-15).count();
        assert_eq!(nonzero, 8);
    }

    #[test]
    fn basis_vector_phases() {
        let p = DihedralParams::new(2, 1).unwrap();
        // l=(0), p=0, |T| = 2, m=1: amplitudes (1, -1)/sqrt(2).
        let v = build_basis_vector(&[0], 0, 1, &p).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert_eq!(v.support.len(), 2);
        assert_abs_diff_eq!(v.support[0].1.re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(v.support[1].1.re, -r, epsilon = 1e-12);

        // m=0 is the flat superposition.
        let v = build_basis_vector(&[0], 0, 0, &p).unwrap();
        for &(_, amp) in &v.support {
            assert_abs_diff_eq!(amp.re, r, epsilon = 1e-12);
            assert_abs_diff_eq!(amp.im, 0.0, epsilon = 1e-12);
        }

        // N=2, k=2, l=(1,1), p=0, m=1: (|00> - |11>)/sqrt(2).
        let p2 = DihedralParams::new(2, 2).unwrap();
        let v = build_basis_vector(&[1, 1], 0, 1, &p2).unwrap();
        assert_eq!(v.support[0].0, 0b00);
        assert_eq!(v.support[1].0, 0b11);
        assert_abs_diff_eq!(v.support[0].1.re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(v.support[1].1.re, -r, epsilon = 1e-12);
    }

    #[test]
    fn basis_vector_errors() {
        let p = DihedralParams::new(2, 2).unwrap();
        assert!(matches!(
            build_basis_vector(&[0, 0], 1, 0, &p),
            Err(Error::EmptySolutionSet { .. })
        ));
        assert!(build_basis_vector(&[1, 1], 0, 2, &p).is_err());
    }

    #[test]
    fn family_counts_at_tiny_params() {
        let p = DihedralParams::new(2, 1).unwrap();
        let b0 = enumerate_basis(&p, BasisSelection::B0).unwrap();
        let bperp = enumerate_basis(&p, BasisSelection::BPerp).unwrap();
        assert_eq!(b0.len(), 3);
        assert_eq!(bperp.len(), 1);
        let all = enumerate_basis(&p, BasisSelection::All).unwrap();
        assert!(all.is_complete());
        assert_eq!(all.b0_count(), 3);
        assert_eq!(all.bperp_count(), 1);
    }

    #[test]
    fn completeness_matches_dimension() {
        for (n, k) in [(2u64, 1usize), (2, 2), (3, 2), (4, 2)] {
            let p = DihedralParams::new(n, k).unwrap();
            let all = enumerate_basis(&p, BasisSelection::All).unwrap();
            assert_eq!(all.len(), p.full_dim());
            // Labels are unique.
            let mut labels: Vec<_> = all
                .entries()
                .iter()
                .map(|v| (v.label.l.clone(), v.label.p, v.label.m))
                .collect();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), p.full_dim());
        }
    }

    #[test]
    fn hybrid_and_dense_agree() {
        // Independent dense construction from chi factors.
        let params = DihedralParams::new(3, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let all = enumerate_basis(&params, BasisSelection::All).unwrap();
        for _ in 0..20 {
            let v = &all.entries()[rng.random_range(0..all.len())];
            let dense = v.to_dense(&params).unwrap();
            let n = params.n() as i64;
            let scale = 1.0 / (params.n() as f64).sqrt();
            let mut expect = vec![Complex64::ZERO; params.full_dim()];
            for &(mask, amp) in &v.support {
                for xv in 0..params.int_dim() {
                    let xs = params.ints_from_value(xv);
                    let mut chi = Complex64::new(scale * scale, 0.0);
                    for (i, &x) in xs.iter().enumerate() {
                        chi *= omega(n, (x * v.label.l[i]) as i64).unwrap();
                    }
                    expect[flat_index(mask, xv, &params)] += amp * chi;
                }
            }
            for (a, b) in dense.amplitudes().iter().zip(&expect) {
                assert!((a - b).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn phase_identity_reconstructs_solution_kets() {
        // |b^(j0)> on block (l, p) equals
        // (1/sqrt(|T|)) sum_m omega^{-j0 m} |S^m>.
        let params = DihedralParams::new(4, 3).unwrap();
        let all = enumerate_basis(&params, BasisSelection::All).unwrap();
        let l = [1u64, 2, 3];
        let l_value = params.ints_value(&l).unwrap();
        let block = all.block(l_value, 3);
        let t = block[0].t_size();
        assert!(t >= 2);
        for j0 in 0..t {
            let target = block[0].support[j0].0;
            let mut recon = vec![Complex64::ZERO; t];
            let scale = 1.0 / (t as f64).sqrt();
            for (m, v) in block.iter().enumerate() {
                let w = omega(t as i64, -((j0 * m) as i64)).unwrap() * scale;
                for (slot, &(_, amp)) in recon.iter_mut().zip(&v.support) {
                    *slot += w * amp;
                }
            }
            for (j, &(mask, _)) in block[0].support.iter().enumerate() {
                let expect = if mask == target { 1.0 } else { 0.0 };
                assert!((recon[j] - Complex64::new(expect, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn tilde_identity_reproduces_canonical() {
        let params = DihedralParams::new(3, 2).unwrap();
        let canonical = enumerate_basis(&params, BasisSelection::All).unwrap();
        let tilde = build_tilde_basis(&params, &RotationSpec::Identity).unwrap();
        for (a, b) in canonical.entries().iter().zip(tilde.entries()) {
            assert_eq!(a.label, b.label);
            for (x, y) in a.support.iter().zip(&b.support) {
                assert_eq!(x.0, y.0);
                assert!((x.1 - y.1).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn hat_overlap_with_first_solution() {
        // |<b^(0) | S-hat^1>|^2 = (|T|-1)/|T|.
        for (n, k) in [(2u64, 2usize), (4, 3), (3, 3)] {
            let params = DihedralParams::new(n, k).unwrap();
            let hat = build_tilde_basis(&params, &RotationSpec::Hat).unwrap();
            for l_value in 0..params.int_dim() {
                for p in 0..n {
                    let block = hat.block(l_value, p);
                    if block.len() < 2 {
                        continue;
                    }
                    let t = block[0].t_size() as f64;
                    let b0_mask = block[0].support[0].0;
                    let got = block[1].amplitude_at(b0_mask).norm_sqr();
                    assert_abs_diff_eq!(got, (t - 1.0) / t, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotated_families_stay_orthonormal() {
        let params = DihedralParams::new(3, 2).unwrap();
        for seed in [1u64, 2, 3] {
            let tilde = build_tilde_basis(&params, &RotationSpec::Random { seed }).unwrap();
            assert!(gram_max_deviation_hybrid(&tilde) <= 1e-10);
            // B0 entries identical to canonical.
            for v in tilde.iter_b0() {
                let flat = 1.0 / (v.t_size() as f64).sqrt();
                for &(_, amp) in &v.support {
                    assert!((amp - Complex64::new(flat, 0.0)).norm() <= 1e-12);
                }
            }
        }
        let hat = build_tilde_basis(&params, &RotationSpec::Hat).unwrap();
        assert!(gram_max_deviation_hybrid(&hat) <= 1e-10);
    }

    #[test]
    fn tilde_entries_stay_in_block_span() {
        // Each tilde m >= 1 vector decomposes over the canonical m >= 1
        // vectors of its block with negligible residual.
        let params = DihedralParams::new(4, 2).unwrap();
        let canonical = enumerate_basis(&params, BasisSelection::All).unwrap();
        let tilde = build_tilde_basis(&params, &RotationSpec::Random { seed: 9 }).unwrap();
        for l_value in 0..params.int_dim() {
            for p in 0..params.n() {
                let cb = canonical.block(l_value, p);
                for v in tilde.block(l_value, p).iter().filter(|v| v.label.m >= 1) {
                    let amps: Vec<Complex64> = v.support.iter().map(|&(_, a)| a).collect();
                    let mut projected = 0.0;
                    for c in cb.iter().filter(|c| c.label.m >= 1) {
                        projected += c.overlap_with_block(&amps).norm_sqr();
                    }
                    assert!((1.0 - projected).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn explicit_rotation_must_be_unitary() {
        let params = DihedralParams::new(2, 2).unwrap();
        let mut map = BTreeMap::new();
        // Block l=(0,0), p=0 has |T| = 4, so the rotation acts on dim 3.
        map.insert((0usize, 0u64), DMatrix::from_element(3, 3, Complex64::ONE));
        assert!(matches!(
            build_tilde_basis(&params, &RotationSpec::Explicit(map)),
            Err(Error::NonUnitaryRotation { .. })
        ));
    }

    #[test]
    fn bperp_orthogonal_to_cosets_n2k1() {
        // The single m >= 1 vector is (1,1,-1,-1)/2 in the standard frame;
        // all four coset states are orthogonal to it.
        let params = DihedralParams::new(2, 1).unwrap();
        let report = verify_coset_orthogonality(&params).unwrap();
        assert_eq!(report.coset_states, 4);
        assert_eq!(report.bperp_vectors, 1);
        assert!(report.max_abs_inner <= 1e-12);

        let bperp = enumerate_basis(&params, BasisSelection::BPerp).unwrap();
        let dense = bperp.entries()[0].to_dense(&params).unwrap();
        let expect = [0.5, 0.5, -0.5, -0.5];
        for (a, e) in dense.amplitudes().iter().zip(expect) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn b0_generally_overlaps_cosets() {
        // Sanity partition: some m = 0 vector has nonzero coset overlap.
        let params = DihedralParams::new(2, 1).unwrap();
        let b0 = enumerate_basis(&params, BasisSelection::B0).unwrap();
        let c = build_coset_state(&CosetStateSpec::new(0, vec![0]), &params).unwrap();
        let overlaps: f64 = b0
            .entries()
            .iter()
            .map(|v| {
                c.inner_product(&v.to_dense(&params).unwrap())
                    .unwrap()
                    .norm()
            })
            .sum();
        assert!(overlaps > 0.5);
    }

    #[test]
    fn span_check_rank_n2k1() {
        // Coset family (1,0,1,0),(0,1,0,1),(1,0,0,1),(0,1,1,0) / sqrt(2)
        // has rank 3 = |B0|.
        let params = DihedralParams::new(2, 1).unwrap();
        let report = coset_span_check(&params).unwrap();
        assert_eq!(report.rank, 3);
        assert_eq!(report.b0_count, 3);
        assert!(report.max_coset_residual <= 1e-10);
        assert!(report.max_bperp_projection <= 1e-10);
    }

    #[test]
    fn index_layout_regression() {
        // block() lookups agree with label content.
        let params = DihedralParams::new(3, 2).unwrap();
        let all = enumerate_basis(&params, BasisSelection::All).unwrap();
        for l_value in 0..params.int_dim() {
            for p in 0..3u64 {
                for v in all.block(l_value, p) {
                    assert_eq!(params.ints_value(&v.label.l).unwrap(), l_value);
                    assert_eq!(v.label.p, p);
                }
            }
        }
        // Spot check the flat index convention against index_encode.
        let idx = StateIndex::new(vec![1, 0], vec![2, 1]);
        let flat = index_encode(&idx, &params).unwrap();
        assert_eq!(flat, flat_index(0b10, 7, &params));
    }
}

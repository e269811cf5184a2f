//! Basis-change unitaries over a labeled basis.
//!
//! Both unitaries are represented as label maps: applying one never
//! touches amplitudes, it relabels where each basis vector goes. Dense
//! matrices exist only as a cross-check at tiny dimensions.
//!
//! - [`BasisChangeUnitary`] sends every basis vector to a distinct
//!   standard basis state (the assignment strategy picks which).
//! - [`IndicatorUnitary`] sends every basis vector to an indicator bit
//!   (0 iff m = 0) times an abstract orthonormal workspace label.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisFamily, LabeledBasis};
use crate::error::{Error, Result};
use crate::params::DihedralParams;
use crate::rng::{stream_rng, DOMAIN_ROTATION};
use crate::state::{DenseState, HybridState};

/// How basis labels are matched to standard basis targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentStrategy {
    /// Rank of the label under the (m, p, l) ordering.
    Canonical,
    /// Canonical followed by a seeded shuffle of the targets.
    RandomPermutation { seed: u64 },
    /// Canonical assignment over the hat basis; only valid there.
    Adversarial,
}

/// A bijection from basis entries to standard basis indices.
#[derive(Debug, Clone)]
pub struct StandardAssignment {
    pub strategy: AssignmentStrategy,
    /// Standard index per basis entry.
    targets: Vec<usize>,
    /// Basis entry per standard index.
    inverse: Vec<usize>,
}

impl StandardAssignment {
    pub fn target_of(&self, entry: usize) -> usize {
        self.targets[entry]
    }

    pub fn entry_of(&self, standard_index: usize) -> usize {
        self.inverse[standard_index]
    }
}

/// U_S: subset-sum basis to standard basis, as a label bijection.
#[derive(Debug, Clone)]
pub struct BasisChangeUnitary {
    basis: LabeledBasis,
    assignment: StandardAssignment,
}

/// U_C: basis vector (l, p, m) to indicator bit plus workspace label.
#[derive(Debug, Clone)]
pub struct IndicatorUnitary {
    basis: LabeledBasis,
}

/// Build U_S over a complete labeled basis.
pub fn build_us(basis: LabeledBasis, strategy: AssignmentStrategy) -> Result<BasisChangeUnitary> {
    if !basis.is_complete() {
        return Err(Error::InvalidArgument(format!(
            "U_S needs a complete basis: got {} of {} entries",
            basis.len(),
            basis.params().full_dim()
        )));
    }
    if matches!(strategy, AssignmentStrategy::Adversarial) && basis.family() != BasisFamily::Hat {
        return Err(Error::InvalidArgument(
            "the adversarial strategy is canonical assignment over the hat basis".into(),
        ));
    }

    // Canonical: sort entries by (m, p, l value); target = rank.
    let mut order: Vec<usize> = (0..basis.len()).collect();
    let key = |e: usize| -> (usize, u64, usize) {
        let label = &basis.entries()[e].label;
        let l_value = basis
            .params()
            .ints_value(&label.l)
            .expect("labels are in range by construction");
        (label.m, label.p, l_value)
    };
    order.sort_by_key(|&e| key(e));
    let mut targets = vec![0usize; basis.len()];
    for (rank, &entry) in order.iter().enumerate() {
        targets[entry] = rank;
    }

    if let AssignmentStrategy::RandomPermutation { seed } = strategy {
        let mut rng = stream_rng(seed, DOMAIN_ROTATION, u64::MAX);
        // Fisher-Yates over the target values.
        for i in (1..targets.len()).rev() {
            let j = rng.random_range(0..=i);
            targets.swap(i, j);
        }
    }

    let mut inverse = vec![usize::MAX; basis.len()];
    for (entry, &t) in targets.iter().enumerate() {
        inverse[t] = entry;
    }
    debug_assert!(inverse.iter().all(|&e| e != usize::MAX));

    Ok(BasisChangeUnitary {
        basis,
        assignment: StandardAssignment {
            strategy,
            targets,
            inverse,
        },
    })
}

/// Build U_C over a complete labeled basis.
pub fn build_uc(basis: LabeledBasis) -> Result<IndicatorUnitary> {
    if !basis.is_complete() {
        return Err(Error::InvalidArgument(format!(
            "U_C needs a complete basis: got {} of {} entries",
            basis.len(),
            basis.params().full_dim()
        )));
    }
    Ok(IndicatorUnitary { basis })
}

/// A superposition over basis labels: exact label-mode state.
pub type LabelState = Vec<(usize, Complex64)>;

impl BasisChangeUnitary {
    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn assignment(&self) -> &StandardAssignment {
        &self.assignment
    }

    /// Apply in label mode: each basis label becomes its standard index.
    /// Exact (pure relabeling).
    pub fn apply_labels(&self, state: &LabelState) -> Vec<(usize, Complex64)> {
        state
            .iter()
            .map(|&(entry, amp)| (self.assignment.target_of(entry), amp))
            .collect()
    }

    /// Adjoint in label mode: standard index back to its basis label.
    pub fn unapply_labels(&self, state: &[(usize, Complex64)]) -> LabelState {
        state
            .iter()
            .map(|&(idx, amp)| (self.assignment.entry_of(idx), amp))
            .collect()
    }

    /// Apply to an arbitrary standard-frame state: decompose over the
    /// basis, then emit each coefficient at its target index.
    pub fn apply_to_state(&self, state: &DenseState) -> Result<DenseState> {
        let coeffs = decompose_hybrid(&self.basis, &state.to_hybrid())?;
        let mut out = DenseState::zero(state.params());
        for (entry, c) in coeffs.into_iter().enumerate() {
            out.amplitudes_mut()[self.assignment.target_of(entry)] = c;
        }
        Ok(out)
    }

    /// Adjoint on an arbitrary standard-frame state.
    pub fn unapply_to_state(&self, state: &DenseState) -> Result<DenseState> {
        let params = state.params().clone();
        let mut hybrid = HybridState::zero(&params);
        for (idx, &amp) in state.amplitudes().iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let entry = &self.basis.entries()[self.assignment.entry_of(idx)];
            let lv = params.ints_value(&entry.label.l)?;
            for &(mask, a) in &entry.support {
                hybrid.amplitudes_mut()[crate::params::flat_index(mask, lv, &params)] += amp * a;
            }
        }
        Ok(hybrid.to_dense())
    }
}

impl IndicatorUnitary {
    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    /// Image of one basis entry: (indicator bit, workspace label).
    pub fn image_of(&self, entry: usize) -> (u8, usize) {
        let m = self.basis.entries()[entry].label.m;
        (u8::from(m != 0), entry)
    }

    /// Label-mode application.
    pub fn apply_labels(&self, state: &LabelState) -> Vec<((u8, usize), Complex64)> {
        state
            .iter()
            .map(|&(entry, amp)| (self.image_of(entry), amp))
            .collect()
    }

    /// Label-mode adjoint.
    pub fn unapply_labels(&self, state: &[((u8, usize), Complex64)]) -> LabelState {
        state.iter().map(|&((_, entry), amp)| (entry, amp)).collect()
    }
}

/// Coefficients of a hybrid state over every basis entry.
pub fn decompose_hybrid(basis: &LabeledBasis, state: &HybridState) -> Result<Vec<Complex64>> {
    let params = basis.params();
    if state.params().full_dim() != params.full_dim() {
        return Err(Error::DimensionMismatch {
            expected: params.full_dim(),
            actual: state.params().full_dim(),
        });
    }
    let amps = state.amplitudes();
    basis
        .entries()
        .iter()
        .map(|v| {
            let lv = params.ints_value(&v.label.l)?;
            Ok(v.support
                .iter()
                .map(|&(mask, a)| a.conj() * amps[crate::params::flat_index(mask, lv, params)])
                .sum())
        })
        .collect()
}

/// Default cap on dense materialization (columns).
pub const DENSE_BUDGET: usize = 4096;

/// Materialize U_S as a full_dim x full_dim matrix. Row target(e) is the
/// conjugated dense form of basis vector e.
pub fn materialize_us(u: &BasisChangeUnitary, params: &DihedralParams) -> Result<DMatrix<Complex64>> {
    let dim = params.full_dim();
    if dim > DENSE_BUDGET {
        return Err(Error::ResourceLimit(format!(
            "dense U_S would need {dim} columns (budget {DENSE_BUDGET})"
        )));
    }
    let mut m = DMatrix::from_element(dim, dim, Complex64::ZERO);
    for (entry, v) in u.basis.entries().iter().enumerate() {
        let dense = v.to_dense(params)?;
        let row = u.assignment.target_of(entry);
        for (col, amp) in dense.amplitudes().iter().enumerate() {
            m[(row, col)] = amp.conj();
        }
    }
    Ok(m)
}

/// Materialize U_C on state (x) workspace. The workspace is the minimal
/// register distinguishing all labels: indicator qubit plus
/// ceil(log2(full_dim)) label bits, so the total dimension is
/// 2 * 2^ceil(log2(full_dim)). Requires a power-of-two full_dim so the
/// input side factors as state (x) workspace.
pub fn materialize_uc(u: &IndicatorUnitary, params: &DihedralParams) -> Result<DMatrix<Complex64>> {
    let dim = params.full_dim();
    let psi_dim = dim.next_power_of_two();
    let total = 2 * psi_dim;
    if total > DENSE_BUDGET {
        return Err(Error::ResourceLimit(format!(
            "dense U_C would need {total} columns (budget {DENSE_BUDGET})"
        )));
    }
    if psi_dim != dim {
        return Err(Error::InvalidArgument(
            "dense U_C needs a power-of-two state dimension".into(),
        ));
    }
    let work = total / dim;
    // Input basis (s, w) at column s*work + w; output (indicator, psi) at
    // row indicator*psi_dim + psi. Workspace value 0 carries the defining
    // map; w = 1 completes it with the indicator flipped.
    let mut m = DMatrix::from_element(total, total, Complex64::ZERO);
    for (entry, v) in u.basis.entries().iter().enumerate() {
        let dense = v.to_dense(params)?;
        let (indicator, psi) = u.image_of(entry);
        for w in 0..work {
            let ind = if w == 0 { indicator } else { 1 - indicator };
            let row = ind as usize * psi_dim + psi;
            for (s, amp) in dense.amplitudes().iter().enumerate() {
                m[(row, s * work + w)] = amp.conj();
            }
        }
    }
    Ok(m)
}

/// Max-entry deviation of U adjoint U from the identity.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let mut max_dev = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            max_dev = max_dev.max((gram[(i, j)] - expect).norm());
        }
    }
    max_dev
}

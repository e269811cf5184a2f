//! State vectors in the standard and hybrid frames.
//!
//! A [`DenseState`] stores amplitudes over the standard basis
//! `|b_1..b_k, x_1..x_k>`. A [`HybridState`] stores amplitudes over the
//! hybrid basis `|b_1..b_k> |chi_{l_1}..chi_{l_k}>` (bits standard,
//! integer registers Fourier). The two are related by a QFT_N applied to
//! every integer register; the subset-sum basis is block-sparse in the
//! hybrid frame, which is why it is the primary representation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{inner_product_slices, norm_sq, omega_table};
use crate::params::{flat_index, index_encode, DihedralParams, StateIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// |l> -> |chi_l>, kernel omega_N^{+ij} / sqrt(N) per register.
    Forward,
    /// |chi_l> -> |l>, conjugate kernel.
    Inverse,
}

/// Amplitudes over the standard basis.
#[derive(Debug, Clone)]
pub struct DenseState {
    params: DihedralParams,
    amps: Vec<Complex64>,
}

/// Amplitudes over the hybrid basis (bits standard, integers Fourier).
#[derive(Debug, Clone)]
pub struct HybridState {
    params: DihedralParams,
    amps: Vec<Complex64>,
}

macro_rules! state_common {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(params: &DihedralParams) -> Self {
                Self {
                    params: params.clone(),
                    amps: vec![Complex64::ZERO; params.full_dim()],
                }
            }

            pub fn from_amplitudes(
                params: &DihedralParams,
                amps: Vec<Complex64>,
            ) -> Result<Self> {
                if amps.len() != params.full_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: params.full_dim(),
                        actual: amps.len(),
                    });
                }
                if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "state contains non-finite amplitudes".into(),
                    ));
                }
                Ok(Self {
                    params: params.clone(),
                    amps,
                })
            }

            pub fn params(&self) -> &DihedralParams {
                &self.params
            }

            pub fn amplitudes(&self) -> &[Complex64] {
                &self.amps
            }

            pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
                &mut self.amps
            }

            pub fn norm(&self) -> f64 {
                norm_sq(&self.amps).sqrt()
            }

            pub fn normalize(&mut self) -> Result<()> {
                let n = self.norm();
                if n < 1e-300 {
                    return Err(Error::InvalidArgument(
                        "cannot normalize the zero state".into(),
                    ));
                }
                let inv = 1.0 / n;
                for z in &mut self.amps {
                    *z *= inv;
                }
                Ok(())
            }

            /// <self|other>, left argument conjugated.
            pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
                inner_product_slices(&self.amps, &other.amps)
            }
        }
    };
}

state_common!(DenseState);
state_common!(HybridState);

impl DenseState {
    /// The standard basis state |bits, ints>.
    pub fn basis_state(params: &DihedralParams, idx: &StateIndex) -> Result<Self> {
        let mut s = Self::zero(params);
        s.amps[index_encode(idx, params)?] = Complex64::ONE;
        Ok(s)
    }

    /// Change to the hybrid frame (inverse QFT on every integer register).
    pub fn to_hybrid(&self) -> HybridState {
        HybridState {
            params: self.params.clone(),
            amps: qft_all_registers(&self.amps, &self.params, FrameDirection::Inverse),
        }
    }
}

impl HybridState {
    /// The hybrid basis state |bits> |chi_l>.
    pub fn basis_state(params: &DihedralParams, mask: u32, l: &[u64]) -> Result<Self> {
        let mut s = Self::zero(params);
        let lv = params.ints_value(l)?;
        s.amps[flat_index(mask, lv, params)] = Complex64::ONE;
        Ok(s)
    }

    /// Materialize in the standard frame (forward QFT on every register).
    pub fn to_dense(&self) -> DenseState {
        DenseState {
            params: self.params.clone(),
            amps: qft_all_registers(&self.amps, &self.params, FrameDirection::Forward),
        }
    }
}

/// Apply QFT_N to every integer register of a dense state.
///
/// Forward maps the basis ket |l> of each integer register to |chi_l>;
/// inverse undoes it. Norm is preserved.
pub fn frame_transform(state: &DenseState, direction: FrameDirection) -> DenseState {
    DenseState {
        params: state.params.clone(),
        amps: qft_all_registers(&state.amps, &state.params, direction),
    }
}

fn qft_all_registers(
    amps: &[Complex64],
    params: &DihedralParams,
    direction: FrameDirection,
) -> Vec<Complex64> {
    let n = params.n() as usize;
    let table = omega_table(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = amps.to_vec();
    let mut scratch = vec![Complex64::ZERO; n];
    // Integer register r has stride N^(k-1-r) inside the ints part.
    let mut stride = params.int_dim() / n;
    for _ in 0..params.k() {
        let block = stride * n;
        let mut base = 0;
        while base < out.len() {
            for off in 0..stride {
                let start = base + off;
                for (j, slot) in scratch.iter_mut().enumerate() {
                    *slot = out[start + j * stride];
                }
                for i in 0..n {
                    let mut acc = Complex64::ZERO;
                    for (j, &a) in scratch.iter().enumerate() {
                        let e = (i * j) % n;
                        let w = match direction {
                            FrameDirection::Forward => table[e],
                            FrameDirection::Inverse => table[e].conj(),
                        };
                        acc += w * a;
                    }
                    out[start + i * stride] = acc * scale;
                }
            }
            base += block;
        }
        stride /= n;
        if stride == 0 {
            break;
        }
    }
    out
}

/// Tensor k single-register states (each with params (N, 1)) into one
/// k-register dense state, register 1 outermost.
pub fn tensor_registers(registers: &[DenseState]) -> Result<DenseState> {
    if registers.is_empty() {
        return Err(Error::InvalidArgument("no registers to tensor".into()));
    }
    let n = registers[0].params().n();
    for r in registers {
        if r.params().k() != 1 || r.params().n() != n {
            return Err(Error::InvalidArgument(
                "tensor_registers expects single-register states over one N".into(),
            ));
        }
    }
    let k = registers.len();
    let params = DihedralParams::new(n, k)?;
    let nd = params.int_dim();
    let mut amps = vec![Complex64::ZERO; params.full_dim()];
    for (flat, amp) in amps.iter_mut().enumerate() {
        let mask = (flat / nd) as u32;
        let mut ints = flat % nd;
        let mut prod = Complex64::ONE;
        // Walk registers from innermost (register k) to outermost.
        for r in (0..k).rev() {
            let x = ints % n as usize;
            ints /= n as usize;
            let b = (mask >> (k - 1 - r)) & 1;
            prod *= registers[r].amplitudes()[b as usize * n as usize + x];
        }
        *amp = prod;
    }
    Ok(DenseState { params, amps })
}

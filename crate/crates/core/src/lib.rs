//! Simulator and verification lab for the dihedral coset space problem.
//!
//! The library builds the subset-sum basis of the k-register coset space
//! over the dihedral group of order 2N, synthesizes basis-change unitaries
//! over it, runs the associated collision-finding algorithms both exactly
//! and by sampling, and verifies every quantitative claim (orthogonality,
//! spanning, success probabilities, solution-count statistics) at desk
//! scale.
//!
//! Layout:
//!
//! - [`params`] / [`math`] / [`state`]: dihedral parameters, mixed-radix
//!   state indexing, roots of unity, and the Fourier frame transform.
//! - [`subset_sum`]: instances, brute-force solution enumeration with a
//!   canonical ordering, and density bookkeeping.
//! - [`basis`]: coset states, the subset-sum basis and its tilde/hat
//!   variants, orthogonality and spanning checks.
//! - [`unitary`]: basis-to-standard and indicator unitaries as label maps,
//!   with dense materialization for cross-checks.
//! - [`simulator`]: the two collision algorithms (sampled and exact), the
//!   coset-space projective measurement, and the bit-extraction demo.
//! - [`experiments`]: Monte Carlo and exhaustive verification harness.
//! - [`report`] / [`suite`]: JSON run reports and the full check suite.

pub mod basis;
pub mod error;
pub mod experiments;
pub mod math;
pub mod params;
pub mod report;
pub mod rng;
pub mod simulator;
pub mod state;
pub mod subset_sum;
pub mod suite;
pub mod unitary;

pub use error::{Error, Result};
pub use params::{DihedralParams, StateIndex, DEFAULT_AMPLITUDE_BUDGET};
pub use state::{DenseState, FrameDirection, HybridState};

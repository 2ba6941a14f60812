//! Hong-Ou-Mandel interference of two single photons stored one after the
//! other in a two-channel (tripod) quantum memory and read out in two stages.
//!
//! The memory acts on each temporal Schmidt mode of its kernel like a lossy
//! balanced beam splitter, so two identical photons leave the cell bunched in
//! one of the two readout pulses. The crate covers:
//!
//! * [`units`] and [`grid`]: dimensionless parameters and quadrature grids,
//! * [`kernel`]: memory kernels (ideal, Gaussian test kernel, resonant fast
//!   memory, imported matrices) and their physicality checks,
//! * [`schmidt`]: Nyström Schmidt decomposition, mode projections,
//! * [`interference`]: output photon statistics, HOM/NOON metrics, delay scans
//!   and a brute-force Fock-space oracle,
//! * [`io`]: kernel files and CSV/JSON exports,
//! * [`cli`]: the configuration-driven experiment runner behind the
//!   `hom-memory` binary.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod grid;
pub mod interference;
pub mod io;
pub mod kernel;
pub mod schmidt;
pub mod units;

pub use envelope::{Pulse, TemporalEnvelope};
pub use error::{Error, Result};
pub use grid::{QuadratureRule, TimeGrid};
pub use interference::{
    analytic_statistics, delay_sweep, fock_oracle, hom_metrics, HomMetrics, OutputStatistics,
    TwoPhotonInput,
};
pub use kernel::{
    kernel_fast_memory, kernel_from_matrix, kernel_gaussian_toy, kernel_ideal, KernelKind,
    MemoryKernel,
};
pub use schmidt::{decompose, project, reconstruct, schmidt_number, ModeAmplitudes, SchmidtDecomposition};
pub use units::{DimensionlessParams, UnitsConfig};

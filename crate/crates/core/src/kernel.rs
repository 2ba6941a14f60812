//! Memory kernels `G(t, t′)` sampled on a [`TimeGrid`].
//!
//! Every kernel stored here is the effective input→output map of a full
//! write/store/read cycle: the readout time reversal `G(T_W − t, T_W − t′)`
//! is applied by the builders, so downstream code never sees it.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::error::{invalid, Error, Result};
use crate::grid::{gauss_legendre, TimeGrid};
use crate::schmidt;

/// Relative asymmetry tolerated in a kernel handed to the decomposition.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Relative asymmetry above which an imported matrix is rejected outright.
pub const IMPORT_SYMMETRY_TOLERANCE: f64 = 1e-6;
/// Slack allowed on the physicality bound `λ ≤ 1`.
pub const PHYSICALITY_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Ideal,
    GaussianToy,
    FastMemory,
    External,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Ideal => "ideal",
            KernelKind::GaussianToy => "gaussian-toy",
            KernelKind::FastMemory => "fast-memory",
            KernelKind::External => "external",
        })
    }
}

#[derive(Clone, Debug)]
pub struct MemoryKernel {
    grid: Arc<TimeGrid>,
    matrix: DMatrix<f64>,
    kind: KernelKind,
    input_asymmetry: f64,
}

impl MemoryKernel {
    pub(crate) fn from_symmetric(
        grid: Arc<TimeGrid>,
        matrix: DMatrix<f64>,
        kind: KernelKind,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), grid.len());
        Self { grid, matrix, kind, input_asymmetry: 0.0 }
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    /// Relative asymmetry of the matrix before it was symmetrized on import.
    /// Zero for kernels built in this crate.
    pub fn input_asymmetry(&self) -> f64 {
        self.input_asymmetry
    }

    /// `max |G_kl − G_lk| / max |G|`.
    pub fn symmetry_residual(&self) -> f64 {
        relative_asymmetry(&self.matrix)
    }

    /// `∫ dt′ G(t_k, t′) f(t′)` evaluated with the grid quadrature.
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.len() {
            return Err(invalid(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                self.len()
            )));
        }
        let w = self.grid.weights();
        Ok((0..self.len())
            .map(|k| (0..self.len()).map(|l| self.matrix[(k, l)] * w[l] * samples[l]).sum())
            .collect())
    }

    /// `S = D^{1/2} G D^{1/2}` with `D = diag(w)`, the matrix whose spectrum is
    /// the discretized integral operator's spectrum.
    pub fn weighted_matrix(&self) -> DMatrix<f64> {
        let sw: Vec<f64> = self.grid.weights().iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(self.len(), self.len(), |k, l| sw[k] * self.matrix[(k, l)] * sw[l])
    }

    /// Commutator of the vacuum amplitudes that keeps the output fields
    /// canonical, `C(t,t′) = δ(t−t′) − ∫ dt₁ G(t,t₁) G(t′,t₁)`, in the weighted
    /// form `D^{1/2} C D^{1/2} = I − S²`.
    pub fn weighted_commutator(&self) -> DMatrix<f64> {
        let s = self.weighted_matrix();
        DMatrix::identity(self.len(), self.len()) - &s * &s
    }

    /// Smallest eigenvalue of [`weighted_commutator`](Self::weighted_commutator).
    /// A negative value means the kernel amplifies some mode.
    pub fn commutator_min_eigenvalue(&self) -> f64 {
        let c = self.weighted_commutator();
        let c = (&c + c.transpose()) * 0.5;
        SymmetricEigen::new(c).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for k in 0..n {
        for l in (k + 1)..n {
            worst = worst.max((m[(k, l)] - m[(l, k)]).abs());
        }
    }
    worst / scale
}

/// Discrete delta function, `G_kl = δ_kl / w_k`: the memory returns every
/// input mode unchanged.
pub fn kernel_ideal(grid: Arc<TimeGrid>) -> MemoryKernel {
    let n = grid.len();
    let w = grid.weights();
    let matrix = DMatrix::from_fn(n, n, |k, l| if k == l { 1.0 / w[k] } else { 0.0 });
    MemoryKernel::from_symmetric(grid, matrix, KernelKind::Ideal)
}

/// Gaussian test kernel with a tunable spectrum.
///
/// `G(t,t′) ∝ exp(−(t−t′)²/2σ²) · exp(−((t−T_W/2)² + (t′−T_W/2)²)/2(4σ)²)`, scaled
/// so that the largest Schmidt amplitude `√λ₁` equals `peak`. `σ = ∞` gives
/// the constant (rank one) kernel.
pub fn kernel_gaussian_toy(grid: Arc<TimeGrid>, sigma: f64, peak: f64) -> Result<MemoryKernel> {
    if !(sigma > 0.0) {
        return Err(invalid(format!("correlation time must be positive, got {sigma}")));
    }
    if !(peak > 0.0 && peak <= 1.0) {
        return Err(invalid(format!("peak amplitude must lie in (0, 1], got {peak}")));
    }
    let n = grid.len();
    let t = grid.nodes();
    let centre = grid.write_time() / 2.0;
    let envelope_width = 4.0 * sigma;
    let profile: Vec<f64> = t
        .iter()
        .map(|&tk| {
            let d = tk - centre;
            (-(d * d) / (2.0 * envelope_width * envelope_width)).exp()
        })
        .collect();
    let raw = DMatrix::from_fn(n, n, |k, l| {
        let d = t[k] - t[l];
        let corr = if sigma.is_infinite() { 1.0 } else { (-(d * d) / (2.0 * sigma * sigma)).exp() };
        corr * profile[k] * profile[l]
    });
    let raw = MemoryKernel::from_symmetric(grid, raw, KernelKind::GaussianToy);
    let top = schmidt::largest_amplitude(&raw);
    if !(top.is_finite() && top > f64::MIN_POSITIVE) {
        return Err(Error::DegenerateKernel(format!(
            "gaussian kernel with sigma = {sigma} has no usable amplitude ({top:e})"
        )));
    }
    let MemoryKernel { grid, matrix, .. } = raw;
    Ok(MemoryKernel::from_symmetric(grid, matrix * (peak / top), KernelKind::GaussianToy))
}

/// One sample of the resonant fast-memory write kernel, `J₀(2√(z t))`.
pub fn fast_memory_write_kernel(z: f64, t: f64) -> f64 {
    j0(2.0 * (z * t).max(0.0).sqrt())
}

/// Write-then-read kernel of the resonant fast memory,
/// `K(t,t′) = ∫₀ᴸ dz W(z, T_W − t) W(z, T_W − t′)`, with the spatial integral
/// done by `nz`-point Gauss–Legendre quadrature.
///
/// The write map conserves excitation number, so the resulting Schmidt
/// amplitudes are bounded by one; the decomposition still checks it.
pub fn kernel_fast_memory(grid: Arc<TimeGrid>, length: f64, nz: usize) -> Result<MemoryKernel> {
    if !(length.is_finite() && length > 0.0) {
        return Err(invalid(format!("L must be positive, got {length}")));
    }
    if nz < 2 {
        return Err(invalid(format!("spatial quadrature needs at least 2 points, got {nz}")));
    }
    let n = grid.len();
    let tw = grid.write_time();
    let (z, wz) = gauss_legendre(nz, 0.0, length);
    // rows: z nodes scaled by sqrt of their weights, columns: time nodes
    let write = DMatrix::from_fn(nz, n, |i, k| {
        wz[i].sqrt() * fast_memory_write_kernel(z[i], tw - grid.nodes()[k])
    });
    let matrix = write.tr_mul(&write);
    // tr_mul is symmetric up to summation order; make it exact
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    Ok(MemoryKernel::from_symmetric(grid, matrix, KernelKind::FastMemory))
}

/// Wraps an externally computed kernel matrix, symmetrizing it by averaging.
pub fn kernel_from_matrix(grid: Arc<TimeGrid>, matrix: DMatrix<f64>) -> Result<MemoryKernel> {
    let n = grid.len();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(invalid(format!(
            "kernel matrix is {}x{}, grid has {n} nodes",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(invalid("kernel matrix contains non-finite entries"));
    }
    let residual = relative_asymmetry(&matrix);
    if residual > IMPORT_SYMMETRY_TOLERANCE {
        return Err(Error::NonSymmetric { residual, tolerance: IMPORT_SYMMETRY_TOLERANCE });
    }
    let symmetric = (&matrix + matrix.transpose()) * 0.5;
    let mut kernel = MemoryKernel::from_symmetric(grid, symmetric, KernelKind::External);
    kernel.input_asymmetry = residual;
    Ok(kernel)
}

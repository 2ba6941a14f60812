//! Schmidt decomposition of a symmetric memory kernel,
//! `G(t,t′) = Σᵢ √λᵢ ψᵢ(t) ψᵢ(t′)`.
//!
//! The integral operator is discretized with the Nyström method: the
//! eigenproblem is solved for `S = D^{1/2} G D^{1/2}` (`D` the quadrature
//! weights), so eigenvectors `v` map to mode functions `ψ = D^{-1/2} v` that are
//! orthonormal under the quadrature inner product.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::envelope::{same_grid, TemporalEnvelope};
use crate::error::{invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::{KernelKind, MemoryKernel, PHYSICALITY_SLACK, SYMMETRY_TOLERANCE};

/// Default relative cutoff `ε`: modes with `λᵢ < ε λ₁` are dropped.
pub const DEFAULT_CUTOFF: f64 = 1e-12;
/// Negative Nyström eigenvalues smaller than this (relative to the largest)
/// are treated as quadrature noise and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-9;
/// Tolerance on the quadrature Gram matrix of the modes.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    grid: Arc<TimeGrid>,
    eigenvalues: Vec<f64>,
    /// Column `i` holds `ψᵢ(t_k)`.
    modes: DMatrix<f64>,
}

/// Largest eigenvalue of the weighted kernel matrix.
pub(crate) fn largest_amplitude(kernel: &MemoryKernel) -> f64 {
    SymmetricEigen::new(kernel.weighted_matrix())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Decomposes `kernel`, keeping modes with `λᵢ ≥ cutoff · λ₁`.
pub fn decompose(kernel: &MemoryKernel, cutoff: f64) -> Result<SchmidtDecomposition> {
    if !(0.0..1.0).contains(&cutoff) {
        return Err(invalid(format!("cutoff must lie in [0, 1), got {cutoff}")));
    }
    let residual = kernel.symmetry_residual();
    if residual > SYMMETRY_TOLERANCE {
        return Err(Error::NonSymmetric { residual, tolerance: SYMMETRY_TOLERANCE });
    }
    let grid = kernel.grid().clone();
    let eig = SymmetricEigen::new(kernel.weighted_matrix());

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let top = eig.eigenvalues[order[0]].max(0.0);
    let bottom = eig.eigenvalues[order[order.len() - 1]];
    if bottom < 0.0 && -bottom > NEGATIVE_CLAMP * top {
        return Err(Error::Unphysical {
            invariant: "Schmidt amplitudes must be non-negative".into(),
            value: bottom,
        });
    }
    let lambda_max = top * top;
    if lambda_max > 1.0 + PHYSICALITY_SLACK {
        return Err(Error::Unphysical {
            invariant: "largest Schmidt eigenvalue must not exceed 1".into(),
            value: lambda_max,
        });
    }

    let threshold = cutoff * lambda_max;
    let inv_sqrt_w: Vec<f64> = grid.weights().iter().map(|w| 1.0 / w.sqrt()).collect();
    let mut eigenvalues = Vec::new();
    let mut columns = Vec::new();
    for &i in &order {
        let mu = eig.eigenvalues[i].max(0.0);
        let lambda = mu * mu;
        if lambda < threshold {
            break;
        }
        eigenvalues.push(lambda);
        let v = eig.eigenvectors.column(i);
        columns.push(v.iter().zip(&inv_sqrt_w).map(|(x, s)| x * s).collect::<Vec<f64>>());
    }
    let n = grid.len();
    let mut modes = DMatrix::from_fn(n, columns.len(), |k, i| columns[i][k]);
    fix_signs(&mut modes);
    Ok(SchmidtDecomposition { grid, eigenvalues, modes })
}

/// First entry of each column whose magnitude exceeds `1e-8 · max` is made positive.
fn fix_signs(modes: &mut DMatrix<f64>) {
    for mut col in modes.column_iter_mut() {
        let scale = col.amax();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-8 * scale).copied() {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

impl SchmidtDecomposition {
    /// Builds a decomposition from explicit eigenvalues and mode functions
    /// (columns of `modes`), checking ordering, physicality and
    /// orthonormality. Mode signs are normalized.
    pub fn from_parts(
        grid: Arc<TimeGrid>,
        eigenvalues: Vec<f64>,
        mut modes: DMatrix<f64>,
    ) -> Result<Self> {
        if modes.nrows() != grid.len() || modes.ncols() != eigenvalues.len() {
            return Err(invalid("mode matrix shape does not match grid and spectrum"));
        }
        if eigenvalues.is_empty() {
            return Err(invalid("decomposition needs at least one mode"));
        }
        if eigenvalues.windows(2).any(|p| p[1] > p[0]) {
            return Err(invalid("eigenvalues must be in descending order"));
        }
        if let Some(&bad) = eigenvalues.iter().find(|&&l| !(0.0..=1.0 + PHYSICALITY_SLACK).contains(&l)) {
            return Err(Error::Unphysical {
                invariant: "Schmidt eigenvalues must lie in [0, 1]".into(),
                value: bad,
            });
        }
        fix_signs(&mut modes);
        let dec = Self { grid, eigenvalues, modes };
        let err = dec.orthonormality_error();
        if err > ORTHONORMALITY_TOLERANCE {
            return Err(invalid(format!("mode functions are not orthonormal (error {err:e})")));
        }
        Ok(dec)
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    /// `λᵢ`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn retained(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `ψᵢ` sampled on the grid (zero-based `i`).
    pub fn mode(&self, i: usize) -> Vec<f64> {
        self.modes.column(i).iter().copied().collect()
    }

    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// Quadrature Gram matrix `Σ_k w_k ψᵢ(t_k) ψⱼ(t_k)`.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(self.grid.weights()));
        self.modes.transpose() * w * &self.modes
    }

    /// `max |Gram − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let k = self.retained();
        (self.gram_matrix() - DMatrix::identity(k, k)).amax()
    }

    /// Mode `i` (zero-based) as a normalized envelope.
    pub fn mode_envelope(&self, i: usize) -> Result<TemporalEnvelope> {
        if i >= self.retained() {
            return Err(invalid(format!("mode {} requested, {} retained", i + 1, self.retained())));
        }
        TemporalEnvelope::from_real(self.grid.clone(), &self.mode(i))
    }
}

/// `G̃_kl = Σᵢ √λᵢ ψᵢ(t_k) ψᵢ(t_l)` over the retained modes.
pub fn reconstruct(dec: &SchmidtDecomposition) -> MemoryKernel {
    let n = dec.grid.len();
    let mut scaled = dec.modes.clone();
    for (i, mut col) in scaled.column_iter_mut().enumerate() {
        col *= dec.eigenvalues[i].sqrt();
    }
    let matrix = &scaled * dec.modes.transpose();
    let matrix = DMatrix::from_fn(n, n, |k, l| 0.5 * (matrix[(k, l)] + matrix[(l, k)]));
    MemoryKernel::from_symmetric(dec.grid.clone(), matrix, KernelKind::External)
}

/// Overlaps `cᵢ` of an envelope with the Schmidt modes plus the weight left over.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeAmplitudes {
    pub coefficients: Vec<Complex64>,
    /// `r`, with `Σ|cᵢ|² + r² = 1`.
    pub residual_norm: f64,
}

impl ModeAmplitudes {
    /// Keeps the first `k` coefficients, moving the rest into the residual.
    pub fn truncate(&self, k: usize) -> ModeAmplitudes {
        let k = k.min(self.coefficients.len());
        let dropped: f64 = self.coefficients[k..].iter().map(|c| c.norm_sqr()).sum();
        ModeAmplitudes {
            coefficients: self.coefficients[..k].to_vec(),
            residual_norm: (self.residual_norm.powi(2) + dropped).sqrt(),
        }
    }

    pub fn weight(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `cᵢ = Σ_k w_k ψᵢ(t_k) f(t_k)`.
pub fn project(envelope: &TemporalEnvelope, dec: &SchmidtDecomposition) -> Result<ModeAmplitudes> {
    same_grid(envelope.grid(), &dec.grid)?;
    let w = dec.grid.weights();
    let f = envelope.samples();
    let coefficients: Vec<Complex64> = dec
        .modes
        .column_iter()
        .map(|psi| psi.iter().zip(f).zip(w).map(|((p, s), wk)| s * (p * wk)).sum())
        .collect();
    let captured: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    let r2 = 1.0 - captured;
    if r2 < -1e-12 {
        return Err(invalid(format!(
            "mode projection captures {captured}, more than the envelope's unit norm"
        )));
    }
    Ok(ModeAmplitudes { coefficients, residual_norm: r2.max(0.0).sqrt() })
}

/// Effective number of modes, `(Σλᵢ)² / Σλᵢ²`.
pub fn schmidt_number(dec: &SchmidtDecomposition) -> Result<f64> {
    let sum: f64 = dec.eigenvalues.iter().sum();
    let sum_sq: f64 = dec.eigenvalues.iter().map(|l| l * l).sum();
    if !(sum_sq > 0.0) {
        return Err(Error::DegenerateKernel("all Schmidt eigenvalues vanish".into()));
    }
    Ok(sum * sum / sum_sq)
}

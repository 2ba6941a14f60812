//! Two single photons through the per-mode lossy beam-splitter channel of the
//! memory,
//!
//! ```text
//! ê±,ᵢ = √λᵢ (ê₁,ᵢ ± ê₂,ᵢ)/√2 + √(1−λᵢ) ê_vac±,ᵢ
//! ```
//!
//! `+` is the first readout stage (both driving fields in phase) and `−` the
//! second (opposite phases). Each Schmidt mode and each readout stage gets its
//! own vacuum input.
//!
//! [`analytic_statistics`] evaluates the output photon statistics in closed
//! form from overlaps of the single-photon output amplitudes;
//! [`fock_oracle`] builds the state explicitly in the occupation-number basis
//! and is kept as an independent check.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::{same_grid, Pulse, TemporalEnvelope};
use crate::error::{invalid, Error, Result};
use crate::grid::{QuadratureRule, TimeGrid};
use crate::schmidt::{project, SchmidtDecomposition};

/// Default bound on the envelope weight dropped by the mode cutoff.
pub const DEFAULT_TRUNCATION_BOUND: f64 = 1e-6;
/// Largest mode cutoff accepted by [`fock_oracle`].
pub const ORACLE_MAX_MODES: usize = 6;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// The two sequentially written pulses and the memory they go through.
#[derive(Clone, Debug)]
pub struct TwoPhotonInput<'a> {
    decomposition: &'a SchmidtDecomposition,
    envelope_1: TemporalEnvelope,
    envelope_2: TemporalEnvelope,
}

impl<'a> TwoPhotonInput<'a> {
    pub fn new(
        decomposition: &'a SchmidtDecomposition,
        envelope_1: TemporalEnvelope,
        envelope_2: TemporalEnvelope,
    ) -> Result<Self> {
        same_grid(envelope_1.grid(), decomposition.grid())?;
        same_grid(envelope_2.grid(), decomposition.grid())?;
        Ok(Self { decomposition, envelope_1, envelope_2 })
    }

    pub fn decomposition(&self) -> &SchmidtDecomposition {
        self.decomposition
    }

    pub fn envelope_1(&self) -> &TemporalEnvelope {
        &self.envelope_1
    }

    pub fn envelope_2(&self) -> &TemporalEnvelope {
        &self.envelope_2
    }

    /// The same input with the two pulses exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            decomposition: self.decomposition,
            envelope_1: self.envelope_2.clone(),
            envelope_2: self.envelope_1.clone(),
        }
    }
}

/// Photon-number statistics of the two readout pulses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputStatistics {
    pub p00: f64,
    pub p10: f64,
    pub p01: f64,
    pub p20: f64,
    pub p11: f64,
    pub p02: f64,
    /// Two-photon block on `{|2,0⟩, |1,1⟩, |0,2⟩}`, unnormalized.
    #[serde(skip)]
    pub rho2: [[C; 3]; 3],
    /// Envelope weight dropped by the mode cutoff (both photons together).
    pub truncation_weight: f64,
}

impl OutputStatistics {
    /// `P(n₊, n₋)`; zero for outcomes with more than two photons.
    pub fn probability(&self, plus: usize, minus: usize) -> f64 {
        match (plus, minus) {
            (0, 0) => self.p00,
            (1, 0) => self.p10,
            (0, 1) => self.p01,
            (2, 0) => self.p20,
            (1, 1) => self.p11,
            (0, 2) => self.p02,
            _ => 0.0,
        }
    }

    pub fn probabilities(&self) -> [f64; 6] {
        [self.p00, self.p10, self.p01, self.p20, self.p11, self.p02]
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    pub fn two_photon_trace(&self) -> f64 {
        (self.rho2[0][0] + self.rho2[1][1] + self.rho2[2][2]).re
    }

    /// Largest difference in probabilities or two-photon block entries.
    pub fn max_deviation(&self, other: &OutputStatistics) -> f64 {
        let p = self
            .probabilities()
            .iter()
            .zip(other.probabilities())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let r = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| (self.rho2[a][b] - other.rho2[a][b]).norm())
            .fold(0.0, f64::max);
        p.max(r)
    }

    /// Smallest eigenvalue of the Hermitian two-photon block.
    pub fn rho2_min_eigenvalue(&self) -> f64 {
        // embed the 3×3 Hermitian matrix as a real symmetric 6×6
        let m = DMatrix::from_fn(6, 6, |r, c| {
            let z = self.rho2[r % 3][c % 3];
            match (r / 3, c / 3) {
                (0, 0) | (1, 1) => z.re,
                (0, 1) => -z.im,
                _ => z.im,
            }
        });
        nalgebra::SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Interference figures of merit derived from [`OutputStatistics`].
///
/// The conditional fields are `None` when no two-photon event is possible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomMetrics {
    pub coincidence: f64,
    pub bunching_conditional: Option<f64>,
    pub noon_fidelity: Option<f64>,
    pub total_efficiency: f64,
}

pub fn hom_metrics(stats: &OutputStatistics) -> HomMetrics {
    let trace = stats.p20 + stats.p11 + stats.p02;
    let (bunching, noon) = if trace > 0.0 {
        let r = &stats.rho2;
        // ⟨NOON|ρ₂|NOON⟩ with |NOON⟩ = (|2,0⟩ − |0,2⟩)/√2
        let overlap = 0.5 * (r[0][0] + r[2][2] - r[0][2] - r[2][0]).re;
        let tr = stats.two_photon_trace();
        (Some((stats.p20 + stats.p02) / trace), Some((overlap / tr).clamp(0.0, 1.0)))
    } else {
        log::warn!("no two-photon events: conditional HOM metrics are undefined");
        (None, None)
    };
    HomMetrics {
        coincidence: stats.p11,
        bunching_conditional: bunching,
        noon_fidelity: noon,
        total_efficiency: trace,
    }
}

/// Mode coefficients of both photons, cut to `k` modes and renormalized.
struct ModeInput {
    first: Vec<C>,
    second: Vec<C>,
    eigenvalues: Vec<f64>,
    truncation_weight: f64,
}

fn mode_input(input: &TwoPhotonInput<'_>, k: usize, bound: f64) -> Result<ModeInput> {
    let dec = input.decomposition;
    if k == 0 {
        return Err(invalid("mode cutoff must be at least 1"));
    }
    if k > dec.retained() {
        return Err(invalid(format!(
            "mode cutoff {k} exceeds the {} retained Schmidt modes",
            dec.retained()
        )));
    }
    let a = project(&input.envelope_1, dec)?.truncate(k);
    let b = project(&input.envelope_2, dec)?.truncate(k);
    let truncation_weight = a.residual_norm.powi(2) + b.residual_norm.powi(2);
    if truncation_weight > bound {
        return Err(Error::InsufficientModes { weight: truncation_weight, bound });
    }
    let normalize = |c: Vec<C>| -> Result<Vec<C>> {
        let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(invalid("envelope has no weight on the retained modes"));
        }
        Ok(c.into_iter().map(|x| x / norm).collect())
    };
    Ok(ModeInput {
        first: normalize(a.coefficients)?,
        second: normalize(b.coefficients)?,
        eigenvalues: dec.eigenvalues()[..k].to_vec(),
        truncation_weight,
    })
}

/// Closed-form output statistics using the first `k` Schmidt modes.
pub fn analytic_statistics(input: &TwoPhotonInput<'_>, k: usize) -> Result<OutputStatistics> {
    analytic_statistics_with_bound(input, k, DEFAULT_TRUNCATION_BOUND)
}

pub fn analytic_statistics_with_bound(
    input: &TwoPhotonInput<'_>,
    k: usize,
    bound: f64,
) -> Result<OutputStatistics> {
    let m = mode_input(input, k, bound)?;
    Ok(statistics_from_modes(&m.first, &m.second, &m.eigenvalues, m.truncation_weight))
}

fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sq(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Statistics of `a†(φ₁) a†(φ₂)|0⟩`, where `φ_m` is photon `m`'s output
/// amplitude: `x±` on the readout modes and an orthogonal loss part.
fn statistics_from_modes(c1: &[C], c2: &[C], lambda: &[f64], truncation_weight: f64) -> OutputStatistics {
    let amp = |c: &[C], sign: f64| -> Vec<C> {
        c.iter().zip(lambda).map(|(x, l)| x * (sign * (l / 2.0).sqrt())).collect()
    };
    let loss = |c: &[C]| -> f64 { c.iter().zip(lambda).map(|(x, l)| x.norm_sqr() * (1.0 - l)).sum() };
    // photon 1 enters both readouts with +, photon 2 with ± (the stage sign)
    let x = [amp(c1, 1.0), amp(c1, 1.0)];
    let y = [amp(c2, 1.0), amp(c2, -1.0)];
    let (lx, ly) = (loss(c1), loss(c2));
    let (xp, xm, yp, ym) = (&x[0], &x[1], &y[0], &y[1]);

    // lost photons end in mutually orthogonal modes, so no loss cross terms
    let p20 = norm_sq(xp) * norm_sq(yp) + inner(xp, yp).norm_sqr();
    let p02 = norm_sq(xm) * norm_sq(ym) + inner(xm, ym).norm_sqr();
    let p11 = norm_sq(xp) * norm_sq(ym)
        + norm_sq(xm) * norm_sq(yp)
        + 2.0 * (inner(xp, yp) * inner(ym, xm)).re;
    let p10 = norm_sq(xp) * ly + norm_sq(yp) * lx;
    let p01 = norm_sq(xm) * ly + norm_sq(ym) * lx;
    let p00 = lx * ly;

    // port-resolved two-photon density matrix, ports ordered ++, +-, -+, --
    let ports = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut rho = [[ZERO; 4]; 4];
    for (a, &(s, s2)) in ports.iter().enumerate() {
        for (b, &(t, t2)) in ports.iter().enumerate() {
            rho[a][b] = 0.5
                * (inner(&x[t], &x[s]) * inner(&y[t2], &y[s2])
                    + inner(&x[t], &y[s]) * inner(&y[t2], &x[s2])
                    + inner(&y[t], &x[s]) * inner(&x[t2], &y[s2])
                    + inner(&y[t], &y[s]) * inner(&x[t2], &x[s2]));
        }
    }
    OutputStatistics { p00, p10, p01, p20, p11, p02, rho2: compress_ports(&rho), truncation_weight }
}

/// Maps the 4×4 port density matrix onto `{|2,0⟩, |1,1⟩, |0,2⟩}`.
///
/// `|1,1⟩` collects both the exchange-symmetric and the antisymmetric port
/// combinations; the antisymmetric one is orthogonal to the other two after
/// the mode labels are traced out and only adds to the diagonal.
fn compress_ports(rho: &[[C; 4]; 4]) -> [[C; 3]; 3] {
    let h = FRAC_1_SQRT_2;
    let basis: [[f64; 4]; 3] = [[1.0, 0.0, 0.0, 0.0], [0.0, h, h, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let mut out = [[ZERO; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut z = ZERO;
            for i in 0..4 {
                for j in 0..4 {
                    z += rho[i][j] * (basis[a][i] * basis[b][j]);
                }
            }
            out[a][b] = z;
        }
    }
    let anti = 0.5 * (rho[1][1] - rho[1][2] - rho[2][1] + rho[2][2]);
    out[1][1] += anti;
    out
}

/// Brute-force output statistics in the occupation-number basis.
///
/// Every input creation operator is expanded over the `4k` output modes
/// (two readouts and two loss ports per Schmidt mode) through an explicit
/// orthogonal matrix, bosonic `√n` factors are applied when both photons
/// land in one mode, and outcome probabilities are summed over the resulting
/// Fock amplitudes.
pub fn fock_oracle(input: &TwoPhotonInput<'_>, k: usize) -> Result<OutputStatistics> {
    fock_oracle_with_bound(input, k, DEFAULT_TRUNCATION_BOUND)
}

pub fn fock_oracle_with_bound(
    input: &TwoPhotonInput<'_>,
    k: usize,
    bound: f64,
) -> Result<OutputStatistics> {
    if k == 0 || k > ORACLE_MAX_MODES {
        return Err(invalid(format!("oracle supports 1..={ORACLE_MAX_MODES} modes, got {k}")));
    }
    let m = mode_input(input, k, bound)?;
    Ok(fock_statistics(&m.first, &m.second, &m.eigenvalues, m.truncation_weight))
}

/// Output mode `(port, i)` ↦ `port·k + i`; ports 0 = `+`, 1 = `−`, 2/3 = loss.
/// Input mode `(port, i)` likewise, ports 0/1 = channels 1/2, 2/3 = vacua.
fn channel_matrix(lambda: &[f64]) -> DMatrix<f64> {
    let k = lambda.len();
    let mut u = DMatrix::zeros(4 * k, 4 * k);
    for (i, &l) in lambda.iter().enumerate() {
        let g = (l / 2.0).sqrt();
        let r = (1.0 - l).max(0.0).sqrt();
        let q = ((1.0 - l).max(0.0) / 2.0).sqrt();
        let t = l.sqrt();
        let block = [
            [g, g, r, 0.0],
            [g, -g, 0.0, r],
            [q, q, -t, 0.0],
            [q, -q, 0.0, -t],
        ];
        for (a, row) in block.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                u[(a * k + i, b * k + i)] = *v;
            }
        }
    }
    u
}

fn fock_statistics(c1: &[C], c2: &[C], lambda: &[f64], truncation_weight: f64) -> OutputStatistics {
    let k = lambda.len();
    let u = channel_matrix(lambda);
    let dim = 4 * k;
    // Heisenberg e_out = U e_in  ⇒  a†_in(b) = Σ_p U[p, b] a†_out(p)
    let mut state: BTreeMap<(usize, usize), C> = BTreeMap::new();
    for (i, a) in c1.iter().enumerate() {
        for (j, b) in c2.iter().enumerate() {
            let coeff = a * b;
            for p in 0..dim {
                let up = u[(p, i)];
                if up == 0.0 {
                    continue;
                }
                for q in 0..dim {
                    let uq = u[(q, k + j)];
                    if uq == 0.0 {
                        continue;
                    }
                    let bosonic = if p == q { std::f64::consts::SQRT_2 } else { 1.0 };
                    let key = (p.min(q), p.max(q));
                    *state.entry(key).or_insert(ZERO) += coeff * (up * uq * bosonic);
                }
            }
        }
    }

    let port = |mode: usize| mode / k;
    let mut counts = [[0.0f64; 3]; 3];
    for (&(p, q), amp) in &state {
        let plus = (port(p) == 0) as usize + (port(q) == 0) as usize;
        let minus = (port(p) == 1) as usize + (port(q) == 1) as usize;
        counts[plus][minus] += amp.norm_sqr();
    }

    // first-quantized two-photon wavefunction on the 2k readout modes
    let s = 2 * k;
    let mut wave = vec![ZERO; s * s];
    for (&(p, q), amp) in &state {
        if p >= s || q >= s {
            continue;
        }
        if p == q {
            wave[p * s + p] = *amp;
        } else {
            wave[p * s + q] = amp * FRAC_1_SQRT_2;
            wave[q * s + p] = amp * FRAC_1_SQRT_2;
        }
    }
    let ports = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut rho = [[ZERO; 4]; 4];
    for (a, &(pa, pa2)) in ports.iter().enumerate() {
        for (b, &(pb, pb2)) in ports.iter().enumerate() {
            let mut z = ZERO;
            for i in 0..k {
                for j in 0..k {
                    z += wave[(pa * k + i) * s + pa2 * k + j]
                        * wave[(pb * k + i) * s + pb2 * k + j].conj();
                }
            }
            rho[a][b] = z;
        }
    }

    OutputStatistics {
        p00: counts[0][0],
        p10: counts[1][0],
        p01: counts[0][1],
        p20: counts[2][0],
        p11: counts[1][1],
        p02: counts[0][2],
        rho2: compress_ports(&rho),
        truncation_weight,
    }
}

/// One point of a delay scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayPoint {
    pub delay: f64,
    /// `|⟨f, f_delayed⟩|²` on the grid.
    pub overlap_sq: f64,
    /// Fraction of the delayed pulse pushed out of the window.
    pub window_truncation: f64,
    pub statistics: OutputStatistics,
    pub metrics: HomMetrics,
}

/// Statistics for the second pulse delayed against the first by each entry
/// of `delays`. Delayed pulses are cut at the window edges and renormalized.
pub fn delay_sweep(
    dec: &SchmidtDecomposition,
    base: &Pulse,
    delays: &[f64],
    k: usize,
    bound: f64,
) -> Result<Vec<DelayPoint>> {
    let grid = dec.grid().clone();
    let tw = grid.write_time();
    if let Some(&d) = delays.iter().find(|d| !(d.abs() < tw)) {
        return Err(invalid(format!("delay {d} moves the pulse out of the window [0, {tw}]")));
    }
    let first = TemporalEnvelope::from_pulse(grid.clone(), base)?;
    delays
        .par_iter()
        .map(|&delay| {
            let (second, cut) = TemporalEnvelope::from_pulse_delayed(grid.clone(), base, delay)?;
            let overlap_sq = first.overlap(&second)?.norm_sqr();
            let input = TwoPhotonInput::new(dec, first.clone(), second)?;
            let statistics = analytic_statistics_with_bound(&input, k, bound)?;
            let metrics = hom_metrics(&statistics);
            Ok(DelayPoint { delay, overlap_sq, window_truncation: cut, statistics, metrics })
        })
        .collect()
}

/// A randomized instance for oracle comparisons: `k` orthonormal modes on a
/// small Gauss–Legendre grid with eigenvalues drawn from `[0, 1]`, and two
/// random complex envelopes spanned by those modes.
pub struct RandomInstance {
    pub decomposition: SchmidtDecomposition,
    pub envelope_1: TemporalEnvelope,
    pub envelope_2: TemporalEnvelope,
}

impl RandomInstance {
    pub fn input(&self) -> TwoPhotonInput<'_> {
        TwoPhotonInput {
            decomposition: &self.decomposition,
            envelope_1: self.envelope_1.clone(),
            envelope_2: self.envelope_2.clone(),
        }
    }
}

pub fn random_instance(rng: &mut impl Rng, k: usize) -> Result<RandomInstance> {
    if k == 0 {
        return Err(invalid("random instance needs at least one mode"));
    }
    let n = k + 4;
    let grid = std::sync::Arc::new(TimeGrid::new(n, 1.0, QuadratureRule::GaussLegendre)?);
    // Gram–Schmidt on random vectors in the √w-weighted space
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let w = grid.weights();
    let modes = DMatrix::from_fn(n, k, |r, c| basis[c][r] / w[r].sqrt());
    let mut eigenvalues: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=1.0)).collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let decomposition = SchmidtDecomposition::from_parts(grid.clone(), eigenvalues, modes)?;
    let envelope = |rng: &mut dyn rand::RngCore| -> Result<TemporalEnvelope> {
        let coeffs: Vec<C> = (0..k)
            .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let samples = (0..n)
            .map(|r| (0..k).map(|c| coeffs[c] * decomposition.modes()[(r, c)]).sum())
            .collect();
        TemporalEnvelope::normalized(grid.clone(), samples)
    };
    let envelope_1 = envelope(rng)?;
    let envelope_2 = envelope(rng)?;
    Ok(RandomInstance { decomposition, envelope_1, envelope_2 })
}

/// Runs `trials` random instances (mode counts cycling through `1..=max_k`)
/// through both routes and returns the largest deviation.
pub fn oracle_suite(seed: u64, trials: usize, max_k: usize) -> Result<f64> {
    let max_k = max_k.clamp(1, ORACLE_MAX_MODES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for t in 0..trials {
        let k = 1 + t % max_k;
        let inst = random_instance(&mut rng, k)?;
        let input = inst.input();
        let a = analytic_statistics(&input, k)?;
        let b = fock_oracle(&input, k)?;
        worst = worst.max(a.max_deviation(&b));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{kernel_gaussian_toy, kernel_ideal};
    use crate::schmidt::decompose;
    use std::sync::Arc;

    fn gl(n: usize) -> Arc<TimeGrid> {
        Arc::new(TimeGrid::new(n, 1.0, QuadratureRule::GaussLegendre).unwrap())
    }

    fn single_mode(lambda: f64) -> SchmidtDecomposition {
        let grid = gl(6);
        let ideal = decompose(&kernel_ideal(grid.clone()), 0.0).unwrap();
        let modes = ideal.modes().columns(0, 1).into_owned();
        SchmidtDecomposition::from_parts(grid, vec![lambda], modes).unwrap()
    }

    fn two_modes(l1: f64, l2: f64) -> SchmidtDecomposition {
        let grid = gl(6);
        let ideal = decompose(&kernel_ideal(grid.clone()), 0.0).unwrap();
        let modes = ideal.modes().columns(0, 2).into_owned();
        SchmidtDecomposition::from_parts(grid, vec![l1, l2], modes).unwrap()
    }

    fn both(input: &TwoPhotonInput<'_>, k: usize) -> [OutputStatistics; 2] {
        [analytic_statistics(input, k).unwrap(), fock_oracle(input, k).unwrap()]
    }

    #[test]
    fn ideal_identical_photons_bunch() {
        let grid = gl(32);
        let dec = decompose(&kernel_ideal(grid.clone()), 0.0).unwrap();
        let f = TemporalEnvelope::from_pulse(grid, &Pulse::Gaussian { center: 0.5, width: 0.1 })
            .unwrap();
        let input = TwoPhotonInput::new(&dec, f.clone(), f).unwrap();
        let s = analytic_statistics(&input, 32).unwrap();
        assert!((s.p20 - 0.5).abs() < 1e-12 && (s.p02 - 0.5).abs() < 1e-12);
        assert!(s.p11.abs() < 1e-12);
        assert!(s.p00.abs() + s.p10.abs() + s.p01.abs() < 1e-12);
        let m = hom_metrics(&s);
        assert!((m.noon_fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert!((m.bunching_conditional.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mode_loss_law() {
        for lambda in [0.0, 0.3, 0.81, 1.0] {
            let dec = single_mode(lambda);
            let psi = dec.mode_envelope(0).unwrap();
            let input = TwoPhotonInput::new(&dec, psi.clone(), psi).unwrap();
            for s in both(&input, 1) {
                assert!((s.p20 - lambda * lambda / 2.0).abs() < 1e-14);
                assert!((s.p02 - lambda * lambda / 2.0).abs() < 1e-14);
                assert!(s.p11.abs() < 1e-14);
                assert!((s.p10 - lambda * (1.0 - lambda)).abs() < 1e-14);
                assert!((s.p01 - lambda * (1.0 - lambda)).abs() < 1e-14);
                assert!((s.p00 - (1.0 - lambda).powi(2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn orthogonal_modes_split_independently() {
        let (l1, l2) = (0.9, 0.4);
        let dec = two_modes(l1, l2);
        let input =
            TwoPhotonInput::new(&dec, dec.mode_envelope(0).unwrap(), dec.mode_envelope(1).unwrap())
                .unwrap();
        for s in both(&input, 2) {
            assert!((s.p11 - l1 * l2 / 2.0).abs() < 1e-14);
            assert!((s.p20 - l1 * l2 / 4.0).abs() < 1e-14);
            assert!((s.p02 - l1 * l2 / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn total_loss_leaves_vacuum() {
        let dec = two_modes(0.0, 0.0);
        let f = TemporalEnvelope::from_real(
            dec.grid().clone(),
            &dec.mode(0).iter().zip(dec.mode(1)).map(|(a, b)| a - 0.5 * b).collect::<Vec<_>>(),
        )
        .unwrap();
        let input = TwoPhotonInput::new(&dec, f.clone(), f).unwrap();
        for s in both(&input, 2) {
            assert!((s.p00 - 1.0).abs() < 1e-15);
        }
        let m = hom_metrics(&analytic_statistics(&input, 2).unwrap());
        assert_eq!(m.noon_fidelity, None);
        assert_eq!(m.bunching_conditional, None);
        assert_eq!(m.total_efficiency, 0.0);
    }

    #[test]
    fn ideal_orthogonal_metrics() {
        let dec = two_modes(1.0, 1.0);
        let input =
            TwoPhotonInput::new(&dec, dec.mode_envelope(0).unwrap(), dec.mode_envelope(1).unwrap())
                .unwrap();
        for s in both(&input, 2) {
            let m = hom_metrics(&s);
            assert!((m.coincidence - 0.5).abs() < 1e-14);
            assert!((m.bunching_conditional.unwrap() - 0.5).abs() < 1e-14);
            assert!((m.noon_fidelity.unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn insufficient_modes_is_an_error() {
        let grid = gl(16);
        let dec = decompose(&kernel_ideal(grid.clone()), 0.0).unwrap();
        let f = TemporalEnvelope::from_pulse(grid, &Pulse::Gaussian { center: 0.5, width: 0.1 })
            .unwrap();
        let input = TwoPhotonInput::new(&dec, f.clone(), f).unwrap();
        assert!(matches!(analytic_statistics(&input, 2), Err(Error::InsufficientModes { .. })));
        assert!(analytic_statistics(&input, 0).is_err());
        assert!(analytic_statistics(&input, 17).is_err());
        assert!(fock_oracle(&input, 7).is_err());
    }

    #[test]
    fn oracle_agrees_on_random_instances() {
        let worst = oracle_suite(7, 60, 4).unwrap();
        assert!(worst < 1e-12, "{worst:e}");
    }

    #[test]
    fn statistics_invariants_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=5 {
            for _ in 0..10 {
                let inst = random_instance(&mut rng, k).unwrap();
                let input = inst.input();
                let s = analytic_statistics(&input, k).unwrap();
                assert!((s.total_probability() - 1.0).abs() < 1e-12);
                assert!(s.probabilities().iter().all(|&p| (-1e-15..=1.0 + 1e-15).contains(&p)));
                assert!(s.rho2_min_eigenvalue() >= -1e-10);
                assert!((s.rho2[0][0].re - s.p20).abs() < 1e-12);
                assert!((s.rho2[1][1].re - s.p11).abs() < 1e-12);
                assert!((s.rho2[2][2].re - s.p02).abs() < 1e-12);
                let m = hom_metrics(&s);
                if let Some(b) = m.bunching_conditional {
                    assert!((b + s.p11 / s.two_photon_trace() - 1.0).abs() < 1e-12);
                }

                let swapped = analytic_statistics(&input.swapped(), k).unwrap();
                for (a, b) in s.probabilities().iter().zip(swapped.probabilities()) {
                    assert!((a - b).abs() < 1e-14);
                }
                let phased = TwoPhotonInput::new(
                    input.decomposition(),
                    input.envelope_1().with_phase(0.7),
                    input.envelope_2().with_phase(-2.1),
                )
                .unwrap();
                let p = analytic_statistics(&phased, k).unwrap();
                assert!(p.max_deviation(&s) < 1e-14);
            }
        }
    }

    #[test]
    fn common_mode_never_coincides() {
        let k = kernel_gaussian_toy(gl(32), 0.1, 0.9).unwrap();
        let dec = decompose(&k, 0.0).unwrap();
        for i in 0..3 {
            let psi = dec.mode_envelope(i).unwrap();
            let input = TwoPhotonInput::new(&dec, psi.clone(), psi.with_phase(1.3)).unwrap();
            let s = analytic_statistics(&input, dec.retained()).unwrap();
            assert!(s.p11.abs() < 1e-14, "mode {i}: {}", s.p11);
        }
    }

    #[test]
    fn ideal_delay_law() {
        let grid = gl(64);
        let dec = decompose(&kernel_ideal(grid), 0.0).unwrap();
        let pulse = Pulse::Gaussian { center: 0.25, width: 1.0 / 16.0 };
        let delays = [0.0, 0.02, 0.05, 0.1, 0.2, 0.4];
        let pts = delay_sweep(&dec, &pulse, &delays, 64, DEFAULT_TRUNCATION_BOUND).unwrap();
        assert!(pts[0].metrics.coincidence.abs() < 1e-12);
        for p in &pts {
            assert!((p.metrics.coincidence - (1.0 - p.overlap_sq) / 2.0).abs() < 1e-12);
        }
        for w in pts.windows(2) {
            assert!(w[0].metrics.coincidence <= w[1].metrics.coincidence + 1e-15);
        }
        assert!(delay_sweep(&dec, &pulse, &[1.0], 64, 1e-6).is_err());
    }
}

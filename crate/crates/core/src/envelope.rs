//! Single-photon temporal envelopes sampled on a grid.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::TimeGrid;

/// Tolerance on `Σ_k w_k |f(t_k)|² = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Wave packet `f(t)` of a single photon, normalized under the grid quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalEnvelope {
    grid: Arc<TimeGrid>,
    samples: Vec<Complex64>,
}

impl TemporalEnvelope {
    /// Wraps samples that are already normalized.
    pub fn new(grid: Arc<TimeGrid>, samples: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, samples.len())?;
        let norm = weighted_norm_sq(&grid, &samples);
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(invalid(format!("envelope norm is {norm}, expected 1")));
        }
        Ok(Self { grid, samples })
    }

    /// Rescales arbitrary samples to unit norm.
    pub fn normalized(grid: Arc<TimeGrid>, samples: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, samples.len())?;
        let norm = weighted_norm_sq(&grid, &samples);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("envelope has zero weight on the grid"));
        }
        let scale = 1.0 / norm.sqrt();
        let samples = samples.into_iter().map(|s| s * scale).collect();
        Ok(Self { grid, samples })
    }

    pub fn from_real(grid: Arc<TimeGrid>, samples: &[f64]) -> Result<Self> {
        Self::normalized(grid, samples.iter().map(|&s| Complex64::new(s, 0.0)).collect())
    }

    pub fn from_pulse(grid: Arc<TimeGrid>, pulse: &Pulse) -> Result<Self> {
        Self::from_pulse_delayed(grid, pulse, 0.0).map(|(env, _)| env)
    }

    /// Samples `pulse(t − delay)` on the grid and renormalizes it. Also returns
    /// the fraction of the pulse's on-grid weight pushed out of the window.
    pub fn from_pulse_delayed(
        grid: Arc<TimeGrid>,
        pulse: &Pulse,
        delay: f64,
    ) -> Result<(Self, f64)> {
        let reference: Vec<Complex64> = grid.nodes().iter().map(|&t| pulse.eval(t)).collect();
        let shifted: Vec<Complex64> =
            grid.nodes().iter().map(|&t| pulse.eval(t - delay)).collect();
        let kept = weighted_norm_sq(&grid, &shifted);
        let full = weighted_norm_sq(&grid, &reference);
        if !(full > 0.0) {
            return Err(invalid("pulse has zero weight on the grid"));
        }
        if !(kept > 0.0) {
            return Err(invalid(format!("pulse delayed by {delay} lies outside the window")));
        }
        let truncation = (1.0 - kept / full).max(0.0);
        Ok((Self::normalized(grid, shifted)?, truncation))
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// `Σ_k w_k f*(t_k) g(t_k)`.
    pub fn overlap(&self, other: &TemporalEnvelope) -> Result<Complex64> {
        same_grid(&self.grid, &other.grid)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .zip(self.grid.weights())
            .map(|((a, b), &w)| a.conj() * b * w)
            .sum())
    }

    /// The same envelope multiplied by `e^{iφ}`.
    pub fn with_phase(&self, phase: f64) -> Self {
        let rot = Complex64::from_polar(1.0, phase);
        Self { grid: self.grid.clone(), samples: self.samples.iter().map(|s| s * rot).collect() }
    }
}

fn weighted_norm_sq(grid: &TimeGrid, samples: &[Complex64]) -> f64 {
    samples.iter().zip(grid.weights()).map(|(s, &w)| w * s.norm_sqr()).sum()
}

fn check_len(grid: &TimeGrid, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(invalid(format!("{len} samples for a grid of {} nodes", grid.len())));
    }
    Ok(())
}

pub(crate) fn same_grid(a: &Arc<TimeGrid>, b: &Arc<TimeGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(invalid("objects live on different time grids"))
    }
}

/// Analytic pulse shapes that can be evaluated anywhere on the time axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Pulse {
    /// `exp(−(t − center)² / 2 width²)`; `width` is the amplitude standard deviation.
    Gaussian { center: f64, width: f64 },
    /// Constant on `[start, end)`, zero elsewhere.
    Rectangular { start: f64, end: f64 },
    /// Piecewise-linear interpolation through `(times, values)`, zero outside.
    Interpolated { times: Vec<f64>, values: Vec<f64> },
}

impl Pulse {
    pub fn eval(&self, t: f64) -> Complex64 {
        let v = match self {
            Pulse::Gaussian { center, width } => {
                let d = (t - center) / width;
                (-0.5 * d * d).exp()
            }
            Pulse::Rectangular { start, end } => {
                if t >= *start && t < *end {
                    1.0
                } else {
                    0.0
                }
            }
            Pulse::Interpolated { times, values } => interpolate(times, values, t),
        };
        Complex64::new(v, 0.0)
    }

    /// Linear interpolant through a real envelope's samples.
    pub fn from_envelope(env: &TemporalEnvelope) -> Self {
        Pulse::Interpolated {
            times: env.grid().nodes().to_vec(),
            values: env.samples().iter().map(|s| s.re).collect(),
        }
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    if times.is_empty() || t < times[0] || t > times[times.len() - 1] {
        return 0.0;
    }
    let i = times.partition_point(|&x| x <= t);
    if i == 0 {
        return values[0];
    }
    if i >= times.len() {
        return values[times.len() - 1];
    }
    let (t0, t1) = (times[i - 1], times[i]);
    let s = (t - t0) / (t1 - t0);
    values[i - 1] * (1.0 - s) + values[i] * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadratureRule;

    fn grid(n: usize) -> Arc<TimeGrid> {
        Arc::new(TimeGrid::new(n, 1.0, QuadratureRule::GaussLegendre).unwrap())
    }

    #[test]
    fn pulse_sampling_is_normalized() {
        let env = TemporalEnvelope::from_pulse(
            grid(64),
            &Pulse::Gaussian { center: 0.5, width: 0.125 },
        )
        .unwrap();
        assert!((env.overlap(&env).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unnormalized_samples_are_rejected() {
        let g = grid(8);
        let samples = vec![Complex64::new(2.0, 0.0); 8];
        assert!(TemporalEnvelope::new(g.clone(), samples.clone()).is_err());
        assert!(TemporalEnvelope::normalized(g.clone(), samples).is_ok());
        assert!(TemporalEnvelope::normalized(g, vec![Complex64::new(0.0, 0.0); 8]).is_err());
    }

    #[test]
    fn shifted_gaussian_overlap_matches_closed_form() {
        let g = grid(96);
        let pulse = Pulse::Gaussian { center: 0.3, width: 0.05 };
        let base = TemporalEnvelope::from_pulse(g.clone(), &pulse).unwrap();
        let (shifted, cut) = TemporalEnvelope::from_pulse_delayed(g, &pulse, 0.08).unwrap();
        assert!(cut < 1e-12);
        let want = (-(0.08f64 * 0.08) / (4.0 * 0.05 * 0.05)).exp();
        assert!((base.overlap(&shifted).unwrap().re - want).abs() < 1e-12);
    }

    #[test]
    fn delay_out_of_window_is_an_error() {
        let pulse = Pulse::Rectangular { start: 0.0, end: 0.5 };
        assert!(TemporalEnvelope::from_pulse_delayed(grid(16), &pulse, 1.0).is_err());
    }

    #[test]
    fn partially_shifted_out_reports_truncation() {
        let g = grid(200);
        let pulse = Pulse::Rectangular { start: 0.5, end: 1.0 };
        let (_, cut) = TemporalEnvelope::from_pulse_delayed(g, &pulse, 0.25).unwrap();
        assert!((cut - 0.5).abs() < 0.02, "{cut}");
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let g = grid(10);
        let env = TemporalEnvelope::from_real(
            g.clone(),
            &g.nodes().iter().map(|t| t * (1.0 - t)).collect::<Vec<_>>(),
        )
        .unwrap();
        let pulse = Pulse::from_envelope(&env);
        for (t, s) in g.nodes().iter().zip(env.samples()) {
            assert!((pulse.eval(*t) - s).norm() < 1e-15);
        }
        assert_eq!(pulse.eval(-0.1).re, 0.0);
    }

    #[test]
    fn grids_must_match() {
        let a = TemporalEnvelope::from_pulse(grid(8), &Pulse::Gaussian { center: 0.5, width: 0.2 })
            .unwrap();
        let b = TemporalEnvelope::from_pulse(grid(9), &Pulse::Gaussian { center: 0.5, width: 0.2 })
            .unwrap();
        assert!(a.overlap(&b).is_err());
    }
}

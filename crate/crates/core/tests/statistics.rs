use std::sync::Arc;

use hom_memory::interference::{
    analytic_statistics_with_bound, fock_oracle_with_bound, oracle_suite, random_instance,
    DEFAULT_TRUNCATION_BOUND,
};
use hom_memory::{
    analytic_statistics, decompose, delay_sweep, fock_oracle, hom_metrics, kernel_fast_memory,
    kernel_ideal, Pulse, QuadratureRule, TemporalEnvelope, TimeGrid, TwoPhotonInput,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;

fn gl(n: usize, tw: f64) -> Arc<TimeGrid> {
    Arc::new(TimeGrid::new(n, tw, QuadratureRule::GaussLegendre).unwrap())
}

#[test]
fn hundred_random_instances_agree_with_oracle() {
    let worst = oracle_suite(20261018, 100, 4).unwrap();
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn ideal_memory_bunching_and_distinguishable_limit() {
    let grid = gl(64, 1.0);
    let dec = decompose(&kernel_ideal(grid.clone()), 0.0).unwrap();
    let g = TemporalEnvelope::from_pulse(grid.clone(), &Pulse::Gaussian { center: 0.5, width: 0.1 })
        .unwrap();
    let input = TwoPhotonInput::new(&dec, g.clone(), g).unwrap();
    let m = hom_metrics(&analytic_statistics(&input, 64).unwrap());
    assert!(m.coincidence.abs() < 1e-12);
    assert!((m.noon_fidelity.unwrap() - 1.0).abs() < 1e-12);

    let a = TemporalEnvelope::from_pulse(grid.clone(), &Pulse::Rectangular { start: 0.0, end: 0.5 })
        .unwrap();
    let b = TemporalEnvelope::from_pulse(grid, &Pulse::Rectangular { start: 0.5, end: 1.0 }).unwrap();
    let input = TwoPhotonInput::new(&dec, a, b).unwrap();
    let m = hom_metrics(&analytic_statistics(&input, 64).unwrap());
    assert!((m.coincidence - 0.5).abs() < 1e-12);
    assert!((m.noon_fidelity.unwrap() - 0.5).abs() < 1e-12);
    assert!((m.bunching_conditional.unwrap() - 0.5).abs() < 1e-12);
}

/// Normalized overlap of a Gaussian with its delayed copy, both cut to the
/// window `[0, tw]`, from the error function.
fn windowed_gaussian_overlap(center: f64, width: f64, delay: f64, tw: f64) -> f64 {
    let mass = |m: f64| erf((tw - m) / width) - erf(-m / width);
    (-(delay * delay) / (4.0 * width * width)).exp() * mass(center + delay / 2.0)
        / (mass(center) * mass(center + delay)).sqrt()
}

#[test]
fn ideal_dip_follows_overlap_law() {
    let tw = 1.0;
    let (center, width) = (tw / 4.0, tw / 16.0);
    let grid = gl(64, tw);
    let dec = decompose(&kernel_ideal(grid), 0.0).unwrap();
    let delays: Vec<f64> = (0..41).map(|i| 0.5 * i as f64 / 40.0).collect();
    let pts = delay_sweep(&dec, &Pulse::Gaussian { center, width }, &delays, 64, 1e-6).unwrap();
    for p in &pts {
        let ov = windowed_gaussian_overlap(center, width, p.delay, tw);
        let want = (1.0 - ov * ov) / 2.0;
        assert!((p.metrics.coincidence - want).abs() <= 1e-8, "delay {}: {} vs {want}", p.delay, p.metrics.coincidence);
    }
    let zero = &pts[0];
    assert!(pts.iter().all(|p| p.metrics.coincidence >= zero.metrics.coincidence));
}

#[test]
fn delay_sweep_agrees_with_oracle_on_a_small_grid() {
    // six nodes keep the full mode basis within the oracle's reach
    let grid = gl(6, 1.0);
    let pulse = Pulse::Gaussian { center: 0.3, width: 0.15 };
    let delays = [0.0, 0.1, 0.2, 0.3, 0.45];
    for kernel in [kernel_ideal(grid.clone()), kernel_fast_memory(grid.clone(), 3.0, 32).unwrap()] {
        let dec = decompose(&kernel, 0.0).unwrap();
        assert_eq!(dec.retained(), 6);
        let pts = delay_sweep(&dec, &pulse, &delays, 6, DEFAULT_TRUNCATION_BOUND).unwrap();
        let first = TemporalEnvelope::from_pulse(grid.clone(), &pulse).unwrap();
        for p in &pts {
            let (second, _) = TemporalEnvelope::from_pulse_delayed(grid.clone(), &pulse, p.delay).unwrap();
            let input = TwoPhotonInput::new(&dec, first.clone(), second).unwrap();
            let oracle = fock_oracle(&input, 6).unwrap();
            assert!(p.statistics.max_deviation(&oracle) <= 1e-8);
            if kernel.kind() == hom_memory::KernelKind::Ideal {
                assert!((p.metrics.coincidence - (1.0 - p.overlap_sq) / 2.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn fast_memory_dip_matches_regression_curve() {
    let text = include_str!("data/fast_memory_dip_baseline.csv");
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 41);
    let grid = gl(64, 1.0);
    let dec = decompose(&kernel_fast_memory(grid, 3.0, 64).unwrap(), 0.0).unwrap();
    let delays: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let pulse = Pulse::Gaussian { center: 0.35, width: 0.08 };
    let pts = delay_sweep(&dec, &pulse, &delays, 64, DEFAULT_TRUNCATION_BOUND).unwrap();
    for (p, r) in pts.iter().zip(&rows) {
        assert!((p.metrics.coincidence - r[1]).abs() < 1e-10, "delay {}", r[0]);
        assert!((p.metrics.total_efficiency - r[2]).abs() < 1e-10);
        assert!((p.metrics.noon_fidelity.unwrap() - r[3]).abs() < 1e-8);
        assert!((p.statistics.total_probability() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_mode_loss_never_creates_coincidences() {
    let grid = gl(64, 1.0);
    for length in [0.5, 2.0, 4.0] {
        let dec = decompose(&kernel_fast_memory(grid.clone(), length, 64).unwrap(), 0.0).unwrap();
        let psi = dec.mode_envelope(0).unwrap();
        let input = TwoPhotonInput::new(&dec, psi.clone(), psi).unwrap();
        let s = analytic_statistics(&input, dec.retained()).unwrap();
        let l = dec.eigenvalues()[0];
        assert!(s.p11.abs() < 1e-12);
        assert!((hom_metrics(&s).total_efficiency - l * l).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statistics_invariants(seed in any::<u64>(), k in 1usize..=4, phase in -3.2f64..3.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, k).unwrap();
        let input = inst.input();
        let s = analytic_statistics_with_bound(&input, k, 1e-9).unwrap();
        prop_assert!((s.total_probability() - 1.0).abs() <= 1e-12);
        prop_assert!(s.rho2_min_eigenvalue() >= -1e-10);
        prop_assert!((s.rho2[0][0].re - s.p20).abs() <= 1e-12);
        prop_assert!((s.rho2[1][1].re - s.p11).abs() <= 1e-12);
        prop_assert!((s.rho2[2][2].re - s.p02).abs() <= 1e-12);

        let oracle = fock_oracle_with_bound(&input, k, 1e-9).unwrap();
        prop_assert!(s.max_deviation(&oracle) <= 1e-8);

        let swapped = analytic_statistics(&input.swapped(), k).unwrap();
        for (a, b) in s.probabilities().iter().zip(swapped.probabilities()) {
            prop_assert!((a - b).abs() <= 1e-13);
        }

        let rotated = TwoPhotonInput::new(
            input.decomposition(),
            input.envelope_1().with_phase(phase),
            input.envelope_2().clone(),
        ).unwrap();
        prop_assert!(analytic_statistics(&rotated, k).unwrap().max_deviation(&s) <= 1e-13);

        let m = hom_metrics(&s);
        for v in [Some(m.coincidence), m.bunching_conditional, m.noon_fidelity, Some(m.total_efficiency)].into_iter().flatten() {
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&v));
        }
    }
}

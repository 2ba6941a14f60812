// Coincidence probability against the delay between the two stored pulses.

use std::error::Error;
use std::sync::Arc;

use hom_memory::interference::DEFAULT_TRUNCATION_BOUND;
use hom_memory::{decompose, delay_sweep, kernel_fast_memory, Pulse, QuadratureRule, TimeGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(TimeGrid::new(64, 1.0, QuadratureRule::GaussLegendre)?);
    let dec = decompose(&kernel_fast_memory(grid, 3.0, 64)?, 0.0)?;
    let pulse = Pulse::Gaussian { center: 0.35, width: 0.08 };
    let delays: Vec<f64> = (0..=10).map(|i| 0.03 * i as f64).collect();
    let points = delay_sweep(&dec, &pulse, &delays, dec.retained(), DEFAULT_TRUNCATION_BOUND)?;

    println!("delay  |<1|2>|^2  P11        P11/(P11+P20+P02)  NOON");
    for p in &points {
        let s = &p.statistics;
        println!(
            "{:.2}   {:.5}    {:.3e}  {:.5}            {:.5}",
            p.delay,
            p.overlap_sq,
            s.p11,
            s.p11 / s.two_photon_trace(),
            p.metrics.noon_fidelity.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Two identical photons through an ideal memory leave bunched in one readout
// pulse; photons in disjoint time slots do not interfere.

use std::error::Error;
use std::sync::Arc;

use hom_memory::{
    analytic_statistics, decompose, hom_metrics, kernel_ideal, Pulse, QuadratureRule,
    TemporalEnvelope, TimeGrid, TwoPhotonInput,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(TimeGrid::new(64, 1.0, QuadratureRule::GaussLegendre)?);
    let dec = decompose(&kernel_ideal(grid.clone()), 0.0)?;

    let g = TemporalEnvelope::from_pulse(grid.clone(), &Pulse::Gaussian { center: 0.5, width: 0.1 })?;
    let same = analytic_statistics(&TwoPhotonInput::new(&dec, g.clone(), g)?, dec.retained())?;
    let m = hom_metrics(&same);
    println!("identical:  P20={:.6} P11={:.6} P02={:.6}", same.p20, same.p11, same.p02);
    println!("            NOON fidelity {:.6}", m.noon_fidelity.unwrap_or(f64::NAN));
    assert!(same.p11.abs() < 1e-10);

    let early = TemporalEnvelope::from_pulse(grid.clone(), &Pulse::Rectangular { start: 0.0, end: 0.5 })?;
    let late = TemporalEnvelope::from_pulse(grid, &Pulse::Rectangular { start: 0.5, end: 1.0 })?;
    let apart = analytic_statistics(&TwoPhotonInput::new(&dec, early, late)?, dec.retained())?;
    println!("disjoint:   P20={:.6} P11={:.6} P02={:.6}", apart.p20, apart.p11, apart.p02);
    assert!((apart.p11 - 0.5).abs() < 1e-10);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

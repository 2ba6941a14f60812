// Schmidt modes of the Gaussian test kernel: spectrum, Schmidt number,
// reconstruction and projection of a pulse onto the modes.

use std::error::Error;
use std::sync::Arc;

use hom_memory::io::write_spectrum_csv;
use hom_memory::{
    decompose, kernel_gaussian_toy, project, reconstruct, schmidt_number, Pulse, QuadratureRule,
    TemporalEnvelope, TimeGrid,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(TimeGrid::new(64, 1.0, QuadratureRule::GaussLegendre)?);
    let kernel = kernel_gaussian_toy(grid.clone(), 0.1, 0.9)?;
    let dec = decompose(&kernel, 1e-6)?;

    let mut csv = Vec::new();
    write_spectrum_csv(&dec, &mut csv)?;
    for line in String::from_utf8(csv)?.lines().take(6) {
        println!("{line}");
    }
    println!("retained {} modes, Schmidt number {:.4}", dec.retained(), schmidt_number(&dec)?);

    let back = reconstruct(&dec);
    let rel = (back.matrix() - kernel.matrix()).norm() / kernel.matrix().norm();
    println!("relative reconstruction error {rel:.2e}");

    let pulse = TemporalEnvelope::from_pulse(grid, &Pulse::Gaussian { center: 0.5, width: 0.125 })?;
    let c = project(&pulse, &dec)?;
    for (i, ci) in c.coefficients.iter().take(4).enumerate() {
        println!("c_{} = {:+.6}", i + 1, ci.re);
    }
    println!("weight outside the retained modes {:.2e}", c.residual_norm.powi(2));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

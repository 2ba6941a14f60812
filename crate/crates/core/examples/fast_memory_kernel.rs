// Resonant fast-memory kernel built from laboratory parameters.

use std::error::Error;
use std::sync::Arc;

use hom_memory::units::UnitsConfig;
use hom_memory::{decompose, kernel_fast_memory, schmidt_number, QuadratureRule, TimeGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // rates in 1/us, lengths in cm
    let lab = UnitsConfig {
        rabi_frequency: 20.0,
        coupling_constant: 1.0,
        linear_concentration: 40.0,
        cell_length: 1.0,
        write_time: 0.1,
        relaxation_rate: 0.05,
        fast_protocol_threshold: 0.1,
    };
    let p = lab.to_dimensionless()?;
    println!("T_W = {}, L = {}, gamma T_W = {}", p.write_time, p.length, lab.decay_product());

    let grid = Arc::new(TimeGrid::new(64, p.write_time, QuadratureRule::GaussLegendre)?);
    let kernel = kernel_fast_memory(grid, p.length, 64)?;
    println!("smallest commutator eigenvalue {:.3e}", kernel.commutator_min_eigenvalue());

    let dec = decompose(&kernel, 1e-12)?;
    let l = dec.eigenvalues();
    println!("lambda = {:.6} {:.6} {:.3e}", l[0], l[1], l[2]);
    println!("Schmidt number {:.4}", schmidt_number(&dec)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

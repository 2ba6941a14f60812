// Sweep of the optical depth: where does a single Schmidt mode dominate?

use std::error::Error;
use std::sync::Arc;

use hom_memory::{decompose, kernel_fast_memory, QuadratureRule, TimeGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = Arc::new(TimeGrid::new(48, 1.0, QuadratureRule::GaussLegendre)?);
    println!("L     lambda_1  lambda_2/lambda_1");
    for length in [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let dec = decompose(&kernel_fast_memory(grid.clone(), length, 48)?, 0.0)?;
        let l = dec.eigenvalues();
        let ratio = l[1] / l[0];
        let mark = if l[0] >= 0.8 && ratio <= 0.3 { "  single mode" } else { "" };
        println!("{length:<5} {:.5}   {ratio:.3e}{mark}", l[0]);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

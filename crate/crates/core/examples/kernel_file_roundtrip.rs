// Saving a kernel to disk and importing it as an external kernel.

use std::error::Error;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::sync::Arc;

use hom_memory::io::{read_kernel, write_kernel};
use hom_memory::{decompose, kernel_fast_memory, KernelKind, QuadratureRule, TimeGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("fast_memory.kernel");

    let grid = Arc::new(TimeGrid::new(32, 1.0, QuadratureRule::Trapezoid)?);
    let kernel = kernel_fast_memory(grid, 2.0, 48)?;
    let mut out = BufWriter::new(File::create(&path)?);
    write_kernel(&kernel, &mut out)?;
    out.flush()?;

    let back = read_kernel(BufReader::new(File::open(&path)?))?;
    assert_eq!(back.kind(), KernelKind::External);
    println!("read {} points, max entry change {:.1e}", back.len(), (back.matrix() - kernel.matrix()).amax());

    let (a, b) = (decompose(&kernel, 0.0)?, decompose(&back, 0.0)?);
    println!("lambda_1 before {:.12}, after {:.12}", a.eigenvalues()[0], b.eigenvalues()[0]);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

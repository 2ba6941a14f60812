// Driving the command-line runner from a configuration file.

use std::error::Error;
use std::path::Path;

use hom_memory::cli;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/hom_fast_memory.toml");
    let dir = tempfile::tempdir()?;
    let out = dir.path().join("hom.json");
    let code = cli::run([
        "hom-memory".as_ref(),
        "hom".as_ref(),
        "--config".as_ref(),
        config.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    if code != cli::EXIT_OK {
        return Err(format!("hom-memory exited with {code}").into());
    }
    println!("{}", std::fs::read_to_string(out)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Closed-form output statistics against the Fock-space simulation.

use std::error::Error;

use hom_memory::interference::{oracle_suite, random_instance};
use hom_memory::{analytic_statistics, fock_oracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = random_instance(&mut rng, 3)?;
    let input = inst.input();
    let fast = analytic_statistics(&input, 3)?;
    let slow = fock_oracle(&input, 3)?;
    println!("        closed form   Fock");
    for (name, (a, b)) in ["P00", "P10", "P01", "P20", "P11", "P02"]
        .iter()
        .zip(fast.probabilities().into_iter().zip(slow.probabilities()))
    {
        println!("{name}     {a:.10}  {b:.10}");
    }

    let worst = oracle_suite(2024, 50, 4)?;
    println!("50 random instances, worst deviation {worst:.2e}");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Reading out an evolved logical operator with single-block measurements only.

use sptmbqc::algebra::blocklocal::spectral_distribution;
use sptmbqc::algebra::{block_local_distribution, block_local_measure, sample_block_local, spin1_bundle, Gate};
use sptmbqc::states::build_aklt_prime;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4;
    let bundle = spin1_bundle(n)?;
    let psi = build_aklt_prime(n)?;
    let z = bundle.group().parse_element("z")?;
    let h = bundle.group().parse_element("x")?;
    let gates = [Gate::new(2, z, 0.9)];

    let exact = block_local_distribution(&bundle, &psi, h, &gates)?;
    let (p_plus, p_minus) = spectral_distribution(&bundle, &psi, h, &gates)?;
    println!("block-local: p(+) = {:.12}, p(-) = {:.12} over {} branches", exact.p_plus, exact.p_minus, exact.leaves.len());
    println!("spectral:    p(+) = {p_plus:.12}, p(-) = {p_minus:.12}");

    let mut rng = sptmbqc::rng::stream(7, 0);
    let one = block_local_measure(&bundle, &psi, h, &gates, &mut rng)?;
    println!("one run: block outcomes {:?}, last {}, sign {:+}", one.blocks, one.last, one.sign);

    let sampled = sample_block_local(&bundle, &psi, h, &gates, 20_000, 7)?;
    println!("sampled mean {:+.4} +- {:.4} (exact {:+.6})", sampled.mean, sampled.std_error, exact.mean());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

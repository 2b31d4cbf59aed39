// String orders and the renormalization factor of small logical rotations.

use sptmbqc::observables::{small_angle_report, standard_string_orders};
use sptmbqc::states::{build_hamiltonian, ground_state, DenseSource, HamiltonianParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    for theta in [0.0, 0.15, 0.3] {
        let gs = ground_state(&build_hamiltonian(&HamiltonianParams::bilinear(n, theta))?)?;
        let src = DenseSource::new(&gs.state)?;
        println!("theta = {theta}");
        for r in standard_string_orders(&src, 3)? {
            println!("  {:9} {} ({}, {}) = {:+.6}", r.kind.label(), r.axis, r.i, r.j, r.value);
        }
        for row in small_angle_report(&src, 3, &[0.1, 0.05, 0.025])? {
            println!("  phi = {:<6} y/phi = {:.8}  nu_z = {:.8}", row.phi, row.effective_factor, row.nu);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

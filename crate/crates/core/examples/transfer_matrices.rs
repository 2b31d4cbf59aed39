// Logical expectations after a gate sequence, directly and through transfer matrices.

use sptmbqc::algebra::{evolved_expectations, mk_matrix, spin1_bundle, Gate};
use sptmbqc::states::build_aklt_prime;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4;
    let bundle = spin1_bundle(n)?;
    let psi = build_aklt_prime(n)?;
    let z = bundle.group().parse_element("z")?;
    let x = bundle.group().parse_element("x")?;
    let gates = [Gate::new(1, z, 0.7), Gate::new(3, x, -1.1)];
    for gate in &gates {
        let m = mk_matrix(&bundle, gate)?;
        println!("gate at site {} about {}: identity matrix? {}", gate.site, bundle.label(gate.element), m.is_identity());
    }
    let evolved = evolved_expectations(&bundle, &psi, &gates)?;
    for (g, (d, t)) in bundle.elements().into_iter().zip(evolved.values.iter().zip(&evolved.transfer)) {
        println!("  <T({})>: direct {:+.12}  transfer {:+.12}", bundle.label(g), d.re, t.re);
    }
    println!("max disagreement {:.1e}", evolved.residual);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// The symmetry bundle of the spin-1 chain, its logical operators and the logical subspace.

use sptmbqc::algebra::{initial_expectations, logical_subspace, spin1_bundle, LogicalFrame};
use sptmbqc::states::{build_aklt_prime, DenseSource};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4;
    let bundle = spin1_bundle(n)?;
    let psi = build_aklt_prime(n)?;
    let summary = bundle.describe();
    println!("group order {} elements {:?}, H = {:?}", summary.order, summary.element_order, summary.h);
    let values = initial_expectations(&bundle, &DenseSource::new(&psi)?)?;
    for (g, v) in bundle.elements().into_iter().zip(&values) {
        println!("  <T({})> = {:+.12}", bundle.label(g), v.re);
    }
    let q = logical_subspace(&bundle, &psi)?;
    println!("logical subspace dimension {}, singular values {:?}", q.dim(), q.singular_values);
    let frame = LogicalFrame::new(&bundle, &values)?;
    println!("frame dimension {}, irreducible: {}", frame.dim(), frame.is_irreducible());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

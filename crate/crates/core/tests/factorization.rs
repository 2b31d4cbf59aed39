//! Away from the AKLT point distant gate clusters are correlated, and the correlation
//! decays with their separation.

use sptmbqc::algebra::transfer::cluster_factorization_residual;
use sptmbqc::algebra::{spin1_bundle, Gate};
use sptmbqc::states::{build_hamiltonian, ground_state, AkltChain, DenseSource, HamiltonianParams};

#[test]
fn cluster_correlations_decay_in_the_haldane_phase() {
    let n = 8;
    let gs = ground_state(&build_hamiltonian(&HamiltonianParams::bilinear(n, 0.15)).unwrap()).unwrap();
    assert!(!gs.is_degenerate());
    let src = DenseSource::new(&gs.state).unwrap();
    let bundle = spin1_bundle(n).unwrap();
    let z = bundle.group().parse_element("z").unwrap();
    let x = bundle.group().parse_element("x").unwrap();
    let residuals: Vec<f64> = (2..=5)
        .map(|d| cluster_factorization_residual(&bundle, &src, &[Gate::new(2, z, 0.8)], &[Gate::new(2 + d, x, 0.6)]).unwrap())
        .collect();
    assert!(residuals[0] > 1e-6, "{residuals:?}");
    assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{residuals:?}");
}

#[test]
fn clusters_factorize_exactly_at_the_aklt_point() {
    let n = 10;
    let bundle = spin1_bundle(n).unwrap();
    let chain = AkltChain::new(n).unwrap();
    let z = bundle.group().parse_element("z").unwrap();
    let y = bundle.group().parse_element("y").unwrap();
    for d in 1..=5 {
        let r = cluster_factorization_residual(&bundle, &chain, &[Gate::new(3, z, 1.1)], &[Gate::new(3 + d, y, 0.4)]).unwrap();
        assert!(r < 1e-14, "d = {d}: {r}");
    }
}

// One adaptive z-rotation: exact path sum, closed form and Monte Carlo side by side.

use sptmbqc::mbqc::{enumerate_paths, monte_carlo, MeasurementPlan};
use sptmbqc::observables::single_rotation_readout;
use sptmbqc::qcore::spin::Axis;
use sptmbqc::states::{build_aklt_prime, DenseSource};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, k, phi) = (6, 3, 0.7);
    let psi = build_aklt_prime(n)?;
    let plan = MeasurementPlan::parse("inline", &format!("n = {n}\nsite.{k} = z {phi} adaptive\n"))?;
    let exact = enumerate_paths(&psi, &plan)?;
    let closed = single_rotation_readout(&DenseSource::new(&psi)?, k, phi)?;
    println!("{} paths, total probability {:.15}", exact.paths, exact.total_probability);
    for axis in Axis::ALL {
        let mc = monte_carlo(&psi, &plan.clone().with_readout(axis), 20_000, 42, 0)?;
        println!(
            "<<sigma^{axis}>>: exact {:+.10}  closed form {:+.10}  sampled {:+.4} +- {:.4}",
            exact.get(axis),
            closed[axis.index()],
            mc.mean,
            mc.stderr
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

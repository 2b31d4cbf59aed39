// Effective single-gate channels on the logical qubit and their approach to a unitary.

use std::f64::consts::FRAC_PI_2;

use sptmbqc::algebra::channel::{log_log_slope, spaced_sites, DensityCheck};
use sptmbqc::algebra::{cptp_apply, lk_rk_beta, spin1_bundle, unitarity_scaling, ChannelParams, Gate, LogicalFrame};
use sptmbqc::states::AkltChain;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 50;
    let bundle = spin1_bundle(n)?;
    let chain = AkltChain::new(n)?;
    let frame = LogicalFrame::from_source(&bundle, &chain)?;
    let z = bundle.group().parse_element("z")?;

    let lk = lk_rk_beta(&bundle, &chain, &Gate::new(10, z, 0.8))?;
    let params = ChannelParams::from_lk_rk(&lk)?;
    let out = cptp_apply(&frame, &frame.initial_density(), &params)?;
    println!("beta = {:.6}, sigma = {:.6}, output valid: {}", params.beta, params.sigma, DensityCheck::of(&out).is_valid());

    let mut points = Vec::new();
    for gates in [2usize, 4, 8, 16] {
        let p = unitarity_scaling(&bundle, &chain, &frame, z, FRAC_PI_2, &spaced_sites(gates, 2, 3), 3)?;
        println!("  {gates:2} gates: target angle {:.6}, deviation {:.3e}", p.target_angle, p.deviation);
        points.push((gates as f64, p.deviation));
    }
    println!("log-log slope {:.3}", log_log_slope(&points));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

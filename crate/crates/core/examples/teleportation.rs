// A single teleportation step through a tilted Bell measurement.

use sptmbqc::mbqc::teleport::{predicted_post_state, teleport_input};
use sptmbqc::mbqc::teleport_step;
use sptmbqc::qcore::linalg::{fidelity, C64};
use sptmbqc::qcore::spin::Axis;
use sptmbqc::qcore::CVector;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let psi = CVector::from_column_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
    let theta = 0.9;
    for branch in teleport_step(&teleport_input(&psi), Axis::Z, theta)? {
        let f = fidelity(&branch.post_state, &predicted_post_state(&psi, branch.outcome, Axis::Z, theta));
        println!("{:?}: probability {:.4}, fidelity with prediction {f:.15}", branch.outcome, branch.probability);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// The full verification report for the spin-1 bundle.

use sptmbqc::algebra::{spin1_bundle, verify_bundle, VerifyOptions};
use sptmbqc::states::build_aklt_prime;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let report = verify_bundle(&spin1_bundle(n)?, &build_aklt_prime(n)?, &VerifyOptions::default())?;
    for c in &report.checks {
        println!("{:5} {:40} {:?}", if c.pass { "pass" } else { "FAIL" }, c.condition, c.residual);
    }
    if !report.all_pass() {
        return Err(format!("{} checks failed", report.failures().len()).into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

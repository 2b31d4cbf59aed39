// Saving a state to the binary cache and loading it back bit for bit.

use sptmbqc::states::{build_aklt_prime, load_state, save_state};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("aklt4.bin");
    let psi = build_aklt_prime(4)?;
    save_state(&path, &psi)?;
    let back = load_state(&path)?;
    let identical = psi.amplitudes() == back.amplitudes();
    println!("{} amplitudes, {} bytes on disk, identical: {identical}", psi.dim(), std::fs::metadata(&path)?.len());
    if !identical {
        return Err("round trip changed the state".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

//! Binary state cache: magic `SPTMBQC1`, N and bulk dimension as little-endian u64,
//! then interleaved little-endian f64 (re, im) pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::qcore::linalg::C64;
use crate::qcore::{ChainSpec, StateVector};

pub const MAGIC: &[u8; 8] = b"SPTMBQC1";

pub fn save_state(path: &Path, state: &StateVector) -> Result<()> {
    let spec = state.chain_spec()?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(spec.n_bulk() as u64).to_le_bytes())?;
    w.write_all(&(spec.bulk_dim() as u64).to_le_bytes())?;
    for a in state.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<StateVector> {
    let bad = |message: String| Error::StateFile { path: path.to_path_buf(), message };
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| bad("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(bad("wrong magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(|_| bad("truncated header".into()))?;
    let n_bulk = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word).map_err(|_| bad("truncated header".into()))?;
    let bulk_dim = u64::from_le_bytes(word) as usize;
    let spec = ChainSpec::new(n_bulk, bulk_dim).map_err(|e| bad(e.to_string()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != spec.total_dim() * 16 {
        return Err(bad(format!("expected {} amplitudes, found {} bytes", spec.total_dim(), bytes.len())));
    }
    let amps = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect();
    StateVector::from_amplitudes(spec.register().clone(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::aklt::build_aklt_prime;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("aklt.bin");
        let psi = build_aklt_prime(3).unwrap();
        save_state(&path, &psi).unwrap();
        assert_eq!(load_state(&path).unwrap(), psi);
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"NOTMAGIC").unwrap();
        assert!(matches!(load_state(&path), Err(Error::StateFile { .. })));
        let psi = build_aklt_prime(2).unwrap();
        save_state(&path, &psi).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 3);
        std::fs::write(&path, bytes).unwrap();
        assert!(load_state(&path).is_err());
    }
}

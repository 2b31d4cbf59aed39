//! Seeded random streams and inverse-CDF outcome sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream `stream` derived from a run seed.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Picks an index from unnormalized non-negative weights by inverse CDF.
///
/// The draw `u` is compared with strict `<` against cumulative weights, so ties at a
/// boundary resolve to the lower index. Returns `None` when the total weight is not positive.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = Some(i);
        }
        cumulative += w;
        if u < cumulative {
            return Some(i);
        }
    }
    last_positive
}

/// Splits `rounds` into `chunks` nearly equal parts; chunk `c` always uses stream `c`,
/// so results do not depend on the worker count.
pub fn chunk_sizes(rounds: u64, chunks: u64) -> Vec<u64> {
    let chunks = chunks.max(1).min(rounds.max(1));
    let base = rounds / chunks;
    let extra = rounds % chunks;
    (0..chunks).map(|c| base + u64::from(c < extra)).collect()
}

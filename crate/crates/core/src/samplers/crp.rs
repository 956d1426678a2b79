use rand::seq::SliceRandom;
use rand::Rng;

use super::rng::SeededRng;
use crate::combinatorics::Composition;
use crate::error::{Error, Result};

/// Two-parameter seating process followed by a uniformly random ordering
/// of the blocks.
///
/// Item `i + 1` opens a new block with probability `(θ + kα)/(i + θ)` when
/// `k` blocks hold the first `i` items, and joins block `j` of size `n_j`
/// with probability `(n_j - α)/(i + θ)`.
pub fn crp_shuffle_sample(
    alpha: f64,
    theta: f64,
    n: usize,
    rng: &mut SeededRng,
) -> Result<Composition> {
    if !(alpha > 0.0 && alpha < 1.0) || theta.is_nan() || theta <= -alpha {
        return Err(Error::Domain(format!(
            "seating rule needs 0 < alpha < 1 and theta > -alpha, got ({alpha}, {theta})"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let mut blocks: Vec<usize> = vec![1];
    for i in 1..n {
        let k = blocks.len() as f64;
        let u = rng.random::<f64>() * (i as f64 + theta);
        let open = theta + k * alpha;
        if u < open {
            blocks.push(1);
            continue;
        }
        let mut acc = open;
        let mut chosen = blocks.len() - 1;
        for (j, &size) in blocks.iter().enumerate() {
            acc += size as f64 - alpha;
            if u < acc {
                chosen = j;
                break;
            }
        }
        blocks[chosen] += 1;
    }
    blocks.shuffle(rng);
    Composition::new(blocks)
}

use rand::Rng;

use super::rng::SeededRng;
use crate::combinatorics::Composition;
use crate::error::Result;
use crate::formulas::DecrementMatrix;
use crate::model::Model;
use crate::rational::to_f64;

/// Regenerative sampler: the first part is drawn from `q(n:·)`, then the
/// rest of the composition from `q(n - λ_1 : ·)`, and so on.
#[derive(Debug, Clone)]
pub struct SequentialSampler {
    /// `cdfs[k]` is the cumulative row for `n = k + 1`.
    cdfs: Vec<Vec<f64>>,
}

impl SequentialSampler {
    pub fn new(model: &Model, n_max: usize) -> Result<Self> {
        let matrix = DecrementMatrix::new(model, n_max)?;
        let cdfs = (1..=n_max)
            .map(|n| {
                let row = matrix.row(n).expect("row computed");
                let mut acc = 0.0;
                row.probs()
                    .iter()
                    .map(|p| {
                        acc += to_f64(p);
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Self { cdfs })
    }

    pub fn n_max(&self) -> usize {
        self.cdfs.len()
    }

    fn first_part(&self, n: usize, rng: &mut SeededRng) -> usize {
        let cdf = &self.cdfs[n - 1];
        let u = rng.random::<f64>() * cdf[n - 1];
        (cdf.partition_point(|&c| c <= u) + 1).min(n)
    }

    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Composition> {
        if n == 0 || n > self.n_max() {
            return Err(crate::error::Error::Domain(format!(
                "sampler prepared for n <= {}, asked for {n}",
                self.n_max()
            )));
        }
        let mut parts = Vec::new();
        let mut left = n;
        while left > 0 {
            let m = self.first_part(left, rng);
            parts.push(m);
            left -= m;
        }
        Composition::new(parts)
    }
}

pub fn sample_sequential(model: &Model, n: usize, rng: &mut SeededRng) -> Result<Composition> {
    SequentialSampler::new(model, n)?.sample(n, rng)
}

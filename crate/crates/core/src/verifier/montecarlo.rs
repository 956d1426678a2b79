use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{CheckReport, Witness};
use crate::combinatorics::Composition;
use crate::error::{Error, Result};
use crate::formulas::pmf_table;
use crate::model::Model;
use crate::rational::{to_f64, Rational};
use crate::samplers::{
    allocate_resampling, subordinator_coupled, truncated_pmf_table, uniform_points, Sampler,
    SamplerKind, SeededRng,
};
use crate::table::{tv_distance, PmfTable};

/// Number of independent generator streams a Monte Carlo run is split
/// into. Fixed, so results depend on the seed only and not on the number
/// of worker threads.
pub const MC_CHUNKS: u64 = 16;

/// Composition counts over `draws` samples, drawn on [`MC_CHUNKS`] streams
/// of `seed` in parallel and merged by summation.
pub fn monte_carlo_counts(
    sampler: &Sampler,
    n: usize,
    draws: u64,
    seed: u64,
) -> Result<BTreeMap<Composition, u64>> {
    let partials = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let share = draws / MC_CHUNKS + u64::from(chunk < draws % MC_CHUNKS);
            let mut rng = SeededRng::substream(seed, chunk);
            let mut counts = BTreeMap::new();
            for _ in 0..share {
                *counts.entry(sampler.sample(n, &mut rng)?).or_insert(0u64) += 1;
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut merged = BTreeMap::new();
    for part in partials {
        for (c, k) in part {
            *merged.entry(c).or_insert(0) += k;
        }
    }
    Ok(merged)
}

/// `3 sqrt(K / 2N)` rounded up to three decimals, for `K` cells and `N`
/// draws.
pub fn calibrated_tolerance(cells: usize, draws: u64) -> f64 {
    let raw = 3.0 * (cells as f64 / (2.0 * draws as f64)).sqrt();
    (raw * 1000.0).ceil() / 1000.0
}

fn worst_cell(empirical: &PmfTable, exact: &PmfTable) -> Option<(Composition, f64, f64)> {
    exact
        .compositions()
        .into_iter()
        .map(|c| (c.clone(), empirical.prob_f64(c), exact.prob_f64(c)))
        .max_by(|a, b| (a.1 - a.2).abs().total_cmp(&(b.1 - b.2).abs()))
}

/// Total variation between the empirical law of `kind` and the exact table
/// of `model` at weight `n`; passes when it is at most `tol`.
pub fn mc_goodness_of_fit(
    model: &Model,
    kind: &SamplerKind,
    n: usize,
    draws: u64,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    if draws < 10_000 {
        return Err(Error::Domain(format!(
            "Monte Carlo checks need at least 10^4 draws, got {draws}"
        )));
    }
    let exact = pmf_table(model, n)?;
    let sampler = Sampler::new(model, kind, n)?;
    let counts = monte_carlo_counts(&sampler, n, draws, seed)?;
    let empirical = PmfTable::from_counts(n, &counts)?;
    let tv = tv_distance(&empirical, &exact)?;
    let (worst, emp, ex) = worst_cell(&empirical, &exact).expect("nonempty table");
    let witness = Witness::Frequency {
        parts: worst.parts().to_vec(),
        empirical: emp,
        exact: ex,
        tv,
    };
    let name = format!("monte-carlo {model} n={n}");
    let report = if tv <= tol {
        CheckReport::pass(name).with_witness(witness)
    } else {
        CheckReport::fail(name, witness)
    };
    Ok(report
        .with_margin(tol - tv)
        .with_detail("tv", tv)
        .with_detail("draws", draws)
        .with_detail("seed", seed)
        .with_detail("tolerance", tol)
        .with_detail("cells", exact.len())
        .with_detail(
            "sampler",
            serde_json::to_value(kind).unwrap_or(serde_json::Value::Null),
        ))
}

/// Composition counts for every truncation in `epsilons`, each draw using
/// one set of points and one coupled Poisson process for all truncations.
pub fn coupled_subordinator_counts(
    theta: f64,
    epsilons: &[f64],
    n: usize,
    draws: u64,
    seed: u64,
) -> Result<Vec<BTreeMap<Composition, u64>>> {
    let partials = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let share = draws / MC_CHUNKS + u64::from(chunk < draws % MC_CHUNKS);
            let mut rng = SeededRng::substream(seed, chunk);
            let mut counts = vec![BTreeMap::new(); epsilons.len()];
            for _ in 0..share {
                let points = uniform_points(n, &mut rng);
                let boxes = subordinator_coupled(theta, epsilons, 1.0, &mut rng, &points)?;
                for (k, pb) in boxes.iter().enumerate() {
                    let mut pts = points.clone();
                    let c = allocate_resampling(pb, &mut pts, &mut rng)?;
                    *counts[k].entry(c).or_insert(0u64) += 1;
                }
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut merged = vec![BTreeMap::new(); epsilons.len()];
    for part in partials {
        for (k, counts) in part.into_iter().enumerate() {
            for (c, m) in counts {
                *merged[k].entry(c).or_insert(0) += m;
            }
        }
    }
    Ok(merged)
}

/// Truncation sweep for the subordinator sampler: TV to the exact harmonic
/// table for each ε in `epsilons` (strictly decreasing). Passes when TV does
/// not increase as ε decreases.
///
/// The truncations are coupled (see [`coupled_subordinator_counts`]), so
/// the sweep compares truncation effects on common sampling noise.
pub fn epsilon_sweep(
    theta: &Rational,
    epsilons: &[f64],
    n: usize,
    draws: u64,
    seed: u64,
) -> Result<CheckReport> {
    if epsilons.is_empty() || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(
            "epsilons must be nonempty and strictly decreasing".into(),
        ));
    }
    if draws < 10_000 {
        return Err(Error::Domain(format!(
            "Monte Carlo checks need at least 10^4 draws, got {draws}"
        )));
    }
    let model = Model::gnedin_g(theta.clone())?;
    let exact = pmf_table(&model, n)?;
    let counts = coupled_subordinator_counts(to_f64(theta), epsilons, n, draws, seed)?;
    let tvs = counts
        .iter()
        .map(|c| tv_distance(&PmfTable::from_counts(n, c)?, &exact))
        .collect::<Result<Vec<f64>>>()?;
    let bias = epsilons
        .iter()
        .map(|&eps| tv_distance(&truncated_pmf_table(to_f64(theta), eps, n)?, &exact))
        .collect::<Result<Vec<f64>>>()?;
    let name = format!("epsilon sweep {model} n={n}");
    let bad = tvs.windows(2).position(|w| w[1] > w[0]);
    let report = match bad {
        None => CheckReport::pass(name).with_witness(Witness::Message {
            text: format!("TV by epsilon: {tvs:?}"),
        }),
        Some(i) => CheckReport::fail(
            name,
            Witness::Message {
                text: format!(
                    "TV rose from {} at epsilon={} to {} at epsilon={}",
                    tvs[i],
                    epsilons[i],
                    tvs[i + 1],
                    epsilons[i + 1]
                ),
            },
        ),
    };
    let margin = tvs
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    Ok(report
        .with_margin(margin)
        .with_detail("epsilons", epsilons.to_vec())
        .with_detail("tv", tvs)
        .with_detail("truncation_tv", bias)
        .with_detail("draws", draws)
        .with_detail("seed", seed))
}

/// Exact total variation between the law of the `ε`-truncated subordinator
/// sampler and the harmonic table, for each ε in `epsilons` (strictly
/// decreasing). Passes when it does not increase and the value at the
/// smallest ε is at most `tol`.
pub fn truncation_bias_sweep(
    theta: &Rational,
    epsilons: &[f64],
    n: usize,
    tol: f64,
) -> Result<CheckReport> {
    if epsilons.is_empty() || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(
            "epsilons must be nonempty and strictly decreasing".into(),
        ));
    }
    let model = Model::gnedin_g(theta.clone())?;
    let exact = pmf_table(&model, n)?;
    let tvs = epsilons
        .iter()
        .map(|&eps| tv_distance(&truncated_pmf_table(to_f64(theta), eps, n)?, &exact))
        .collect::<Result<Vec<f64>>>()?;
    let last = *tvs.last().expect("nonempty");
    let name = format!("truncation bias {model} n={n}");
    let report = if let Some(i) = tvs.windows(2).position(|w| w[1] > w[0]) {
        CheckReport::fail(
            name,
            Witness::Message {
                text: format!(
                    "TV rose from {} to {} at epsilon={}",
                    tvs[i],
                    tvs[i + 1],
                    epsilons[i + 1]
                ),
            },
        )
    } else if last > tol {
        CheckReport::fail(
            name,
            Witness::Message {
                text: format!(
                    "TV {last} at epsilon={} exceeds {tol}",
                    epsilons[epsilons.len() - 1]
                ),
            },
        )
    } else {
        CheckReport::pass(name)
    };
    Ok(report
        .with_margin(tol - last)
        .with_detail("epsilons", epsilons.to_vec())
        .with_detail("tv", tvs)
        .with_detail("tolerance", tol))
}

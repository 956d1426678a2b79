//! Truncated geometric subordinator driven by a planar Poisson process with
//! intensity `dt × z⁻¹(1-z)^(θ-1) dz`.
//!
//! Atoms with jump size at most `ε` are discarded, which leaves a compound
//! Poisson process of rate `R(ε) = ∫_ε^1 z⁻¹(1-z)^(θ-1) dz`. The process
//! `S_t = 1 - ∏_{τ_j <= t} (1 - ξ_j)` is built jump by jump and every jump
//! contributes the gap `(S_{t-}, S_t)` to the paintbox.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use super::paintbox::{min_spacing, Paintbox};
use super::rng::SeededRng;
use crate::combinatorics::{enumerate_compositions, tail_sums};
use crate::error::{Error, Result};
use crate::table::PmfTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubordinatorConfig {
    pub theta: f64,
    /// Jumps of size at most `epsilon` are dropped.
    pub epsilon: f64,
    /// Stop once the residual `1 - S_t` is below this multiple of the
    /// smallest spacing among uncovered sample points.
    pub residual_cutoff: f64,
    pub max_events: usize,
}

impl SubordinatorConfig {
    pub const DEFAULT_MAX_EVENTS: usize = 10_000_000;

    pub fn new(theta: f64, epsilon: f64) -> Result<Self> {
        let cfg = Self {
            theta,
            epsilon,
            residual_cutoff: 1.0,
            max_events: Self::DEFAULT_MAX_EVENTS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::Parameter(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Parameter(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.residual_cutoff.is_nan() || self.residual_cutoff <= 0.0 {
            return Err(Error::Parameter("residual_cutoff must be positive".into()));
        }
        Ok(())
    }

    /// Event rate `R(ε)` of the truncated process.
    pub fn rate(&self) -> f64 {
        levy_mass(self.theta, self.epsilon, 1.0)
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

const PANELS: usize = 4096;

/// Tanh-sinh rule on `[a, b]`; tolerates integrable endpoint singularities.
/// The integrand receives `(x, x - a, b - x)`, with both distances computed
/// without cancellation so that singular endpoints keep full precision.
fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    const STEP: f64 = 1.0 / 64.0;
    const T_MAX: f64 = 4.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let width = b - a;
    let steps = (T_MAX / STEP) as i32;
    let mut acc = 0.0;
    for k in -steps..=steps {
        let t = k as f64 * STEP;
        let u = half_pi * t.sinh();
        let weight = half_pi * t.cosh() / u.cosh().powi(2);
        let left = width / (1.0 + (-2.0 * u).exp());
        let right = width / (1.0 + (2.0 * u).exp());
        if weight == 0.0 || left <= 0.0 || right <= 0.0 {
            continue;
        }
        let x = if left < right { a + left } else { b - right };
        acc += weight * f(x, left, right);
    }
    acc * STEP * width / 2.0
}

/// `∫_lo^hi z⁻¹(1-z)^(θ-1) dz` for `0 < lo <= hi <= 1`.
///
/// Below 1/2 the integral is taken in `ln z` with Simpson's rule; above it
/// in `y = 1 - z` with a tanh-sinh rule, which copes with the `y^(θ-1)`
/// endpoint behaviour.
pub fn levy_mass(theta: f64, lo: f64, hi: f64) -> f64 {
    let mid = hi.min(0.5).max(lo);
    let lower = simpson(
        |u: f64| (1.0 - u.exp()).powf(theta - 1.0),
        lo.ln(),
        mid.ln(),
        PANELS,
    );
    let upper = tanh_sinh(
        |y: f64, _, _| y.powf(theta - 1.0) / (1.0 - y),
        1.0 - hi,
        1.0 - mid,
    );
    lower + upper
}

/// `∫_ε^1 z ω(dz) = (1-ε)^θ / θ`, which tends to `1/θ`.
pub fn truncated_first_moment(theta: f64, epsilon: f64) -> f64 {
    (1.0 - epsilon).powf(theta) / theta
}

/// One jump size from the density proportional to `z⁻¹(1-z)^(θ-1)` on
/// `[ε, 1]`.
///
/// For `θ >= 1` a log-uniform proposal is thinned by `(1-z)^(θ-1)`. For
/// `θ < 1` a two-piece proposal is used: log-uniform on `[ε, s]` and
/// `(1-z)^(θ-1)` on `[s, 1]` with `s = max(ε, 1/2)`, each thinned by a
/// ratio bounded by one.
pub fn sample_jump(theta: f64, epsilon: f64, rng: &mut SeededRng) -> f64 {
    let ln_eps = epsilon.ln();
    if theta >= 1.0 {
        loop {
            let z = (ln_eps * rng.random::<f64>()).exp();
            if theta == 1.0 || rng.random::<f64>() < (1.0 - z).powf(theta - 1.0) {
                return z;
            }
        }
    }
    let split = epsilon.max(0.5);
    let mass_log = (1.0 - split).powf(theta - 1.0) * (split / epsilon).ln();
    let mass_spike = (1.0 - split).powf(theta) / (theta * split);
    let p_log = mass_log / (mass_log + mass_spike);
    loop {
        if rng.random::<f64>() < p_log {
            let z = epsilon * (split / epsilon).powf(rng.random::<f64>());
            let accept = ((1.0 - z) / (1.0 - split)).powf(theta - 1.0);
            if rng.random::<f64>() < accept {
                return z;
            }
        } else {
            let v: f64 = 1.0 - rng.random::<f64>();
            let z = 1.0 - (1.0 - split) * v.powf(1.0 / theta);
            if rng.random::<f64>() < split / z {
                return z;
            }
        }
    }
}

/// Decrement row `q_ε(n:m)`, `m = 1..=n`, of the composition produced by the
/// subordinator truncated at `ε`.
///
/// Dropping small atoms leaves a compound Poisson process whose range is a
/// stick-breaking paintbox with i.i.d. factors of density proportional to
/// `z⁻¹(1-z)^(θ-1)` on `(ε, 1]`, so the composition is regenerative with
/// `q_ε(n:m) = C(n,m) ∫ z^(m-1) (1-z)^(n-m+θ-1) dz / ∫ (1-(1-z)^n) z⁻¹(1-z)^(θ-1) dz`,
/// both integrals over `(ε, 1]`. As `ε → 0` this is the harmonic row.
pub fn truncated_decrement_row(theta: f64, epsilon: f64, n: usize) -> Result<Vec<f64>> {
    SubordinatorConfig::new(theta, epsilon)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let nf = n as f64;
    let denom = tanh_sinh(
        |z, _, dz| {
            let hit = -(nf * (-z).ln_1p()).exp_m1();
            hit / z * dz.powf(theta - 1.0)
        },
        epsilon,
        1.0,
    );
    let mut row = Vec::with_capacity(n);
    let mut binom = 1.0f64;
    for m in 1..=n {
        binom *= (n - m + 1) as f64 / m as f64;
        let mf = m as f64;
        let num = tanh_sinh(
            |z, _, dz| z.powf(mf - 1.0) * dz.powf(nf - mf + theta - 1.0),
            epsilon,
            1.0,
        );
        row.push(binom * num / denom);
    }
    Ok(row)
}

/// Law of the composition of `n` produced by the `ε`-truncated
/// subordinator, from [`truncated_decrement_row`].
pub fn truncated_pmf_table(theta: f64, epsilon: f64, n: usize) -> Result<PmfTable> {
    let rows = (1..=n)
        .map(|k| truncated_decrement_row(theta, epsilon, k))
        .collect::<Result<Vec<_>>>()?;
    let mut values = BTreeMap::new();
    for c in enumerate_compositions(n)? {
        let tails = tail_sums(&c);
        let p = c
            .parts()
            .iter()
            .zip(tails.as_slice())
            .map(|(&m, &total)| rows[total - 1][m - 1])
            .product::<f64>();
        values.insert(c, p);
    }
    PmfTable::approx(n, values)
}

/// Outcome of one subordinator simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinatorRun {
    pub paintbox: Paintbox,
    pub events: usize,
    pub time: f64,
}

/// Simulates the truncated subordinator until the sorted sample `points`
/// is resolved: at most one point lies beyond `S_t`, or the residual is
/// below `residual_cutoff` times the smallest spacing among the points
/// beyond `S_t`.
pub fn subordinator_run(
    cfg: &SubordinatorConfig,
    rng: &mut SeededRng,
    points: &[f64],
) -> Result<SubordinatorRun> {
    cfg.validate()?;
    subordinator_run_at_rate(cfg, cfg.rate(), rng, points)
}

/// [`subordinator_run`] with the event rate `cfg.rate()` supplied by the
/// caller, for repeated runs with one configuration.
pub(crate) fn subordinator_run_at_rate(
    cfg: &SubordinatorConfig,
    rate: f64,
    rng: &mut SeededRng,
    points: &[f64],
) -> Result<SubordinatorRun> {
    if !points.is_sorted_by(|a, b| a <= b) {
        return Err(Error::Domain("sample points must be sorted".into()));
    }
    let waiting = Exp::new(rate).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut level = 0.0f64;
    let mut time = 0.0f64;
    let mut events = 0usize;
    let mut intervals = Vec::new();
    loop {
        let uncovered = &points[points.partition_point(|&x| x < level)..];
        let residual = 1.0 - level;
        if uncovered.len() <= 1 || residual < cfg.residual_cutoff * min_spacing(uncovered) {
            break;
        }
        if events >= cfg.max_events {
            return Err(Error::Truncation {
                events,
                uncovered: uncovered.len(),
                residual,
            });
        }
        time += waiting.sample(rng);
        let jump = sample_jump(cfg.theta, cfg.epsilon, rng);
        let next = 1.0 - residual * (1.0 - jump);
        if next > level {
            intervals.push((level, next));
        }
        level = next;
        events += 1;
    }
    Ok(SubordinatorRun {
        paintbox: Paintbox::new(intervals, 1.0 - level)?,
        events,
        time,
    })
}

/// Paintboxes of the subordinator truncated at every level in `epsilons`,
/// all built from one Poisson process.
///
/// Atoms are simulated above the smallest threshold; the process truncated
/// at a larger `ε` keeps only the atoms with jump size above `ε`, which is
/// again a Poisson process with the right intensity. Each truncation uses
/// the stopping rule of [`subordinator_run`] on its own level, and the
/// paintboxes are returned in the order of `epsilons`.
pub fn subordinator_coupled(
    theta: f64,
    epsilons: &[f64],
    residual_cutoff: f64,
    rng: &mut SeededRng,
    points: &[f64],
) -> Result<Vec<Paintbox>> {
    let Some(&eps_min) = epsilons.iter().min_by(|a, b| a.total_cmp(b)) else {
        return Ok(Vec::new());
    };
    let mut cfg = SubordinatorConfig::new(theta, eps_min)?;
    cfg.residual_cutoff = residual_cutoff;
    cfg.validate()?;
    if !points.is_sorted_by(|a, b| a <= b) {
        return Err(Error::Domain("sample points must be sorted".into()));
    }
    let mut levels = vec![0.0f64; epsilons.len()];
    let mut intervals = vec![Vec::new(); epsilons.len()];
    let mut done = vec![false; epsilons.len()];
    let mut events = 0usize;
    loop {
        for (k, &level) in levels.iter().enumerate() {
            if done[k] {
                continue;
            }
            let uncovered = &points[points.partition_point(|&x| x < level)..];
            done[k] =
                uncovered.len() <= 1 || 1.0 - level < residual_cutoff * min_spacing(uncovered);
        }
        if done.iter().all(|&d| d) {
            break;
        }
        if events >= cfg.max_events {
            let k = done
                .iter()
                .position(|&d| !d)
                .expect("an unfinished truncation");
            return Err(Error::Truncation {
                events,
                uncovered: points.len() - points.partition_point(|&x| x < levels[k]),
                residual: 1.0 - levels[k],
            });
        }
        let jump = sample_jump(theta, eps_min, rng);
        events += 1;
        for (k, &eps) in epsilons.iter().enumerate() {
            if done[k] || jump <= eps {
                continue;
            }
            let next = 1.0 - (1.0 - levels[k]) * (1.0 - jump);
            if next > levels[k] {
                intervals[k].push((levels[k], next));
            }
            levels[k] = next;
        }
    }
    intervals
        .into_iter()
        .zip(levels)
        .map(|(ivs, level)| Paintbox::new(ivs, 1.0 - level))
        .collect()
}

pub fn subordinator_paintbox(
    cfg: &SubordinatorConfig,
    rng: &mut SeededRng,
    points: &[f64],
) -> Result<Paintbox> {
    subordinator_run(cfg, rng, points).map(|r| r.paintbox)
}

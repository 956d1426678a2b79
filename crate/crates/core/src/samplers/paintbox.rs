//! Paintboxes (ordered disjoint open subintervals of [0,1]), allocation of
//! sample points to their blocks, and stick-breaking paintboxes.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::Serialize;

use super::rng::SeededRng;
use crate::combinatorics::Composition;
use crate::error::{Error, Result};

/// Ordered open intervals `(a_i, b_i)` with `a_1 < b_1 <= a_2 < ...`.
/// `residual` is the length of the region to the right of the last
/// interval that the construction left unresolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Paintbox {
    intervals: Vec<(f64, f64)>,
    residual: f64,
}

impl Paintbox {
    pub fn new(intervals: Vec<(f64, f64)>, residual: f64) -> Result<Self> {
        let mut prev = 0.0f64;
        let mut total = 0.0f64;
        for &(a, b) in &intervals {
            if !(a >= prev && a < b && b <= 1.0) {
                return Err(Error::Domain(format!(
                    "interval ({a}, {b}) breaks ordering or leaves [0,1]"
                )));
            }
            total += b - a;
            prev = b;
        }
        if total > 1.0 + 1e-12 || !(0.0..=1.0).contains(&residual) {
            return Err(Error::Domain(format!(
                "covered length {total} or residual {residual} out of range"
            )));
        }
        Ok(Self {
            intervals,
            residual,
        })
    }

    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
            residual: 1.0,
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn covered_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

/// Groups sorted points by the intervals of `paintbox`, left to right.
///
/// Points in the same interval form one part; points outside every
/// interval are singleton parts. A point sitting exactly on an interval
/// endpoint is reported as [`Error::EndpointCollision`] so the caller can
/// resample it.
pub fn allocate(paintbox: &Paintbox, points: &[f64]) -> Result<Composition> {
    if points.is_empty() {
        return Err(Error::Domain("no sample points".into()));
    }
    if !points.is_sorted_by(|a, b| a <= b) {
        return Err(Error::Domain("sample points must be sorted".into()));
    }
    if points.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Domain("sample points must lie in [0,1]".into()));
    }
    let ivs = paintbox.intervals();
    let mut parts: Vec<usize> = Vec::new();
    let mut current: Option<usize> = None;
    let mut i = 0;
    for &x in points {
        while i < ivs.len() && ivs[i].1 < x {
            i += 1;
        }
        let block = match ivs.get(i) {
            Some(&(a, b)) if x == a || x == b => return Err(Error::EndpointCollision(x)),
            Some(&(a, _)) if a < x => Some(i),
            _ => None,
        };
        match (block, current) {
            (Some(b), Some(c)) if b == c => *parts.last_mut().expect("open part") += 1,
            _ => parts.push(1),
        }
        current = block;
    }
    Composition::new(parts)
}

/// Stick-breaking from given factors: the k-th interval runs between
/// consecutive values of `1 - ∏_{j<=k} (1 - Z_j)`. Stops once the residual
/// `∏ (1 - Z_j)` drops below `stop` or the factors run out.
pub fn stick_breaking_from_factors<I>(factors: I, stop: f64) -> Paintbox
where
    I: IntoIterator<Item = f64>,
{
    let mut residual = 1.0f64;
    let mut intervals = Vec::new();
    for z in factors {
        if residual < stop {
            break;
        }
        let left = 1.0 - residual;
        residual *= 1.0 - z;
        let right = 1.0 - residual;
        if right > left {
            intervals.push((left, right));
        }
    }
    Paintbox {
        intervals,
        residual,
    }
}

/// Upper bound on the number of sticks broken for one paintbox.
pub const MAX_STICKS: usize = 10_000_000;

/// Stick-breaking paintbox with i.i.d. `Beta(alpha, theta)` factors,
/// generated until the residual mass falls below `stop`.
pub fn stick_breaking_paintbox(
    alpha: f64,
    theta: f64,
    rng: &mut SeededRng,
    stop: f64,
) -> Result<Paintbox> {
    if !(alpha > 0.0 && theta > 0.0) {
        return Err(Error::Parameter(format!(
            "stick-breaking needs alpha, theta > 0, got ({alpha}, {theta})"
        )));
    }
    if !(stop > 0.0 && stop < 1.0) {
        return Err(Error::Parameter(format!(
            "stop must lie in (0,1), got {stop}"
        )));
    }
    let beta = Beta::new(alpha, theta).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut count = 0usize;
    let mut residual = 1.0f64;
    let factors = std::iter::from_fn(|| {
        if residual < stop || count >= MAX_STICKS {
            return None;
        }
        count += 1;
        let z: f64 = beta.sample(rng);
        residual *= 1.0 - z;
        Some(z)
    });
    let pb = stick_breaking_from_factors(factors, stop);
    if pb.residual >= stop {
        return Err(Error::Truncation {
            events: count,
            uncovered: 0,
            residual: pb.residual,
        });
    }
    Ok(pb)
}

/// Smallest gap between consecutive sorted points; infinite for one point.
pub(crate) fn min_spacing(points: &[f64]) -> f64 {
    points
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// `n` sorted i.i.d. uniform points on (0,1).
pub fn uniform_points(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    pts.sort_by(f64::total_cmp);
    pts
}

/// Allocates, resampling any point that lands on an endpoint.
pub(crate) fn allocate_resampling(
    paintbox: &Paintbox,
    points: &mut [f64],
    rng: &mut SeededRng,
) -> Result<Composition> {
    loop {
        match allocate(paintbox, points) {
            Err(Error::EndpointCollision(x)) => {
                let idx = points
                    .iter()
                    .position(|&p| p == x)
                    .expect("colliding point is in the sample");
                points[idx] = rng.random::<f64>();
                points.sort_by(f64::total_cmp);
            }
            other => return other,
        }
    }
}

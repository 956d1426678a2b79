//! Random generation of compositions.
//!
//! Four independent mechanisms are provided: the regenerative recursion on
//! a decrement matrix, stick-breaking paintboxes, the truncated geometric
//! subordinator paintbox and a shuffled two-parameter seating process.

mod crp;
mod paintbox;
mod rng;
mod sequential;
mod subordinator;

use serde::Serialize;

pub use crp::crp_shuffle_sample;
pub use paintbox::{
    allocate, stick_breaking_from_factors, stick_breaking_paintbox, uniform_points, Paintbox,
    MAX_STICKS,
};
pub use rng::SeededRng;
pub use sequential::{sample_sequential, SequentialSampler};
pub use subordinator::{
    levy_mass, sample_jump, subordinator_coupled, subordinator_paintbox, subordinator_run,
    truncated_decrement_row, truncated_first_moment, truncated_pmf_table, SubordinatorConfig,
    SubordinatorRun,
};

use crate::combinatorics::Composition;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rational::to_f64;
pub(crate) use paintbox::allocate_resampling;
use paintbox::min_spacing;
use subordinator::subordinator_run_at_rate;

/// Residual threshold used by stick-breaking paintboxes unless the sample
/// requires a finer one.
pub const DEFAULT_STICK_STOP: f64 = 1e-9;

/// Paintbox construction used by [`sample_paintbox_composition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PaintboxKind {
    Stick { alpha: f64, theta: f64, stop: f64 },
    Subordinator(SubordinatorConfig),
}

/// One paintbox draw together with the sample it was resolved against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    pub paintbox: Paintbox,
    pub points: Vec<f64>,
    pub composition: Composition,
}

/// Draws `n` uniform points and an independent paintbox, then allocates.
///
/// The stick-breaking threshold is tightened to the smallest spacing of
/// the sample, so at most one point is left beyond the last stick and the
/// result does not depend on the threshold.
pub fn paintbox_realization(
    kind: &PaintboxKind,
    n: usize,
    rng: &mut SeededRng,
) -> Result<Realization> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let mut points = uniform_points(n, rng);
    let paintbox = match kind {
        PaintboxKind::Stick { alpha, theta, stop } => {
            let stop = stop.min(min_spacing(&points));
            stick_breaking_paintbox(*alpha, *theta, rng, stop)?
        }
        PaintboxKind::Subordinator(cfg) => subordinator_paintbox(cfg, rng, &points)?,
    };
    let composition = allocate_resampling(&paintbox, &mut points, rng)?;
    Ok(Realization {
        paintbox,
        points,
        composition,
    })
}

pub fn sample_paintbox_composition(
    kind: &PaintboxKind,
    n: usize,
    rng: &mut SeededRng,
) -> Result<Composition> {
    paintbox_realization(kind, n, rng).map(|r| r.composition)
}

/// Sampling mechanism selector for Monte Carlo checks and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Regenerative recursion on the model's own decrement matrix.
    Sequential,
    /// Stick-breaking paintbox with `Beta(alpha, theta)` factors.
    Stick { alpha: f64, theta: f64 },
    /// Truncated geometric subordinator paintbox.
    Subordinator(SubordinatorConfig),
    /// Two-parameter seating process with shuffled blocks.
    CrpShuffle { alpha: f64, theta: f64 },
}

impl SamplerKind {
    /// The paintbox sampler that generates `model` when there is a natural
    /// one: stick-breaking for the beta family, the subordinator (with the
    /// given truncation) for the harmonic structure.
    pub fn natural_paintbox(model: &Model, epsilon: f64) -> Result<Self> {
        if let Some((a, t)) = model.stick_parameters() {
            return Ok(Self::Stick {
                alpha: to_f64(&a),
                theta: to_f64(&t),
            });
        }
        match model {
            Model::GnedinG { theta } => Ok(Self::Subordinator(SubordinatorConfig::new(
                to_f64(theta),
                epsilon,
            )?)),
            _ => Err(Error::Unsupported(format!(
                "{model} has no paintbox sampler; use the sequential or crp sampler"
            ))),
        }
    }
}

/// A sampler prepared for one weight; cheap to call repeatedly and shareable
/// across threads, each thread supplying its own generator.
#[derive(Debug, Clone)]
pub enum Sampler {
    Sequential(SequentialSampler),
    Paintbox(PaintboxKind),
    /// Subordinator paintbox with its event rate computed once.
    Subordinator {
        cfg: SubordinatorConfig,
        rate: f64,
    },
    Crp {
        alpha: f64,
        theta: f64,
    },
}

impl Sampler {
    pub fn new(model: &Model, kind: &SamplerKind, n: usize) -> Result<Self> {
        Ok(match *kind {
            SamplerKind::Sequential => Self::Sequential(SequentialSampler::new(model, n)?),
            SamplerKind::Stick { alpha, theta } => Self::Paintbox(PaintboxKind::Stick {
                alpha,
                theta,
                stop: DEFAULT_STICK_STOP,
            }),
            SamplerKind::Subordinator(cfg) => {
                cfg.validate()?;
                Self::Subordinator {
                    cfg,
                    rate: cfg.rate(),
                }
            }
            SamplerKind::CrpShuffle { alpha, theta } => Self::Crp { alpha, theta },
        })
    }

    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> Result<Composition> {
        match self {
            Self::Sequential(s) => s.sample(n, rng),
            Self::Paintbox(kind) => sample_paintbox_composition(kind, n, rng),
            Self::Subordinator { cfg, rate } => {
                if n == 0 {
                    return Err(Error::Domain("n must be positive".into()));
                }
                let mut points = uniform_points(n, rng);
                let run = subordinator_run_at_rate(cfg, *rate, rng, &points)?;
                allocate_resampling(&run.paintbox, &mut points, rng)
            }
            Self::Crp { alpha, theta } => crp_shuffle_sample(*alpha, *theta, n, rng),
        }
    }
}

/// Output encoding for sample streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    /// A JSON array of `{"parts":[...]}` objects.
    Json,
    /// Header `parts`, then one dash-separated composition per line.
    Csv,
}

pub fn write_samples<W: std::io::Write>(
    out: &mut W,
    samples: &[Composition],
    format: StreamFormat,
) -> std::io::Result<()> {
    match format {
        StreamFormat::Json => {
            serde_json::to_writer(&mut *out, samples)?;
            out.write_all(b"\n")?;
        }
        StreamFormat::Csv => {
            out.write_all(b"parts\n")?;
            for s in samples {
                writeln!(out, "{}", s.to_dashed())?;
            }
        }
    }
    Ok(())
}

//! Exchangeable random composition structures.
//!
//! The crate covers three regenerative composition structures (the ordered
//! Ewens formula, Pitman's symmetric formula and the harmonic-number formula)
//! together with the beta stick-breaking family that interpolates them.
//! Probabilities are computed in exact rational arithmetic; samplers draw
//! compositions through the regenerative recursion, stick-breaking paintboxes,
//! a truncated geometric subordinator and a shuffled seating process; the
//! [`verifier`] module turns all of it into machine-readable checks.

pub mod combinatorics;
pub mod error;
pub mod formulas;
pub mod model;
pub mod rational;
pub mod samplers;
pub mod table;
pub mod verifier;

pub use combinatorics::{
    enumerate_compositions, enumerate_compositions_capped, tail_sums, to_partition, Composition,
    TailSums, DEFAULT_MAX_N,
};
pub use error::{Error, Result};
pub use formulas::{
    decrement_row, ep_one_block_prob, pmf_closed, pmf_product, pmf_table, pmf_table_capped,
    ClosedForm, DecrementMatrix, DecrementRow,
};
pub use model::Model;
pub use rational::Rational;
pub use samplers::{Paintbox, SeededRng, SubordinatorConfig};
pub use table::{delete_one_ball_pushforward, tv_distance, PmfTable};
pub use verifier::{CheckReport, Status};

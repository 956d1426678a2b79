//! Shared fixtures for the criterion benches.

use compstruct::rational::{int, ratio};
use compstruct::Model;

/// One representative of each model family.
pub fn representative_models() -> Vec<Model> {
    vec![
        Model::OrderedEsf { theta: ratio(7, 3) },
        Model::Psf { alpha: ratio(1, 2) },
        Model::GnedinG { theta: int(1) },
        Model::BetaStick {
            alpha: ratio(3, 2),
            theta: int(2),
        },
        Model::G2 { theta: int(2) },
    ]
}

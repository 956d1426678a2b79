use rayon::prelude::*;

use super::{
    check_closed_vs_product, check_consistency, check_limit_theorem3, check_normalization,
    check_normalization_with, check_symmetry, ep_family_scan, epsilon_sweep, mc_goodness_of_fit,
    truncation_bias_sweep, CheckReport, Witness,
};
use crate::formulas::{closed_table, ClosedForm};
use crate::model::Model;
use crate::rational::{int, ratio, Rational};
use crate::samplers::{SamplerKind, SubordinatorConfig};

/// The default parameter grid: every model family at several parameters.
pub fn default_models() -> Vec<Model> {
    let mut out = Vec::new();
    for t in [ratio(1, 2), int(1), int(2), ratio(7, 3)] {
        out.push(Model::OrderedEsf { theta: t });
    }
    for a in [ratio(1, 10), ratio(1, 2), ratio(9, 10)] {
        out.push(Model::Psf { alpha: a });
    }
    for t in [ratio(1, 2), int(1), int(2)] {
        out.push(Model::GnedinG { theta: t });
    }
    for (a, t) in [
        (ratio(1, 2), int(1)),
        (ratio(3, 2), int(2)),
        (int(3), ratio(1, 2)),
        (ratio(7, 3), ratio(7, 3)),
    ] {
        out.push(Model::BetaStick { alpha: a, theta: t });
    }
    for t in [int(1), int(2)] {
        out.push(Model::G2 { theta: t });
    }
    out
}

type Job = Box<dyn Fn() -> CheckReport + Send + Sync>;

fn or_fail(name: &str, r: crate::error::Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| {
        CheckReport::fail(
            name,
            Witness::Message {
                text: e.to_string(),
            },
        )
    })
}

/// Exact identities over the default grid: normalization (to
/// `max(n_max, 12)`), sampling consistency, closed forms, symmetry, the
/// beta-to-harmonic limit, the Ewens-Pitman scan, and the two expected-fail
/// regressions for the as-printed formulas.
pub fn exact_suite(n_max: usize) -> Vec<CheckReport> {
    let mut jobs: Vec<Job> = Vec::new();
    let norm_n = n_max.max(12);
    for model in default_models() {
        let m = model.clone();
        jobs.push(Box::new(move || check_normalization(&m, norm_n)));
        let m = model.clone();
        jobs.push(Box::new(move || check_consistency(&m, n_max)));
        if model.has_closed_form() {
            let m = model.clone();
            jobs.push(Box::new(move || {
                or_fail(
                    "closed-vs-product",
                    check_closed_vs_product(&m, n_max, ClosedForm::Corrected),
                )
            }));
        }
        if matches!(model, Model::Psf { .. } | Model::GnedinG { .. }) {
            let m = model.clone();
            jobs.push(Box::new(move || check_symmetry(&m, n_max)));
        }
    }
    jobs.push(Box::new(move || {
        let psf = Model::Psf { alpha: ratio(1, 2) };
        check_normalization_with("normalization (as printed) PSF(alpha=1/2)", n_max, |n| {
            closed_table(&psf, n, ClosedForm::AsPrinted)
        })
        .expecting_failure()
    }));
    jobs.push(Box::new(move || {
        let g2 = Model::G2 { theta: int(1) };
        check_normalization_with("normalization (as printed) G2(theta=1)", n_max, |n| {
            closed_table(&g2, n, ClosedForm::AsPrinted)
        })
        .expecting_failure()
    }));
    jobs.push(Box::new(move || {
        let g2 = Model::G2 { theta: int(1) };
        or_fail(
            "closed-vs-product (as printed) G2",
            check_closed_vs_product(&g2, n_max, ClosedForm::AsPrinted),
        )
        .expecting_failure()
    }));
    for theta in [ratio(1, 2), int(1), int(2)] {
        jobs.push(Box::new(move || {
            let grid: Vec<Rational> = [100, 10_000, 1_000_000]
                .iter()
                .map(|&d| ratio(1, d))
                .collect();
            or_fail("limit", check_limit_theorem3(&theta, n_max, &grid, 1e-4))
        }));
    }
    jobs.push(Box::new(|| {
        or_fail(
            "ep family scan",
            ep_family_scan(&Model::GnedinG { theta: int(1) }, 4, 5, 1e-6),
        )
    }));
    jobs.push(Box::new(|| {
        or_fail(
            "ep family scan",
            ep_family_scan(&Model::Psf { alpha: ratio(1, 2) }, 3, 6, 1e-6),
        )
    }));
    jobs.par_iter().map(|job| job()).collect()
}

/// Monte Carlo checks of the paintbox and seating samplers against exact
/// tables, all driven by `seed`.
pub fn monte_carlo_suite(seed: u64, draws: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for theta in [ratio(1, 2), int(1), int(2)] {
        let model = Model::OrderedEsf { theta };
        let r = SamplerKind::natural_paintbox(&model, 1e-6)
            .and_then(|kind| mc_goodness_of_fit(&model, &kind, 6, draws, seed, 0.01));
        out.push(or_fail("monte-carlo stick", r));
    }
    let g = Model::GnedinG { theta: int(1) };
    let r = SubordinatorConfig::new(1.0, 1e-6).and_then(|cfg| {
        mc_goodness_of_fit(&g, &SamplerKind::Subordinator(cfg), 5, draws, seed, 0.02)
    });
    out.push(or_fail("monte-carlo subordinator", r));
    out.push(or_fail(
        "truncation bias",
        truncation_bias_sweep(&int(1), &[1e-3, 1e-4, 1e-6], 5, 1e-4),
    ));
    out.push(or_fail(
        "epsilon sweep",
        epsilon_sweep(&int(1), &[1e-3, 1e-4, 1e-6], 5, draws, seed),
    ));
    let psf = Model::Psf { alpha: ratio(1, 2) };
    let r = ep_family_scan(&psf, 3, 6, 1e-6).and_then(|scan| {
        let Some(Witness::Fit { alpha, theta, .. }) = scan.witness else {
            unreachable!("scan reports a fit witness")
        };
        mc_goodness_of_fit(
            &psf,
            &SamplerKind::CrpShuffle { alpha, theta },
            6,
            draws,
            seed,
            0.01,
        )
    });
    out.push(or_fail("monte-carlo crp shuffle", r));
    out
}

/// True when every report has its expected outcome.
pub fn suite_passes(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::ok)
}

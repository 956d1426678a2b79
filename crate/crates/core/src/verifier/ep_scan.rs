//! Comparison of one-block probabilities with the two-parameter
//! Ewens-Pitman family.

use super::{CheckReport, Witness};
use crate::error::{Error, Result};
use crate::formulas::{decrement_row, ep_one_block_prob_f64};
use crate::model::Model;
use crate::rational::to_f64;

const ALPHA_MAX: f64 = 0.999;
const THETA_MAX: f64 = 100.0;
const ROOT_TOL: f64 = 1e-12;

/// Ewens-Pitman parameters matching two one-block probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpFit {
    pub alpha: f64,
    pub theta: f64,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// θ with `[1-α]_1 / [1+θ]_1 = target`, searched in `(-α, THETA_MAX]`.
fn theta_for(alpha: f64, target: f64) -> Option<f64> {
    let lo = -alpha + 1e-15;
    bisect(
        |t| ep_one_block_prob_f64(alpha, t, 2) - target,
        lo,
        THETA_MAX,
    )
}

/// Solves for `(α, θ)` reproducing the one-block probabilities `p2` at
/// `n = 2` and `p3` at `n = 3`: θ is found from the first equation for each
/// α, and α by bisection on the residual of the second.
pub fn fit_one_block(p2: f64, p3: f64) -> Result<EpFit> {
    let residual = |a: f64| match theta_for(a, p2) {
        Some(t) => ep_one_block_prob_f64(a, t, 3) - p3,
        None => f64::NAN,
    };
    let alpha = bisect(residual, 0.0, ALPHA_MAX).ok_or_else(|| {
        Error::NoConvergence(format!(
            "no sign change for one-block targets ({p2}, {p3}) on alpha in [0, {ALPHA_MAX}]"
        ))
    })?;
    let theta = theta_for(alpha, p2)
        .ok_or_else(|| Error::NoConvergence(format!("no theta for alpha = {alpha}")))?;
    let check = (ep_one_block_prob_f64(alpha, theta, 2) - p2)
        .abs()
        .max((ep_one_block_prob_f64(alpha, theta, 3) - p3).abs());
    if check > 1e-10 {
        return Err(Error::NoConvergence(format!(
            "fit residual {check:e} at (alpha, theta) = ({alpha}, {theta})"
        )));
    }
    Ok(EpFit { alpha, theta })
}

fn max_residual(alpha: f64, theta: f64, targets: &[f64]) -> f64 {
    targets
        .iter()
        .enumerate()
        .skip(2)
        .map(|(n, &t)| (ep_one_block_prob_f64(alpha, theta, n) - t).abs())
        .fold(0.0, f64::max)
}

/// Grid-and-refine estimate of `min over (α, θ) of max_{2<=k<=n} |EP_k - t_k|`
/// on the fitting bracket, with θ parametrized as `-α + e^s`.
fn minimax_residual(targets: &[f64]) -> (f64, f64, f64) {
    const STEPS: usize = 200;
    let s_min = (1e-6f64).ln();
    let s_max = (THETA_MAX + 1.0).ln();
    let eval = |a: f64, s: f64| max_residual(a, -a + s.exp(), targets);
    let (mut a_lo, mut a_hi, mut s_lo, mut s_hi) = (0.0, ALPHA_MAX, s_min, s_max);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for _ in 0..8 {
        for i in 0..=STEPS {
            let a = a_lo + (a_hi - a_lo) * i as f64 / STEPS as f64;
            for j in 0..=STEPS {
                let s = s_lo + (s_hi - s_lo) * j as f64 / STEPS as f64;
                let v = eval(a, s);
                if v < best.0 {
                    best = (v, a, s);
                }
            }
        }
        let (da, ds) = ((a_hi - a_lo) / 10.0, (s_hi - s_lo) / 10.0);
        a_lo = (best.1 - da).max(0.0);
        a_hi = (best.1 + da).min(ALPHA_MAX);
        s_lo = (best.2 - ds).max(s_min);
        s_hi = (best.2 + ds).min(s_max);
    }
    (best.0, best.1, -best.1 + best.2.exp())
}

/// Fits Ewens-Pitman parameters to the model's one-block probabilities
/// `q(n:n)` and reports the mismatch at `n_test`.
///
/// The fit matches `n = 2` and `n = 3` exactly; the residuals at every
/// further weight up to `n_test` are reported, along with a grid estimate of
/// the smallest achievable worst-case residual over all parameters. For the
/// harmonic structure the check passes when the residual at `n_test`
/// exceeds `tol` (the structure is not an Ewens-Pitman one); for Pitman's
/// structure the fit is reported as data and the check always passes.
pub fn ep_family_scan(model: &Model, n_fit: usize, n_test: usize, tol: f64) -> Result<CheckReport> {
    let claim_mismatch = match model {
        Model::GnedinG { .. } => true,
        Model::Psf { .. } => false,
        other => {
            return Err(Error::Unsupported(format!(
                "family scan is defined for GnedinG and PSF, not {other}"
            )))
        }
    };
    if n_fit < 3 || n_test <= n_fit {
        return Err(Error::Domain(format!(
            "need 3 <= n_fit < n_test, got n_fit={n_fit}, n_test={n_test}"
        )));
    }
    // targets[k] = q(k:k); index 0 unused
    let mut targets = vec![f64::NAN];
    for k in 1..=n_test {
        let row = decrement_row(model, k)?;
        targets.push(to_f64(row.get(k).expect("diagonal entry")));
    }
    let fit = fit_one_block(targets[2], targets[3])?;
    let residuals: Vec<f64> = (1..=n_test)
        .map(|k| ep_one_block_prob_f64(fit.alpha, fit.theta, k) - targets[k])
        .collect();
    let test_residual = residuals[n_test - 1].abs();
    let (minimax, mm_alpha, mm_theta) = minimax_residual(&targets);
    let witness = Witness::Fit {
        alpha: fit.alpha,
        theta: fit.theta,
        n_test,
        residual: test_residual,
    };
    let name = format!("ep family scan {model}");
    let report = if !claim_mismatch || test_residual > tol {
        CheckReport::pass(name).with_witness(witness)
    } else {
        CheckReport::fail(name, witness)
    };
    let report = if claim_mismatch {
        report.with_margin(test_residual - tol)
    } else {
        report
    };
    Ok(report
        .with_detail("claims_mismatch", claim_mismatch)
        .with_detail("n_fit", n_fit)
        .with_detail("one_block_targets", targets[1..].to_vec())
        .with_detail("residuals", residuals)
        .with_detail("minimax_residual", minimax)
        .with_detail("minimax_alpha", mm_alpha)
        .with_detail("minimax_theta", mm_theta)
        .with_detail("tolerance", tol))
}

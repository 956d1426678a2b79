//! Decrement matrices and sampling formulas in exact arithmetic.
//!
//! Every structure here is regenerative: the probability of a composition
//! is the product `∏ q(Λ_j : λ_j)` of first-part probabilities over its
//! tail sums. That product ([`pmf_product`]) is the normative pmf; the
//! closed forms in [`pmf_closed`] are kept as an independent route and are
//! checked against it.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::combinatorics::{enumerate_compositions_capped, tail_sums, Composition, DEFAULT_MAX_N};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rational::{
    binomial, factorial, falling_factorial, fmt_rational, gen_binomial, gen_harmonic, int,
    pochhammer, Rational,
};
use crate::table::PmfTable;

/// Law `q(n:1), ..., q(n:n)` of the first part of a composition of `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecrementRow {
    n: usize,
    probs: Vec<Rational>,
}

impl DecrementRow {
    fn new(n: usize, probs: Vec<Rational>) -> Self {
        debug_assert_eq!(probs.len(), n);
        Self { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `q(n:m)` for `1 <= m <= n`.
    pub fn get(&self, m: usize) -> Option<&Rational> {
        m.checked_sub(1).and_then(|i| self.probs.get(i))
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().fold(Rational::zero(), |a, v| a + v)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("decrement rows start at n = 1".into()))
    } else {
        Ok(())
    }
}

fn positive(name: &str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive, got {}",
            fmt_rational(v)
        )))
    }
}

/// Binomial moment `w(n:m) = θ C(n,m) B(m+1, n-m+θ)` of the density
/// `θ(1-z)^(θ-1)`.
///
/// With an integer first argument the Beta function is rational in θ:
/// `B(m+1, b) = m! / [b]_{m+1}`.
pub fn beta_binomial_moment(theta: &Rational, n: usize, m: usize) -> Result<Rational> {
    positive("theta", theta)?;
    if m > n {
        return Err(Error::Domain(format!("need m <= n, got m={m}, n={n}")));
    }
    let b = theta + int((n - m) as i64);
    Ok(theta * binomial(n, m) * factorial(m) / pochhammer(&b, m + 1))
}

/// Ordered Ewens row `q(n:m) = (θ/n) n!/(n-m)! [θ]_{n-m} / [θ]_n`.
pub fn decrement_e(theta: &Rational, n: usize) -> Result<DecrementRow> {
    positive("theta", theta)?;
    check_n(n)?;
    let top = pochhammer(theta, n);
    let lead = theta / int(n as i64);
    let probs = (1..=n)
        .map(|m| &lead * falling_factorial(n, m) * pochhammer(theta, n - m) / &top)
        .collect();
    Ok(DecrementRow::new(n, probs))
}

/// Row of Pitman's structure, `q(n:m) = -C(α,m) C(-α,n-m) / C(-α,n)`.
pub fn decrement_p(alpha: &Rational, n: usize) -> Result<DecrementRow> {
    if !(alpha.is_positive() && *alpha < Rational::one()) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (0,1), got {}",
            fmt_rational(alpha)
        )));
    }
    check_n(n)?;
    let neg = -alpha;
    let denom = gen_binomial(&neg, n);
    let probs = (1..=n)
        .map(|m| -(gen_binomial(alpha, m) * gen_binomial(&neg, n - m)) / &denom)
        .collect();
    Ok(DecrementRow::new(n, probs))
}

/// Beta(α, θ) stick-breaking row
/// `q(n:m) = C(n,m) [α]_m [θ]_{n-m} / ([α+θ]_n - [θ]_n)`.
pub fn decrement_beta(alpha: &Rational, theta: &Rational, n: usize) -> Result<DecrementRow> {
    positive("alpha", alpha)?;
    positive("theta", theta)?;
    check_n(n)?;
    let denom = pochhammer(&(alpha + theta), n) - pochhammer(theta, n);
    let probs = (1..=n)
        .map(|m| binomial(n, m) * pochhammer(alpha, m) * pochhammer(theta, n - m) / &denom)
        .collect();
    Ok(DecrementRow::new(n, probs))
}

/// Harmonic row `q(n:m) = n!/(n-m)! [θ]_{n-m}/[θ]_n / (m h_θ(n))`, the
/// `α → 0` limit of [`decrement_beta`].
pub fn decrement_g(theta: &Rational, n: usize) -> Result<DecrementRow> {
    positive("theta", theta)?;
    check_n(n)?;
    let top = pochhammer(theta, n);
    let h = gen_harmonic(theta, n)?;
    let probs = (1..=n)
        .map(|m| falling_factorial(n, m) * pochhammer(theta, n - m) / (&top * int(m as i64) * &h))
        .collect();
    Ok(DecrementRow::new(n, probs))
}

pub fn decrement_row(model: &Model, n: usize) -> Result<DecrementRow> {
    model.validate()?;
    match model {
        Model::OrderedEsf { theta } => decrement_e(theta, n),
        Model::Psf { alpha } => decrement_p(alpha, n),
        Model::GnedinG { theta } => decrement_g(theta, n),
        Model::BetaStick { alpha, theta } => decrement_beta(alpha, theta, n),
        Model::G2 { theta } => decrement_beta(&int(2), theta, n),
    }
}

/// Rows `1..=n_max` of a model's decrement matrix, computed once and then
/// read-only.
#[derive(Debug, Clone)]
pub struct DecrementMatrix {
    model: Model,
    rows: Vec<DecrementRow>,
}

impl DecrementMatrix {
    pub fn new(model: &Model, n_max: usize) -> Result<Self> {
        let rows = (1..=n_max)
            .map(|n| decrement_row(model, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: model.clone(),
            rows,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn n_max(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, n: usize) -> Option<&DecrementRow> {
        n.checked_sub(1).and_then(|i| self.rows.get(i))
    }

    pub fn q(&self, n: usize, m: usize) -> Option<&Rational> {
        self.row(n).and_then(|r| r.get(m))
    }

    /// `∏ q(Λ_j : λ_j)` over the tail sums of `lambda`.
    pub fn pmf(&self, lambda: &Composition) -> Result<Rational> {
        let tails = tail_sums(lambda);
        let mut acc = Rational::one();
        for (&tail, &part) in tails.as_slice().iter().zip(lambda.parts()) {
            let q = self.q(tail, part).ok_or(Error::Size {
                n: tail,
                cap: self.n_max(),
            })?;
            acc *= q;
        }
        Ok(acc)
    }
}

/// Regenerative product `∏ q(Λ_j : λ_j)`; the normative pmf for every model.
pub fn pmf_product(model: &Model, lambda: &Composition) -> Result<Rational> {
    DecrementMatrix::new(model, lambda.weight())?.pmf(lambda)
}

/// Which reading of a closed-form sampling formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// Forms that agree with the regenerative product.
    Corrected,
    /// The formulas exactly as originally published. They coincide with
    /// `Corrected` for the ordered Ewens and harmonic structures; Pitman's
    /// formula uses `[1-α]_{λ_j}` instead of `[1-α]_{λ_j - 1}`, and the
    /// `α = 2` formula drops the `Λ_j` factor. Neither is normalized.
    AsPrinted,
}

/// Closed-form sampling formula. Not available for general
/// [`Model::BetaStick`].
pub fn pmf_closed(model: &Model, lambda: &Composition, form: ClosedForm) -> Result<Rational> {
    model.validate()?;
    let n = lambda.weight();
    let len = lambda.len() as u32;
    let tails = tail_sums(lambda);
    let n_fact = factorial(n);
    match model {
        Model::OrderedEsf { theta } => {
            let mut acc =
                num_traits::pow(theta.clone(), len as usize) * n_fact / pochhammer(theta, n);
            for &t in tails.as_slice() {
                acc /= int(t as i64);
            }
            Ok(acc)
        }
        Model::Psf { alpha } => {
            let one_minus = Rational::one() - alpha;
            let shift = match form {
                ClosedForm::Corrected => 1,
                ClosedForm::AsPrinted => 0,
            };
            let mut acc =
                n_fact * num_traits::pow(alpha.clone(), len as usize) / pochhammer(alpha, n);
            for &part in lambda.parts() {
                acc *= pochhammer(&one_minus, part - shift) / factorial(part);
            }
            Ok(acc)
        }
        Model::GnedinG { theta } => {
            let mut acc = n_fact / pochhammer(theta, n);
            for (&t, &part) in tails.as_slice().iter().zip(lambda.parts()) {
                acc /= int(part as i64) * gen_harmonic(theta, t)?;
            }
            Ok(acc)
        }
        Model::G2 { theta } => {
            let one_plus = Rational::one() + theta;
            let two_theta_plus_one = int(2) * theta + Rational::one();
            let mut acc =
                n_fact * num_traits::pow(theta * &one_plus, len as usize) / pochhammer(theta, n);
            for (&t, &part) in tails.as_slice().iter().zip(lambda.parts()) {
                let tail = int(t as i64);
                let mut factor = int(part as i64 + 1) / (&tail + &two_theta_plus_one);
                if form == ClosedForm::Corrected {
                    factor /= tail;
                }
                acc *= factor;
            }
            Ok(acc)
        }
        Model::BetaStick { .. } => Err(Error::Unsupported(format!(
            "{model} has no closed-form sampling formula"
        ))),
    }
}

/// Exact table over all compositions of `n` from the regenerative product,
/// with the default enumeration cap.
pub fn pmf_table(model: &Model, n: usize) -> Result<PmfTable> {
    pmf_table_capped(model, n, DEFAULT_MAX_N)
}

pub fn pmf_table_capped(model: &Model, n: usize, cap: usize) -> Result<PmfTable> {
    let comps = enumerate_compositions_capped(n, cap)?;
    let matrix = DecrementMatrix::new(model, n)?;
    let entries = comps
        .into_iter()
        .map(|c| matrix.pmf(&c).map(|p| (c, p)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    PmfTable::exact(n, entries)
}

/// Table of a closed-form formula; the result is not necessarily normalized.
pub fn closed_table(model: &Model, n: usize, form: ClosedForm) -> Result<PmfTable> {
    let entries = enumerate_compositions_capped(n, DEFAULT_MAX_N)?
        .into_iter()
        .map(|c| pmf_closed(model, &c, form).map(|p| (c, p)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    PmfTable::exact(n, entries)
}

fn check_ep_pair(alpha: &Rational, theta: &Rational) -> Result<()> {
    if alpha.is_negative() || *alpha >= Rational::one() || *theta <= -alpha {
        return Err(Error::Domain(format!(
            "need 0 <= alpha < 1 and theta > -alpha, got ({}, {})",
            fmt_rational(alpha),
            fmt_rational(theta)
        )));
    }
    Ok(())
}

/// Probability that the two-parameter Ewens-Pitman partition of `n` has a
/// single block: `[1-α]_{n-1} / [1+θ]_{n-1}`.
pub fn ep_one_block_prob(alpha: &Rational, theta: &Rational, n: usize) -> Result<Rational> {
    check_ep_pair(alpha, theta)?;
    check_n(n)?;
    Ok(pochhammer(&(Rational::one() - alpha), n - 1)
        / pochhammer(&(Rational::one() + theta), n - 1))
}

/// Floating-point twin of [`ep_one_block_prob`], used by the parameter fit.
pub fn ep_one_block_prob_f64(alpha: f64, theta: f64, n: usize) -> f64 {
    (0..n.saturating_sub(1)).fold(1.0, |acc, i| {
        acc * (1.0 - alpha + i as f64) / (1.0 + theta + i as f64)
    })
}

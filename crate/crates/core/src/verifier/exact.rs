use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive};

use super::{CheckReport, Witness};
use crate::combinatorics::{enumerate_compositions, to_partition, Composition};
use crate::error::{Error, Result};
use crate::formulas::{
    decrement_beta, decrement_g, pmf_closed, pmf_table, ClosedForm, DecrementMatrix,
};
use crate::model::Model;
use crate::rational::{fmt_rational, Rational};
use crate::table::{delete_one_ball_pushforward, PmfTable};

fn message(text: impl Into<String>) -> Witness {
    Witness::Message { text: text.into() }
}

/// Exact total mass of every table of weight `1..=n_max` from `source`.
/// The witness is the first weight whose table does not sum to one; all
/// such weights are listed under `failures`.
pub fn check_normalization_with<F>(name: &str, n_max: usize, source: F) -> CheckReport
where
    F: Fn(usize) -> Result<PmfTable>,
{
    let mut failures = Vec::new();
    for n in 1..=n_max {
        let table = match source(n) {
            Ok(t) => t,
            Err(e) => return CheckReport::fail(name, message(format!("n={n}: {e}"))),
        };
        let Some(total) = table.total_exact() else {
            return CheckReport::fail(name, message(format!("n={n}: table is not exact")));
        };
        if !total.is_one() {
            failures.push((n, total));
        }
    }
    let Some((n, total)) = failures.first() else {
        return CheckReport::pass(name)
            .with_detail("n_max", n_max)
            .with_margin(0.0);
    };
    let deficit = Rational::one() - total;
    let listed: Vec<serde_json::Value> = failures
        .iter()
        .map(|(n, t)| serde_json::json!({ "n": n, "total": fmt_rational(t) }))
        .collect();
    CheckReport::fail(
        name,
        Witness::Mass {
            n: *n,
            total: fmt_rational(total),
        },
    )
    .with_detail("deficit", fmt_rational(&deficit))
    .with_detail("failures", listed)
    .with_margin(-deficit.abs().to_f64().unwrap_or(f64::INFINITY))
}

pub fn check_normalization(model: &Model, n_max: usize) -> CheckReport {
    check_normalization_with(&format!("normalization {model}"), n_max, |n| {
        pmf_table(model, n)
    })
    .with_detail("model", model.to_string())
}

/// `tables[k]` must have weight `k + 1`; every step `n → n-1` is checked.
pub fn check_consistency_tables(name: &str, tables: &[PmfTable]) -> CheckReport {
    for (k, t) in tables.iter().enumerate() {
        if t.weight() != k + 1 {
            return CheckReport::fail(
                name,
                message(format!(
                    "table {k} has weight {}, expected {}",
                    t.weight(),
                    k + 1
                )),
            );
        }
        if !t.is_exact() {
            return CheckReport::fail(
                name,
                message(format!("table of weight {} is not exact", k + 1)),
            );
        }
    }
    for n in 2..=tables.len() {
        let pushed = match delete_one_ball_pushforward(&tables[n - 1]) {
            Ok(t) => t,
            Err(e) => return CheckReport::fail(name, message(e.to_string())),
        };
        let target = &tables[n - 2];
        let (a, b) = (
            pushed.exact_entries().expect("exact"),
            target.exact_entries().expect("exact"),
        );
        let zero = Rational::from_integer(0.into());
        let mut keys: Vec<&Composition> = a.keys().chain(b.keys()).collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let got = a.get(key).unwrap_or(&zero);
            let expected = b.get(key).unwrap_or(&zero);
            if got != expected {
                return CheckReport::fail(
                    name,
                    Witness::Cell {
                        n: n - 1,
                        parts: key.parts().to_vec(),
                        got: fmt_rational(got),
                        expected: fmt_rational(expected),
                    },
                )
                .with_detail("step", format!("{n}->{}", n - 1));
            }
        }
    }
    CheckReport::pass(name).with_detail("n_max", tables.len())
}

/// One-ball deletion maps the exact table of weight `n` onto the table of
/// weight `n-1`, for `2 <= n <= n_max`.
pub fn check_consistency(model: &Model, n_max: usize) -> CheckReport {
    let name = format!("consistency {model}");
    let tables = match (1..=n_max)
        .map(|n| pmf_table(model, n))
        .collect::<Result<Vec<_>>>()
    {
        Ok(t) => t,
        Err(e) => return CheckReport::fail(name, message(e.to_string())),
    };
    check_consistency_tables(&name, &tables).with_detail("model", model.to_string())
}

/// Closed-form sampling formula against the regenerative product, cell by
/// cell, for every weight up to `n_max`.
pub fn check_closed_vs_product(
    model: &Model,
    n_max: usize,
    form: ClosedForm,
) -> Result<CheckReport> {
    if !model.has_closed_form() {
        return Err(Error::Unsupported(format!("{model} has no closed form")));
    }
    let label = match form {
        ClosedForm::Corrected => "closed-vs-product",
        ClosedForm::AsPrinted => "closed-vs-product (as printed)",
    };
    let name = format!("{label} {model}");
    let matrix = DecrementMatrix::new(model, n_max)?;
    for n in 1..=n_max {
        for lambda in enumerate_compositions(n)? {
            let closed = pmf_closed(model, &lambda, form)?;
            let product = matrix.pmf(&lambda)?;
            if closed != product {
                let ratio = &closed / &product;
                return Ok(CheckReport::fail(
                    name,
                    Witness::Cell {
                        n,
                        parts: lambda.parts().to_vec(),
                        got: fmt_rational(&closed),
                        expected: fmt_rational(&product),
                    },
                )
                .with_detail("ratio", fmt_rational(&ratio))
                .with_detail("model", model.to_string()));
            }
        }
    }
    Ok(CheckReport::pass(name)
        .with_detail("n_max", n_max)
        .with_detail("model", model.to_string()))
}

/// First pair of rearrangements with different probabilities, scanning
/// weights `2..=n_max`. The first element of the pair is the weakly
/// decreasing rearrangement.
fn asymmetry_witness(matrix: &DecrementMatrix, n_max: usize) -> Result<Option<Witness>> {
    for n in 2..=n_max {
        let mut groups: BTreeMap<Composition, Vec<Composition>> = BTreeMap::new();
        for c in enumerate_compositions(n)? {
            groups.entry(to_partition(&c)).or_default().push(c);
        }
        for (partition, members) in groups {
            let reference = matrix.pmf(&partition)?;
            for c in members {
                let v = matrix.pmf(&c)?;
                if v != reference {
                    return Ok(Some(Witness::Asymmetry {
                        first: partition.parts().to_vec(),
                        first_value: fmt_rational(&reference),
                        second: c.parts().to_vec(),
                        second_value: fmt_rational(&v),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Symmetric models (Pitman's structure) must be invariant under every
/// rearrangement of parts; all other models must exhibit an asymmetry
/// witness somewhere up to `n_max`.
pub fn check_symmetry(model: &Model, n_max: usize) -> CheckReport {
    let name = format!("symmetry {model}");
    let found = DecrementMatrix::new(model, n_max).and_then(|m| asymmetry_witness(&m, n_max));
    let witness = match found {
        Ok(w) => w,
        Err(e) => return CheckReport::fail(name, message(e.to_string())),
    };
    let report = match (model.is_symmetric(), witness) {
        (true, None) => CheckReport::pass(name),
        (true, Some(w)) => CheckReport::fail(name, w),
        (false, Some(w)) => CheckReport::pass(name).with_witness(w),
        (false, None) => CheckReport::fail(
            name,
            message(format!("no asymmetry witness up to n = {n_max}")),
        ),
    };
    report
        .with_detail("expect_symmetric", model.is_symmetric())
        .with_detail("n_max", n_max)
}

/// Largest deviation `|q_beta(α,θ; n:m) - q_g(θ; n:m)|` over
/// `m <= n <= n_max`, with its location.
fn limit_deviation(
    alpha: &Rational,
    theta: &Rational,
    n_max: usize,
) -> Result<(f64, usize, usize)> {
    let mut worst = (0.0, 1, 1);
    for n in 1..=n_max {
        let beta = decrement_beta(alpha, theta, n)?;
        let g = decrement_g(theta, n)?;
        for m in 1..=n {
            let d = (beta.get(m).expect("m <= n") - g.get(m).expect("m <= n"))
                .abs()
                .to_f64()
                .unwrap_or(f64::INFINITY);
            if d > worst.0 {
                worst = (d, n, m);
            }
        }
    }
    Ok(worst)
}

/// The beta rows approach the harmonic rows as α decreases along `alpha_grid`:
/// the worst-cell deviation must strictly decrease and end below `tol`.
pub fn check_limit_theorem3(
    theta: &Rational,
    n_max: usize,
    alpha_grid: &[Rational],
    tol: f64,
) -> Result<CheckReport> {
    if alpha_grid.is_empty()
        || alpha_grid.iter().any(|a| !a.is_positive())
        || alpha_grid.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Domain(
            "alpha grid must be positive and strictly decreasing".into(),
        ));
    }
    let name = format!("beta-to-harmonic limit theta={}", fmt_rational(theta));
    let mut deviations = Vec::with_capacity(alpha_grid.len());
    let mut worst_cells = Vec::with_capacity(alpha_grid.len());
    for a in alpha_grid {
        let (d, n, m) = limit_deviation(a, theta, n_max)?;
        deviations.push(d);
        worst_cells.push((n, m));
    }
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    let last = *deviations.last().expect("nonempty grid");
    let grid: Vec<String> = alpha_grid.iter().map(fmt_rational).collect();
    let witness_at = |i: usize| Witness::Decrement {
        alpha: fmt_rational(&alpha_grid[i]),
        n: worst_cells[i].0,
        m: worst_cells[i].1,
        deviation: deviations[i],
    };
    let report = if !monotone {
        let i = deviations
            .windows(2)
            .position(|w| w[1] >= w[0])
            .expect("non-monotone")
            + 1;
        CheckReport::fail(&name, witness_at(i))
    } else if last > tol {
        CheckReport::fail(&name, witness_at(alpha_grid.len() - 1))
    } else {
        CheckReport::pass(&name).with_witness(witness_at(alpha_grid.len() - 1))
    };
    Ok(report
        .with_margin(tol - last)
        .with_detail("alpha_grid", grid)
        .with_detail("deviations", deviations)
        .with_detail("n_max", n_max)
        .with_detail("tolerance", tol))
}

//! Probability tables over the compositions of a fixed weight, the
//! one-ball deletion operator and total variation distance.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{enumerate_compositions_capped, Composition, DEFAULT_MAX_N};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, parse_rational, to_f64, Rational};

/// Table values, flagged by exactness. Exact oracles only accept the
/// [`TableValues::Exact`] variant.
#[derive(Debug, Clone, PartialEq)]
pub enum TableValues {
    Exact(BTreeMap<Composition, Rational>),
    Approx(BTreeMap<Composition, f64>),
}

/// Map from compositions of `weight` to probabilities, iterated in the
/// canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    weight: usize,
    values: TableValues,
}

fn check_keys<'a, I>(weight: usize, keys: I) -> Result<()>
where
    I: IntoIterator<Item = &'a Composition>,
{
    for k in keys {
        if k.weight() != weight {
            return Err(Error::Domain(format!(
                "composition {k} has weight {} in a table of weight {weight}",
                k.weight()
            )));
        }
    }
    Ok(())
}

impl PmfTable {
    pub fn exact(weight: usize, entries: BTreeMap<Composition, Rational>) -> Result<Self> {
        check_keys(weight, entries.keys())?;
        if let Some((k, v)) = entries.iter().find(|(_, v)| v.is_negative()) {
            return Err(Error::Domain(format!(
                "negative probability {} at {k}",
                fmt_rational(v)
            )));
        }
        Ok(Self {
            weight,
            values: TableValues::Exact(entries),
        })
    }

    pub fn approx(weight: usize, entries: BTreeMap<Composition, f64>) -> Result<Self> {
        check_keys(weight, entries.keys())?;
        if let Some((k, v)) = entries.iter().find(|(_, v)| v.is_nan() || **v < 0.0) {
            return Err(Error::Domain(format!("invalid probability {v} at {k}")));
        }
        Ok(Self {
            weight,
            values: TableValues::Approx(entries),
        })
    }

    /// Empirical frequencies from sample counts. Every composition of the
    /// weight gets an entry, zero when unobserved.
    pub fn from_counts(weight: usize, counts: &BTreeMap<Composition, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::Domain("no samples".into()));
        }
        let mut entries: BTreeMap<Composition, f64> =
            enumerate_compositions_capped(weight, weight.max(DEFAULT_MAX_N))?
                .into_iter()
                .map(|c| (c, 0.0))
                .collect();
        for (c, &k) in counts {
            entries.insert(c.clone(), k as f64 / total as f64);
        }
        Self::approx(weight, entries)
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, TableValues::Exact(_))
    }

    pub fn values(&self) -> &TableValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        match &self.values {
            TableValues::Exact(m) => m.len(),
            TableValues::Approx(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact_entries(&self) -> Option<&BTreeMap<Composition, Rational>> {
        match &self.values {
            TableValues::Exact(m) => Some(m),
            TableValues::Approx(_) => None,
        }
    }

    pub fn get_exact(&self, lambda: &Composition) -> Option<&Rational> {
        self.exact_entries().and_then(|m| m.get(lambda))
    }

    /// Probability as a float; missing keys read as zero.
    pub fn prob_f64(&self, lambda: &Composition) -> f64 {
        match &self.values {
            TableValues::Exact(m) => m.get(lambda).map(to_f64).unwrap_or(0.0),
            TableValues::Approx(m) => m.get(lambda).copied().unwrap_or(0.0),
        }
    }

    pub fn compositions(&self) -> Vec<&Composition> {
        match &self.values {
            TableValues::Exact(m) => m.keys().collect(),
            TableValues::Approx(m) => m.keys().collect(),
        }
    }

    /// Exact total mass, or `None` for an inexact table.
    pub fn total_exact(&self) -> Option<Rational> {
        self.exact_entries()
            .map(|m| m.values().fold(Rational::zero(), |acc, v| acc + v))
    }

    pub fn total_f64(&self) -> f64 {
        match &self.values {
            TableValues::Exact(m) => to_f64(&m.values().fold(Rational::zero(), |a, v| a + v)),
            TableValues::Approx(m) => m.values().sum(),
        }
    }

    /// JSON array of `{"parts": [...], "prob": ...}` in canonical order.
    /// Exact values are written as `"p/q"` strings, approximate ones as
    /// numbers; `exact = false` renders an exact table as numbers too.
    pub fn to_json(&self, exact: bool) -> String {
        let rows: Vec<serde_json::Value> = match &self.values {
            TableValues::Exact(m) => m
                .iter()
                .map(|(c, v)| {
                    let prob = if exact {
                        serde_json::Value::String(fmt_rational(v))
                    } else {
                        serde_json::json!(to_f64(v))
                    };
                    serde_json::json!({ "parts": c.parts(), "prob": prob })
                })
                .collect(),
            TableValues::Approx(m) => m
                .iter()
                .map(|(c, v)| serde_json::json!({ "parts": c.parts(), "prob": v }))
                .collect(),
        };
        serde_json::Value::Array(rows).to_string()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            parts: Vec<usize>,
            prob: serde_json::Value,
        }
        let rows: Vec<Row> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("table json: {e}")))?;
        let first = rows
            .first()
            .ok_or_else(|| Error::Parse("empty table".into()))?;
        let weight = first.parts.iter().sum();
        let all_strings = rows.iter().all(|r| r.prob.is_string());
        if all_strings {
            let mut m = BTreeMap::new();
            for r in rows {
                let v = parse_rational(r.prob.as_str().unwrap_or_default())?;
                m.insert(Composition::new(r.parts)?, v);
            }
            Self::exact(weight, m)
        } else {
            let mut m = BTreeMap::new();
            for r in rows {
                let v = r
                    .prob
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("bad probability {}", r.prob)))?;
                m.insert(Composition::new(r.parts)?, v);
            }
            Self::approx(weight, m)
        }
    }

    /// CSV with columns `parts,prob_num,prob_den` (exact) or `parts,prob`
    /// (approximate); parts are dash-separated.
    pub fn to_csv(&self, exact: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        match (&self.values, exact) {
            (TableValues::Exact(m), true) => {
                w.write_record(["parts", "prob_num", "prob_den"])
                    .map_err(csv_err)?;
                for (c, v) in m {
                    w.write_record([c.to_dashed(), v.numer().to_string(), v.denom().to_string()])
                        .map_err(csv_err)?;
                }
            }
            _ => {
                w.write_record(["parts", "prob"]).map_err(csv_err)?;
                for c in self.compositions() {
                    w.write_record([c.to_dashed(), self.prob_f64(c).to_string()])
                        .map_err(csv_err)?;
                }
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Parse(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        let headers = r.headers().map_err(csv_err)?.clone();
        let exact = headers.iter().any(|h| h == "prob_num");
        let mut exact_rows = BTreeMap::new();
        let mut approx_rows = BTreeMap::new();
        let mut weight = None;
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let c = Composition::from_dashed(rec.get(0).unwrap_or_default())?;
            weight.get_or_insert(c.weight());
            if exact {
                let num = rec.get(1).unwrap_or_default();
                let den = rec.get(2).unwrap_or_default();
                exact_rows.insert(c, parse_rational(&format!("{num}/{den}"))?);
            } else {
                let v: f64 = rec
                    .get(1)
                    .unwrap_or_default()
                    .parse()
                    .map_err(|_| Error::Parse("bad probability".into()))?;
                approx_rows.insert(c, v);
            }
        }
        let weight = weight.ok_or_else(|| Error::Parse("empty table".into()))?;
        if exact {
            Self::exact(weight, exact_rows)
        } else {
            Self::approx(weight, approx_rows)
        }
    }
}

/// Law of the composition left after one uniformly chosen ball is removed.
///
/// From `λ` the ball comes from box `j` with probability `λ_j / n`; a box
/// holding a single ball disappears. Exact tables map to exact tables;
/// approximate input yields an approximate (degraded precision) table.
pub fn delete_one_ball_pushforward(table: &PmfTable) -> Result<PmfTable> {
    let n = table.weight();
    if n < 2 {
        return Err(Error::Domain(
            "ball deletion needs a table of weight at least 2".into(),
        ));
    }
    let targets = enumerate_compositions_capped(n - 1, n.max(DEFAULT_MAX_N))?;
    match table.values() {
        TableValues::Exact(m) => {
            let mut out: BTreeMap<Composition, Rational> =
                targets.into_iter().map(|c| (c, Rational::zero())).collect();
            let n_r = int(n as i64);
            for (lambda, p) in m {
                if p.is_zero() {
                    continue;
                }
                for (j, &part) in lambda.parts().iter().enumerate() {
                    let mu = lambda.decrement(j).expect("weight >= 2");
                    let w = p * int(part as i64) / &n_r;
                    *out.get_mut(&mu).expect("target enumerated") += w;
                }
            }
            PmfTable::exact(n - 1, out)
        }
        TableValues::Approx(m) => {
            let mut out: BTreeMap<Composition, f64> =
                targets.into_iter().map(|c| (c, 0.0)).collect();
            for (lambda, &p) in m {
                for (j, &part) in lambda.parts().iter().enumerate() {
                    let mu = lambda.decrement(j).expect("weight >= 2");
                    *out.get_mut(&mu).expect("target enumerated") += p * part as f64 / n as f64;
                }
            }
            PmfTable::approx(n - 1, out)
        }
    }
}

/// Half the L1 distance between two tables of equal weight; missing keys
/// count as zero. Computed exactly when both tables are exact.
pub fn tv_distance(p: &PmfTable, q: &PmfTable) -> Result<f64> {
    if p.weight() != q.weight() {
        return Err(Error::Domain(format!(
            "tables of weights {} and {} are not comparable",
            p.weight(),
            q.weight()
        )));
    }
    if let (Some(a), Some(b)) = (p.exact_entries(), q.exact_entries()) {
        let zero = Rational::zero();
        let mut sum = Rational::zero();
        for k in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
            let d = a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero);
            sum += d.abs();
        }
        return Ok(to_f64(&(sum / int(2))));
    }
    let mut keys: Vec<&Composition> = p.compositions();
    keys.extend(q.compositions());
    keys.sort();
    keys.dedup();
    let sum: f64 = keys
        .into_iter()
        .map(|k| (p.prob_f64(k) - q.prob_f64(k)).abs())
        .sum();
    Ok(0.5 * sum)
}

/// Serializable view of a table row, used for sample streams and reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartsRow {
    pub parts: Vec<usize>,
}

//! Integer compositions and their enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the weight accepted by [`enumerate_compositions`];
/// there are `2^(n-1)` compositions of `n`.
pub const DEFAULT_MAX_N: usize = 20;

/// Ordered sequence of positive parts. Weight and length are derived from
/// the parts on demand.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "CompositionRepr", into = "CompositionRepr")]
pub struct Composition {
    parts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CompositionRepr {
    parts: Vec<usize>,
}

impl TryFrom<CompositionRepr> for Composition {
    type Error = Error;

    fn try_from(r: CompositionRepr) -> Result<Self> {
        Composition::new(r.parts)
    }
}

impl From<Composition> for CompositionRepr {
    fn from(c: Composition) -> Self {
        CompositionRepr { parts: c.parts }
    }
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain(
                "a composition needs at least one part".into(),
            ));
        }
        if parts.contains(&0) {
            return Err(Error::Domain(format!("zero part in {parts:?}")));
        }
        Ok(Self { parts })
    }

    /// The one-part composition `(n)`.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parses the dash-separated form used in CSV files, e.g. `2-1-3`.
    pub fn from_dashed(s: &str) -> Result<Self> {
        let parts = s
            .split('-')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad composition {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn to_dashed(&self) -> String {
        let strs: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        strs.join("-")
    }

    /// Removes one ball from the box at `index`; an emptied box disappears.
    /// Returns `None` when the last ball is removed.
    pub(crate) fn decrement(&self, index: usize) -> Option<Composition> {
        let mut parts = self.parts.clone();
        if parts[index] > 1 {
            parts[index] -= 1;
        } else {
            parts.remove(index);
        }
        if parts.is_empty() {
            None
        } else {
            Some(Composition { parts })
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Tail sums `Λ_k = λ_k + ... + λ_ℓ`, strictly decreasing from the weight
/// down to the last part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSums(Vec<usize>);

impl TailSums {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Recovers the parts as successive differences.
    pub fn to_composition(&self) -> Composition {
        let parts = self
            .0
            .iter()
            .enumerate()
            .map(|(k, &t)| t - self.0.get(k + 1).copied().unwrap_or(0))
            .collect();
        Composition { parts }
    }
}

pub fn tail_sums(lambda: &Composition) -> TailSums {
    let mut tails = Vec::with_capacity(lambda.len());
    let mut acc = 0;
    for &p in lambda.parts().iter().rev() {
        acc += p;
        tails.push(acc);
    }
    tails.reverse();
    TailSums(tails)
}

/// Forgets the order of the parts: weakly decreasing rearrangement.
pub fn to_partition(lambda: &Composition) -> Composition {
    let mut parts = lambda.parts.clone();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Composition { parts }
}

/// All compositions of `n` in lexicographic order of parts, with the
/// default cap.
pub fn enumerate_compositions(n: usize) -> Result<Vec<Composition>> {
    enumerate_compositions_capped(n, DEFAULT_MAX_N)
}

pub fn enumerate_compositions_capped(n: usize, cap: usize) -> Result<Vec<Composition>> {
    if n == 0 {
        return Err(Error::Domain("weight must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::Size { n, cap });
    }
    let mut out = Vec::with_capacity(1usize << (n - 1));
    let mut prefix = Vec::with_capacity(n);
    extend(n, &mut prefix, &mut out);
    Ok(out)
}

fn extend(remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Composition>) {
    if remaining == 0 {
        out.push(Composition {
            parts: prefix.clone(),
        });
        return;
    }
    for first in 1..=remaining {
        prefix.push(first);
        extend(remaining - first, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn c(parts: &[usize]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_compositions(1).unwrap(), vec![c(&[1])]);
        assert_eq!(
            enumerate_compositions(3).unwrap(),
            vec![c(&[1, 1, 1]), c(&[1, 2]), c(&[2, 1]), c(&[3])]
        );
        assert_eq!(enumerate_compositions(10).unwrap().len(), 512);
    }

    #[test]
    fn enumeration_cap() {
        assert_eq!(
            enumerate_compositions(21),
            Err(Error::Size { n: 21, cap: 20 })
        );
        assert_eq!(
            enumerate_compositions_capped(4, 3),
            Err(Error::Size { n: 4, cap: 3 })
        );
        assert!(enumerate_compositions(0).is_err());
    }

    #[test]
    fn enumeration_counts_up_to_14() {
        for n in 1..=14 {
            let all = enumerate_compositions(n).unwrap();
            assert_eq!(all.len(), 1 << (n - 1));
            assert!(all.iter().all(|l| l.weight() == n));
            let distinct: BTreeSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert!(
                all.windows(2).all(|w| w[0] < w[1]),
                "canonical order at n={n}"
            );
        }
    }

    #[test]
    fn invalid_compositions() {
        assert!(Composition::new(vec![]).is_err());
        assert!(Composition::new(vec![2, 0, 1]).is_err());
        assert!(serde_json::from_str::<Composition>(r#"{"parts":[1,0]}"#).is_err());
        assert_eq!(
            serde_json::from_str::<Composition>(r#"{"parts":[2,1]}"#).unwrap(),
            c(&[2, 1])
        );
    }

    #[test]
    fn tails() {
        assert_eq!(tail_sums(&c(&[2, 1])).as_slice(), &[3, 1]);
        assert_eq!(tail_sums(&c(&[7])).as_slice(), &[7]);
        assert_eq!(tail_sums(&c(&[1, 1, 1])).as_slice(), &[3, 2, 1]);
    }

    #[test]
    fn partitions() {
        assert_eq!(to_partition(&c(&[1, 2])), c(&[2, 1]));
        assert_eq!(to_partition(&c(&[3])), c(&[3]));
        assert_eq!(to_partition(&c(&[1, 2, 1])), c(&[2, 1, 1]));
    }

    #[test]
    fn dashed_form() {
        assert_eq!(Composition::from_dashed("2-1-3").unwrap(), c(&[2, 1, 3]));
        assert_eq!(c(&[4, 1]).to_dashed(), "4-1");
        assert!(Composition::from_dashed("2--1").is_err());
        assert_eq!(c(&[1, 2]).to_string(), "(1,2)");
    }

    #[test]
    fn decrement_removes_empty_boxes() {
        assert_eq!(c(&[2, 1]).decrement(0), Some(c(&[1, 1])));
        assert_eq!(c(&[2, 1]).decrement(1), Some(c(&[2])));
        assert_eq!(c(&[1]).decrement(0), None);
    }

    proptest! {
        #[test]
        fn tail_sums_round_trip(parts in prop::collection::vec(1usize..9, 1..12)) {
            let lambda = Composition::new(parts).unwrap();
            let tails = tail_sums(&lambda);
            prop_assert_eq!(tails.as_slice()[0], lambda.weight());
            prop_assert!(tails.as_slice().windows(2).all(|w| w[0] > w[1]));
            prop_assert_eq!(tails.to_composition(), lambda);
        }
    }
}

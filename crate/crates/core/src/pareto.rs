//! Dominance relations, Pareto fronts and the Drugan Pareto regret.
//!
//! All comparisons are exact floating-point `>=` / `>`; tolerances belong to
//! the LP and the regret metrics, never to dominance.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{MomabError, Result};
use crate::instance::RewardVector;

fn check_dims(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(MomabError::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `u ≻ v`: at least as good everywhere, strictly better somewhere.
pub fn dominates(u: &[f64], v: &[f64]) -> Result<bool> {
    check_dims(u, v)?;
    Ok(dominates_unchecked(u, v))
}

/// `u ⪰ v`: at least as good in every objective.
pub fn weakly_dominates(u: &[f64], v: &[f64]) -> Result<bool> {
    check_dims(u, v)?;
    Ok(weakly_dominates_unchecked(u, v))
}

#[inline]
pub(crate) fn dominates_unchecked(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a < b {
            return false;
        }
        strict |= a > b;
    }
    strict
}

#[inline]
pub(crate) fn weakly_dominates_unchecked(u: &[f64], v: &[f64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a >= b)
}

/// `u + shift ⪰ v`, without materializing the shifted vector.
#[inline]
pub(crate) fn shifted_weakly_dominates(u: &[f64], shift: f64, v: &[f64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a + shift >= *b)
}

/// A uniform lift applied to every objective.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DominanceShift(f64);

impl DominanceShift {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(MomabError::NegativeShift(epsilon));
        }
        Ok(DominanceShift(epsilon))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Adds the shift to every coordinate. No clamping to `[0, 1]`.
pub fn shift(u: &[f64], epsilon: DominanceShift) -> RewardVector {
    RewardVector(u.iter().map(|x| x + epsilon.0).collect())
}

/// Indices of the non-dominated rows of a means matrix, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub members: Vec<usize>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.members.binary_search(&arm).is_ok()
    }

    /// Member means, in member order.
    pub fn means<'a, V: AsRef<[f64]>>(&self, source: &'a [V]) -> Vec<&'a [f64]> {
        self.members.iter().map(|&i| source[i].as_ref()).collect()
    }
}

/// Extracts the non-dominated set. Identical vectors are all retained.
///
/// Rows are visited in decreasing coordinate sum (ties broken by descending
/// lexicographic order), so any dominator of a row is visited before it and
/// each row only needs checking against the front built so far.
pub fn pareto_front<V: AsRef<[f64]>>(means: &[V]) -> Result<ParetoFront> {
    let first = means.first().ok_or(MomabError::Empty("means matrix"))?;
    let d = first.as_ref().len();
    for row in means {
        check_dims(first.as_ref(), row.as_ref())?;
    }
    let sums: Vec<f64> = means.iter().map(|m| m.as_ref().iter().sum()).collect();
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&i, &j| {
        sums[j]
            .partial_cmp(&sums[i])
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                let (a, b) = (means[i].as_ref(), means[j].as_ref());
                (0..d)
                    .map(|k| b[k].partial_cmp(&a[k]).unwrap_or(Ordering::Equal))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then(i.cmp(&j))
    });

    let mut members: Vec<usize> = Vec::new();
    for i in order {
        let row = means[i].as_ref();
        if !members
            .iter()
            .any(|&m| dominates_unchecked(means[m].as_ref(), row))
        {
            members.push(i);
        }
    }
    members.sort_unstable();
    Ok(ParetoFront { members })
}

/// Smallest uniform lift after which no front member dominates `a`.
///
/// For a single member `f` with `m = min_d (f_d - a_d)`, `f` dominates `a + ε`
/// for every `0 <= ε < m` and for no `ε > m`, so the infimum over the whole
/// front is `max(0, max_f m_f)`.
pub fn drugan_regret<V: AsRef<[f64]>>(a: &[f64], front: &[V]) -> Result<f64> {
    if front.is_empty() {
        return Err(MomabError::Empty("Pareto front"));
    }
    let mut worst = 0.0f64;
    for f in front {
        let f = f.as_ref();
        check_dims(a, f)?;
        let margin = f
            .iter()
            .zip(a)
            .map(|(x, y)| x - y)
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(margin);
    }
    Ok(worst)
}

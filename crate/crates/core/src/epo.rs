//! Efficient Pareto-optimal arms, diverse front subsets and the virtual best arm.
//!
//! An arm is efficient when no convex combination of the other arms weakly
//! dominates it. Membership is decided by LP feasibility of
//! `{ α >= 0, Σα = 1, Σ α_i c_i ⪰ target }`.

use serde::{Deserialize, Serialize};

use crate::error::{MomabError, Result};
use crate::instance::RewardVector;
use crate::lp;

/// Tolerance used when replaying a witness against its inputs.
pub const WITNESS_TOL: f64 = 1e-9;

/// Convex weights over `support` whose combination weakly dominates a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexWitness {
    pub support: Vec<usize>,
    pub alphas: Vec<f64>,
}

impl ConvexWitness {
    /// Checks simplex membership and dominance of the combination, to [`WITNESS_TOL`].
    pub fn verify<V: AsRef<[f64]>>(&self, target: &[f64], candidates: &[V]) -> bool {
        if self.support.len() != self.alphas.len() || self.support.is_empty() {
            return false;
        }
        if self.alphas.iter().any(|&a| a < 0.0)
            || (self.alphas.iter().sum::<f64>() - 1.0).abs() > WITNESS_TOL
        {
            return false;
        }
        (0..target.len()).all(|d| {
            let combo: f64 = self
                .support
                .iter()
                .zip(&self.alphas)
                .map(|(&i, &a)| a * candidates[i].as_ref()[d])
                .sum();
            combo >= target[d] - WITNESS_TOL
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpoSet {
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualArm {
    pub mean: RewardVector,
    pub source: Vec<usize>,
}

/// Finds convex weights over `candidates` that weakly dominate `target`, if any.
///
/// Support indices refer to positions in `candidates`.
pub fn convex_dominance_witness<V: AsRef<[f64]>>(
    target: &[f64],
    candidates: &[V],
) -> Result<Option<ConvexWitness>> {
    if candidates.is_empty() {
        return Err(MomabError::Empty("candidate set"));
    }
    let d = target.len();
    for c in candidates {
        if c.as_ref().len() != d {
            return Err(MomabError::DimensionMismatch {
                expected: d,
                got: c.as_ref().len(),
            });
        }
    }
    let m = candidates.len();
    // Columns: α_1..α_m, then one surplus per objective.
    let mut a = Vec::with_capacity(d + 1);
    let mut row = vec![0.0; m + d];
    row[..m].fill(1.0);
    a.push(row);
    for k in 0..d {
        let mut row = vec![0.0; m + d];
        for (i, c) in candidates.iter().enumerate() {
            row[i] = c.as_ref()[k];
        }
        row[m + k] = -1.0;
        a.push(row);
    }
    let mut b = vec![1.0];
    b.extend_from_slice(target);

    let Some(x) = lp::find_feasible(&a, &b) else {
        return Ok(None);
    };
    let total: f64 = x[..m].iter().sum();
    let (support, alphas): (Vec<usize>, Vec<f64>) = x[..m]
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (i, v / total))
        .unzip();
    let witness = ConvexWitness { support, alphas };
    Ok(witness.verify(target, candidates).then_some(witness))
}

/// Efficient members of `arms` (indices into `means`).
///
/// Identical mean vectors are collapsed onto their lowest index first; each
/// representative is then tested against the other distinct vectors.
pub fn epo_filter<V: AsRef<[f64]>>(means: &[V], arms: &[usize]) -> Result<EpoSet> {
    if arms.is_empty() {
        return Err(MomabError::Empty("Pareto front"));
    }
    let mut sorted = arms.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut reps: Vec<usize> = Vec::new();
    for &a in &sorted {
        if !reps.iter().any(|&r| means[r].as_ref() == means[a].as_ref()) {
            reps.push(a);
        }
    }
    if reps.len() == 1 {
        return Ok(EpoSet { members: reps });
    }
    let mut members = Vec::new();
    for &a in &reps {
        let others: Vec<&[f64]> = reps
            .iter()
            .filter(|&&r| r != a)
            .map(|&r| means[r].as_ref())
            .collect();
        if convex_dominance_witness(means[a].as_ref(), &others)?.is_none() {
            members.push(a);
        }
    }
    Ok(EpoSet { members })
}

fn max_norm(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Greedy max-norm packing of `front` in ascending index order: an arm is kept
/// unless it lies within `2 * radius` of an arm already kept.
pub fn dpo_select<V: AsRef<[f64]>>(means: &[V], front: &[usize], radius: f64) -> Result<Vec<usize>> {
    if radius.is_nan() || radius < 0.0 {
        return Err(MomabError::InvalidConfig(format!(
            "radius must be >= 0 (got {radius})"
        )));
    }
    let mut sorted = front.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if radius == 0.0 {
        return Ok(sorted);
    }
    let mut kept: Vec<usize> = Vec::new();
    for a in sorted {
        if kept
            .iter()
            .all(|&k| max_norm(means[a].as_ref(), means[k].as_ref()) > 2.0 * radius)
        {
            kept.push(a);
        }
    }
    Ok(kept)
}

/// Coordinate-wise average of the selected arms' means.
pub fn virtual_best<V: AsRef<[f64]>>(means: &[V], arms: &[usize]) -> Result<VirtualArm> {
    let first = arms.first().ok_or(MomabError::Empty("DPO set"))?;
    let d = means[*first].as_ref().len();
    let mut avg = vec![0.0; d];
    for &a in arms {
        for (s, v) in avg.iter_mut().zip(means[a].as_ref()) {
            *s += v;
        }
    }
    for s in avg.iter_mut() {
        *s /= arms.len() as f64;
    }
    Ok(VirtualArm {
        mean: RewardVector(avg),
        source: arms.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::pareto_front;
    use proptest::prelude::*;

    #[test]
    fn witness_examples() {
        let cands = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = convex_dominance_witness(&[0.2, 0.2], &cands).unwrap().unwrap();
        assert!(w.verify(&[0.2, 0.2], &cands));
        assert!(convex_dominance_witness(&[0.6, 0.6], &cands).unwrap().is_none());
        let w = convex_dominance_witness(&[0.3, 0.7], &[vec![0.3, 0.7]]).unwrap().unwrap();
        assert_eq!(w.support, vec![0]);
        assert!((w.alphas[0] - 1.0).abs() < 1e-12);
        assert!(convex_dominance_witness::<Vec<f64>>(&[0.1], &[]).is_err());
        assert!(convex_dominance_witness(&[0.1], &[vec![0.1, 0.2]]).is_err());
    }

    #[test]
    fn epo_examples() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.2, 0.2]];
        assert_eq!(epo_filter(&m, &[0, 1, 2]).unwrap().members, vec![0, 1]);
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]];
        assert_eq!(epo_filter(&m, &[0, 1, 2]).unwrap().members, vec![0, 1, 2]);
        assert_eq!(epo_filter(&m, &[2]).unwrap().members, vec![2]);
        assert!(epo_filter(&m, &[]).is_err());
    }

    #[test]
    fn epo_collapses_duplicates() {
        let m = vec![vec![0.7, 0.2], vec![0.2, 0.7], vec![0.7, 0.2]];
        assert_eq!(epo_filter(&m, &[0, 1, 2]).unwrap().members, vec![0, 1]);
        let m = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert_eq!(epo_filter(&m, &[0, 1]).unwrap().members, vec![0]);
    }

    #[test]
    fn dpo_examples() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(dpo_select(&m, &[0, 1], 0.1).unwrap(), vec![0, 1]);
        let m = vec![vec![1.0, 0.0], vec![0.99, 0.01]];
        assert_eq!(dpo_select(&m, &[0, 1], 0.1).unwrap(), vec![0]);
        assert_eq!(dpo_select(&m, &[1, 0], 0.0).unwrap(), vec![0, 1]);
        assert!(dpo_select(&m, &[0], -1.0).is_err());
    }

    #[test]
    fn virtual_best_examples() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.7, 0.7], vec![0.4, 0.4]];
        assert_eq!(virtual_best(&m, &[0, 1]).unwrap().mean.0, vec![0.5, 0.5]);
        assert_eq!(virtual_best(&m, &[3]).unwrap().mean.0, vec![0.4, 0.4]);
        let v = virtual_best(&m, &[0, 1, 2]).unwrap();
        for x in v.mean.iter() {
            assert!((x - 1.7 / 3.0).abs() < 1e-12);
        }
        assert!(virtual_best(&m, &[]).is_err());
    }

    /// Is some point of the simplex grid (step 1e-3) within `margin` of dominating `target`?
    fn grid_search(target: &[f64], cands: &[Vec<f64>], margin: f64) -> bool {
        let steps = 1000usize;
        let check = |alphas: &[f64]| {
            (0..target.len()).all(|d| {
                let v: f64 = alphas.iter().zip(cands).map(|(a, c)| a * c[d]).sum();
                v >= target[d] - margin
            })
        };
        match cands.len() {
            1 => check(&[1.0]),
            2 => (0..=steps).any(|i| {
                let a = i as f64 / steps as f64;
                check(&[a, 1.0 - a])
            }),
            _ => (0..=steps).any(|i| {
                (0..=steps - i).any(|j| {
                    let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                    check(&[a, b, (1.0 - a - b).max(0.0)])
                })
            }),
        }
    }

    fn upper_hull(points: &[Vec<f64>], front: &[usize]) -> Vec<usize> {
        let mut idx = front.to_vec();
        idx.sort_by(|&a, &b| points[a][0].partial_cmp(&points[b][0]).unwrap());
        let cross = |o: usize, a: usize, b: usize| {
            (points[a][0] - points[o][0]) * (points[b][1] - points[o][1])
                - (points[a][1] - points[o][1]) * (points[b][0] - points[o][0])
        };
        let mut hull: Vec<usize> = Vec::new();
        for p in idx {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.sort_unstable();
        hull
    }

    proptest! {
        #[test]
        fn witness_agrees_with_grid(
            target in prop::collection::vec(0.0f64..1.0, 1..4),
            m in 1usize..4,
            seed in prop::collection::vec(0.0f64..1.0, 12),
        ) {
            let d = target.len();
            let cands: Vec<Vec<f64>> = (0..m).map(|i| (0..d).map(|k| seed[(i * d + k) % 12]).collect()).collect();
            let witness = convex_dominance_witness(&target, &cands).unwrap();
            if grid_search(&target, &cands, 0.0) {
                prop_assert!(witness.is_some());
            }
            if let Some(w) = witness {
                prop_assert!(w.verify(&target, &cands));
                prop_assert!(grid_search(&target, &cands, 1e-2));
            }
        }

        #[test]
        fn epo_matches_hull_in_two_dims(pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..30)) {
            let front = pareto_front(&pts).unwrap().members;
            let got = epo_filter(&pts, &front).unwrap().members;
            prop_assert_eq!(&got, &upper_hull(&pts, &front));
            prop_assert_eq!(epo_filter(&pts, &got).unwrap().members, got.clone());
        }

        #[test]
        fn extreme_arms_are_efficient(pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 2..15)) {
            let front = pareto_front(&pts).unwrap().members;
            let epo = epo_filter(&pts, &front).unwrap().members;
            prop_assert!(epo.iter().all(|a| front.contains(a)));
            for d in 0..3 {
                let best = front.iter().copied().max_by(|&a, &b| pts[a][d].partial_cmp(&pts[b][d]).unwrap()).unwrap();
                let unique = front.iter().filter(|&&a| pts[a][d] == pts[best][d]).count() == 1;
                if unique {
                    prop_assert!(epo.contains(&best));
                }
            }
        }
    }
}

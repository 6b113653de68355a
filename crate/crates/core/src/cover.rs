//! Shifted-dominance set cover.
//!
//! After exploration every surviving arm `a` covers the arms its lifted mean
//! `a + 2r` weakly dominates. The exploitation set is a minimum family of arms
//! whose cover lists jointly contain every survivor.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use fixedbitset::FixedBitSet;
use crate::error::{MomabError, Result};
use crate::pareto::{shifted_weakly_dominates, weakly_dominates_unchecked};

/// Default cap on the universe size accepted by [`exact_set_cover`].
pub const DEFAULT_EXACT_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    Exact,
    Greedy,
}

impl std::fmt::Display for CoverMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoverMode::Exact => "exact",
            CoverMode::Greedy => "greedy",
        })
    }
}

/// Universe of surviving arms and the cover list `Dom(a)` of each.
///
/// `dom_sets[i]` belongs to `universe[i]`; both hold arm indices and the
/// universe is sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverProblem {
    pub universe: Vec<usize>,
    pub dom_sets: Vec<Vec<usize>>,
    pub shift_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub mode: CoverMode,
    pub chosen: Vec<usize>,
    /// Solver wall-clock seconds; `None` once timings are stripped.
    pub elapsed: Option<f64>,
}

/// Arms left after dropping every arm `a` with some other `a' ⪰ a + two_r`.
///
/// With a zero shift two identical rows weakly dominate each other; only the
/// higher-indexed copy is removed so the result is never empty.
pub fn prune_dominated<V: AsRef<[f64]>>(means: &[V], two_r: f64) -> Result<Vec<usize>> {
    if two_r.is_nan() || two_r < 0.0 {
        return Err(MomabError::NegativeShift(two_r));
    }
    let n = means.len();
    Ok((0..n)
        .filter(|&a| {
            let lifted: Vec<f64> = means[a].as_ref().iter().map(|x| x + two_r).collect();
            !(0..n).any(|b| {
                b != a
                    && weakly_dominates_unchecked(means[b].as_ref(), &lifted)
                    && (b < a || !weakly_dominates_unchecked(&lifted, means[b].as_ref()))
            })
        })
        .collect())
}

/// `Dom(a) = { a' in survivors : mean(a) + two_r ⪰ mean(a') }` for each survivor.
pub fn build_cover_problem<V: AsRef<[f64]>>(
    means: &[V],
    survivors: &[usize],
    two_r: f64,
) -> Result<CoverProblem> {
    if survivors.is_empty() {
        return Err(MomabError::Empty("survivor set"));
    }
    if two_r.is_nan() || two_r < 0.0 {
        return Err(MomabError::NegativeShift(two_r));
    }
    let mut universe = survivors.to_vec();
    universe.sort_unstable();
    universe.dedup();
    if let Some(&bad) = universe.iter().find(|&&a| a >= means.len()) {
        return Err(MomabError::ArmOutOfRange {
            arm: bad,
            n: means.len(),
        });
    }
    let dom_sets = universe
        .iter()
        .map(|&a| {
            universe
                .iter()
                .copied()
                .filter(|&b| shifted_weakly_dominates(means[a].as_ref(), two_r, means[b].as_ref()))
                .collect()
        })
        .collect();
    Ok(CoverProblem {
        universe,
        dom_sets,
        shift_used: two_r,
    })
}

impl CoverProblem {
    /// Builds a problem from explicit cover lists, checking its invariants.
    pub fn new(universe: Vec<usize>, dom_sets: Vec<Vec<usize>>, shift_used: f64) -> Result<Self> {
        if universe.is_empty() {
            return Err(MomabError::Empty("cover universe"));
        }
        if universe.len() != dom_sets.len() {
            return Err(MomabError::Inconsistent(format!(
                "{} universe arms but {} cover lists",
                universe.len(),
                dom_sets.len()
            )));
        }
        if universe.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MomabError::Inconsistent(
                "universe must be strictly ascending".into(),
            ));
        }
        let mut problem = CoverProblem {
            universe,
            dom_sets,
            shift_used,
        };
        for (i, set) in problem.dom_sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            let arm = problem.universe[i];
            if set.binary_search(&arm).is_err() {
                return Err(MomabError::Inconsistent(format!(
                    "arm {arm} does not cover itself"
                )));
            }
            if let Some(out) = set
                .iter()
                .find(|a| problem.universe.binary_search(a).is_err())
            {
                return Err(MomabError::Inconsistent(format!(
                    "Dom({arm}) contains {out}, which is outside the universe"
                )));
            }
        }
        Ok(problem)
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    /// Stable 64-bit digest, used to confirm two solvers saw the same input.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.universe.hash(&mut h);
        self.dom_sets.hash(&mut h);
        self.shift_used.to_bits().hash(&mut h);
        h.finish()
    }

    /// True iff the cover lists of `chosen` jointly contain the universe.
    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        let local = self.local_sets();
        let mut covered = FixedBitSet::with_capacity(self.len());
        for arm in chosen {
            match self.universe.binary_search(arm) {
                Ok(i) => covered.union_with(&local[i]),
                Err(_) => return false,
            }
        }
        covered.count_ones(..) == self.len()
    }

    /// Cover lists as bitsets over universe positions.
    fn local_sets(&self) -> Vec<FixedBitSet> {
        let m = self.len();
        self.dom_sets
            .iter()
            .map(|set| {
                let mut bits = FixedBitSet::with_capacity(m);
                bits.extend(set.iter().filter_map(|a| self.universe.binary_search(a).ok()));
                bits
            })
            .collect()
    }

    fn full(&self) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.len());
        bits.insert_range(..);
        bits
    }
}

/// Repeatedly takes the arm covering the most uncovered arms (ties: lowest index).
pub fn greedy_set_cover(problem: &CoverProblem) -> Result<CoverSolution> {
    if problem.is_empty() {
        return Err(MomabError::Empty("cover universe"));
    }
    let start = Instant::now();
    let sets = problem.local_sets();
    let mut uncovered = problem.full();
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.intersection_count(&uncovered)))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain == 0 {
            return Err(MomabError::Inconsistent(
                "cover lists do not cover the universe".into(),
            ));
        }
        uncovered.difference_with(&sets[best]);
        chosen.push(problem.universe[best]);
    }
    chosen.sort_unstable();
    Ok(CoverSolution {
        mode: CoverMode::Greedy,
        chosen,
        elapsed: Some(start.elapsed().as_secs_f64()),
    })
}

/// Minimum-cardinality cover; among all minimum covers the lexicographically
/// smallest sorted index list is returned.
///
/// The optimum size is found by iterative deepening over `k`, each depth a
/// depth-first search that branches on the uncovered arm with the fewest
/// candidate sets and bounds by the `k` largest remaining gains. The
/// lexicographic minimum is then fixed slot by slot with the same search.
pub fn exact_set_cover(problem: &CoverProblem, limit: usize) -> Result<CoverSolution> {
    if problem.is_empty() {
        return Err(MomabError::Empty("cover universe"));
    }
    if problem.len() > limit {
        return Err(MomabError::ExactLimitExceeded {
            size: problem.len(),
            limit,
        });
    }
    let start = Instant::now();
    let sets = problem.local_sets();
    let full = problem.full();
    let m = problem.len();

    let reduced = undominated_candidates(&sets, &full, &(0..m).collect::<Vec<_>>());
    let mut size = 0;
    for k in 1..=m {
        if search(&sets, &full, k, &reduced) {
            size = k;
            break;
        }
    }
    if size == 0 {
        return Err(MomabError::Inconsistent(
            "cover lists do not cover the universe".into(),
        ));
    }

    let mut chosen = Vec::with_capacity(size);
    let mut uncovered = full;
    let mut next = 0;
    for slot in 0..size {
        let remaining = size - slot - 1;
        let pick = (next..m)
            .find(|&i| {
                if sets[i].intersection_count(&uncovered) == 0 {
                    return false;
                }
                let mut rest = uncovered.clone();
                rest.difference_with(&sets[i]);
                let pool: Vec<usize> = (i + 1..m).collect();
                let pool = undominated_candidates(&sets, &rest, &pool);
                search(&sets, &rest, remaining, &pool)
            })
            .expect("a cover of the optimal size exists");
        uncovered.difference_with(&sets[pick]);
        chosen.push(problem.universe[pick]);
        next = pick + 1;
    }
    debug_assert!(uncovered.is_clear());
    Ok(CoverSolution {
        mode: CoverMode::Exact,
        chosen,
        elapsed: Some(start.elapsed().as_secs_f64()),
    })
}

/// Drops candidates whose useful part is a strict subset of another's, and
/// duplicates of an earlier candidate. Feasibility of any budget is unchanged.
fn undominated_candidates(sets: &[FixedBitSet], uncovered: &FixedBitSet, pool: &[usize]) -> Vec<usize> {
    let useful: Vec<(usize, FixedBitSet)> = pool
        .iter()
        .filter_map(|&i| {
            let mut s = sets[i].clone();
            s.intersect_with(uncovered);
            (!s.is_clear()).then_some((i, s))
        })
        .collect();
    useful
        .iter()
        .enumerate()
        .filter(|(x, (_, a))| {
            !useful.iter().enumerate().any(|(y, (_, b))| {
                x != &y && a.is_subset(b) && (!b.is_subset(a) || y < *x)
            })
        })
        .map(|(_, (i, _))| *i)
        .collect()
}

/// Is there a cover of `uncovered` with at most `budget` sets drawn from `pool`?
fn search(sets: &[FixedBitSet], uncovered: &FixedBitSet, budget: usize, pool: &[usize]) -> bool {
    if uncovered.is_clear() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    let mut gains: Vec<(usize, usize)> = pool
        .iter()
        .map(|&i| (i, sets[i].intersection_count(uncovered)))
        .filter(|&(_, g)| g > 0)
        .collect();
    let need = uncovered.count_ones(..);
    let mut top: Vec<usize> = gains.iter().map(|&(_, g)| g).collect();
    top.sort_unstable_by(|a, b| b.cmp(a));
    if top.iter().take(budget).sum::<usize>() < need {
        return false;
    }
    if budget == 1 {
        return top[0] == need;
    }

    // Branch on the uncovered arm with the fewest candidate sets.
    let mut pivot = None;
    let mut fewest = usize::MAX;
    for e in uncovered.ones() {
        let c = gains.iter().filter(|&&(i, _)| sets[i].contains(e)).count();
        if c < fewest {
            fewest = c;
            pivot = Some(e);
            if c <= 1 {
                break;
            }
        }
    }
    let pivot = pivot.expect("uncovered is non-empty");
    if fewest == 0 {
        return false;
    }

    gains.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let branches: Vec<usize> = gains
        .iter()
        .map(|&(i, _)| i)
        .filter(|&i| sets[i].contains(pivot))
        .collect();
    let mut pool: Vec<usize> = gains.iter().map(|&(i, _)| i).collect();
    for s in branches {
        let mut rest = uncovered.clone();
        rest.difference_with(&sets[s]);
        pool.retain(|&i| i != s);
        // Sets tried earlier at this node are excluded from later siblings.
        if search(sets, &rest, budget - 1, &pool) {
            return true;
        }
    }
    false
}

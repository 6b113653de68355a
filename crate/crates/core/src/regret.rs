//! Regret metrics, evaluated in expectation against the true means.
//!
//! All quantities use true means and pull counts rather than sampled reward
//! sums, so bound checks carry no simulation noise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::epo::{dpo_select, virtual_best};
use crate::error::{MomabError, Result};
use crate::instance::Instance;
use crate::momab::{EmpiricalStats, RunResult, Variant};
use crate::pareto::{drugan_regret, pareto_front};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExploitMode {
    /// Every arm of the set is pulled in every exploitation round.
    EveryRound,
    /// One uniformly random arm of the set per round; evaluated in expectation.
    UniformSingle,
}

/// Which arms are pulled in each phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullSchedule {
    pub horizon: u64,
    pub t_prime: u64,
    pub arms: Vec<usize>,
    pub mode: ExploitMode,
}

impl PullSchedule {
    pub fn from_run(run: &RunResult) -> Self {
        PullSchedule {
            horizon: run.horizon,
            t_prime: run.t_prime,
            arms: run.exploited.clone(),
            mode: match run.variant {
                Variant::SingleRandom => ExploitMode::UniformSingle,
                Variant::FullB | Variant::EpoFiltered => ExploitMode::EveryRound,
            },
        }
    }

    pub fn exploitation_rounds(&self) -> u64 {
        self.horizon - self.t_prime
    }

    fn check(&self) -> Result<()> {
        if self.t_prime > self.horizon {
            return Err(MomabError::Inconsistent(format!(
                "T'={} exceeds T={}",
                self.t_prime, self.horizon
            )));
        }
        if self.arms.is_empty() {
            return Err(MomabError::Empty("exploitation set"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub front: Vec<usize>,
    /// May be negative when the exploited arms beat a front member.
    pub coverage_per_po_arm: BTreeMap<usize, f64>,
    pub coverage_max: f64,
    pub adjustment_total: f64,
    pub adjustment_normalized: f64,
    pub drugan_total: f64,
    pub bstar_exploit_gap: f64,
    /// `n * T'`: the exploration budget that bounds the first phase.
    pub exploration_allowance: f64,
    pub clean_event: bool,
    /// Total sampled successes per objective, when exploitation rewards were sampled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled_reward_totals: Option<Vec<u64>>,
}

impl RegretReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn worst_shortfall(target: &[f64], b: &[f64]) -> f64 {
    target
        .iter()
        .zip(b)
        .map(|(t, x)| t - x)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn average<V: AsRef<[f64]>>(means: &[V], arms: &[usize]) -> Vec<f64> {
    virtual_best(means, arms)
        .expect("non-empty arm set")
        .mean
        .0
}

/// Smallest uniform lift after which `a` weakly dominates some front member.
pub fn epsilon_to_front<V: AsRef<[f64]>>(a: &[f64], front: &[V]) -> Result<f64> {
    if front.is_empty() {
        return Err(MomabError::Empty("Pareto front"));
    }
    let mut best = f64::INFINITY;
    for f in front {
        let f = f.as_ref();
        if f.len() != a.len() {
            return Err(MomabError::DimensionMismatch {
                expected: a.len(),
                got: f.len(),
            });
        }
        best = best.min(worst_shortfall(f, a).max(0.0));
    }
    Ok(best)
}

/// Per front member `a*`: `(T - T') * min_b max_d (μ_d(a*) - μ_d(b))`, plus the maximum.
///
/// Exploration rounds contribute nothing because `a*` itself is pulled there.
pub fn coverage_regret<V: AsRef<[f64]>>(
    true_means: &[V],
    front: &[usize],
    schedule: &PullSchedule,
) -> Result<(BTreeMap<usize, f64>, f64)> {
    schedule.check()?;
    if front.is_empty() {
        return Err(MomabError::Empty("Pareto front"));
    }
    let rounds = schedule.exploitation_rounds() as f64;
    let comparators: Vec<Vec<f64>> = match schedule.mode {
        ExploitMode::EveryRound => schedule
            .arms
            .iter()
            .map(|&b| true_means[b].as_ref().to_vec())
            .collect(),
        ExploitMode::UniformSingle => vec![average(true_means, &schedule.arms)],
    };
    let per_arm: BTreeMap<usize, f64> = front
        .iter()
        .map(|&a| {
            let target = true_means[a].as_ref();
            let gap = comparators
                .iter()
                .map(|b| worst_shortfall(target, b))
                .fold(f64::INFINITY, f64::min);
            (a, rounds * gap)
        })
        .collect();
    let max = per_arm.values().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((per_arm, max))
}

/// `T' * Σ_all ε(a) + (T - T') * Σ_{b in B} ε(b)`, with the second sum replaced
/// by the average over `B` for the single-arm schedule.
pub fn adjustment_regret<V: AsRef<[f64]>>(
    true_means: &[V],
    front: &[usize],
    schedule: &PullSchedule,
) -> Result<f64> {
    schedule.check()?;
    let front_means: Vec<&[f64]> = front.iter().map(|&f| true_means[f].as_ref()).collect();
    let eps = |a: usize| epsilon_to_front(true_means[a].as_ref(), &front_means);
    let exploration: f64 = (0..true_means.len()).map(eps).sum::<Result<f64>>()?;
    let exploited: f64 = schedule.arms.iter().map(|&b| eps(b)).sum::<Result<f64>>()?;
    let exploited = match schedule.mode {
        ExploitMode::EveryRound => exploited,
        ExploitMode::UniformSingle => exploited / schedule.arms.len() as f64,
    };
    Ok(schedule.t_prime as f64 * exploration + schedule.exploitation_rounds() as f64 * exploited)
}

/// Exploitation gap to the virtual best arm `b*` (average of a diverse front
/// subset): `(T - T') * max_d (μ_d(b*) - avg_{b in B} μ_d(b))`.
pub fn bstar_regret<V: AsRef<[f64]>>(
    true_means: &[V],
    front: &[usize],
    schedule: &PullSchedule,
    radius: f64,
) -> Result<f64> {
    schedule.check()?;
    if front.is_empty() {
        return Err(MomabError::Empty("Pareto front"));
    }
    let dpo = dpo_select(true_means, front, radius)?;
    let bstar = virtual_best(true_means, &dpo)?;
    let avg = average(true_means, &schedule.arms);
    Ok(schedule.exploitation_rounds() as f64 * worst_shortfall(bstar.mean.as_slice(), &avg))
}

/// Every empirical mean within `radius` of its true mean.
pub fn clean_event<V: AsRef<[f64]>>(stats: &EmpiricalStats, true_means: &[V], radius: f64) -> Result<bool> {
    if stats.n() != true_means.len() {
        return Err(MomabError::Inconsistent(format!(
            "statistics for {} arms, instance has {}",
            stats.n(),
            true_means.len()
        )));
    }
    for (a, truth) in true_means.iter().enumerate() {
        let mean = stats
            .mean(a)
            .ok_or_else(|| MomabError::Inconsistent(format!("arm {a} has no statistics")))?;
        if mean
            .iter()
            .zip(truth.as_ref())
            .any(|(m, t)| (m - t).abs() > radius)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All metrics for one run.
pub fn build_report(run: &RunResult, instance: &Instance) -> Result<RegretReport> {
    let n = instance.n();
    let s = &run.schedule_summary;
    if run.empirical.n() != n || s.exploitation_pulls.len() != n {
        return Err(MomabError::Inconsistent(format!(
            "run covers {} arms, instance has {n}",
            run.empirical.n()
        )));
    }
    if run.t_prime + s.exploitation_rounds != run.horizon {
        return Err(MomabError::Inconsistent("schedule does not add up to T".into()));
    }
    if let Some(&bad) = run.exploited.iter().find(|&&a| a >= n) {
        return Err(MomabError::ArmOutOfRange { arm: bad, n });
    }
    let means = instance.means();
    let front = pareto_front(means)?.members;
    let schedule = PullSchedule::from_run(run);
    let (coverage_per_po_arm, coverage_max) = coverage_regret(means, &front, &schedule)?;
    let adjustment_total = adjustment_regret(means, &front, &schedule)?;
    let front_means: Vec<&[f64]> = front.iter().map(|&f| means[f].as_ref()).collect();
    let mut drugan_total = 0.0;
    for a in 0..n {
        let pulls = run.empirical.pulls[a] + s.exploitation_pulls[a];
        if pulls > 0 {
            drugan_total += pulls as f64 * drugan_regret(means[a].as_slice(), &front_means)?;
        }
    }
    let sampled_reward_totals = run.exploitation_rewards.as_ref().map(|exploit| {
        (0..instance.d())
            .map(|d| {
                (0..n)
                    .map(|a| run.empirical.sums[a][d] + exploit[a][d])
                    .sum()
            })
            .collect()
    });
    Ok(RegretReport {
        coverage_per_po_arm,
        coverage_max,
        adjustment_normalized: adjustment_total / front.len() as f64,
        adjustment_total,
        drugan_total,
        bstar_exploit_gap: bstar_regret(means, &front, &schedule, run.radius)?,
        exploration_allowance: n as f64 * run.t_prime as f64,
        clean_event: clean_event(&run.empirical, means, run.radius)?,
        sampled_reward_totals,
        front,
    })
}

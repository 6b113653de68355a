//! Explore-then-commit with set cover, and the Pareto-UCB1 baseline.
//!
//! Exploration occupies rounds `1..=T'` and pulls every arm once per round.
//! Exploitation occupies the remaining `T - T'` rounds and pulls the whole
//! committed set each round (or one uniformly random member of it, for the
//! single-arm variant). Rewards are drawn per arm in Binomial batches, which
//! has the same distribution as the per-round draws.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{
    build_cover_problem, exact_set_cover, greedy_set_cover, prune_dominated, CoverMode,
    CoverProblem, CoverSolution, DEFAULT_EXACT_LIMIT,
};
use crate::epo::epo_filter;
use crate::error::{MomabError, Result};
use crate::instance::{binomial, Instance};
use crate::pareto::pareto_front;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Pull every member of the cover each exploitation round.
    FullB,
    /// Drop non-efficient members of the cover first, then pull all of them.
    EpoFiltered,
    /// Pull one uniformly random member of the cover each exploitation round.
    SingleRandom,
}

/// How the exploration length is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationLength {
    /// `ceil((T/n)^(2/3) (2 ln T)^(1/3))`.
    Formula,
    /// A fixed `T'`; the radius is recomputed from it.
    Fixed(u64),
    /// The smallest `T'` whose confidence radius is at most the target.
    TargetRadius(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub horizon: u64,
    pub exploration: ExplorationLength,
    pub cover_mode: CoverMode,
    pub variant: Variant,
    pub prune: bool,
    pub exact_limit: usize,
    /// Also sample exploitation rewards (diagnostics only; metrics use expectations).
    pub sample_exploitation: bool,
}

impl AlgoConfig {
    pub fn new(horizon: u64) -> Self {
        AlgoConfig {
            horizon,
            exploration: ExplorationLength::Formula,
            cover_mode: CoverMode::Greedy,
            variant: Variant::FullB,
            prune: true,
            exact_limit: DEFAULT_EXACT_LIMIT,
            sample_exploitation: false,
        }
    }

    /// Resolves `T'` for `n` arms, validating it against the horizon.
    pub fn exploration_length(&self, n: usize) -> Result<u64> {
        let t = self.horizon;
        if self.exact_limit == 0 {
            return Err(MomabError::InvalidConfig("exact_limit must be >= 1".into()));
        }
        match self.exploration {
            ExplorationLength::Formula => compute_exploration_length(t, n),
            ExplorationLength::Fixed(tp) => {
                if tp == 0 || tp >= t {
                    Err(MomabError::InvalidConfig(format!(
                        "exploration length {tp} must satisfy 1 <= T' < T = {t}"
                    )))
                } else {
                    Ok(tp)
                }
            }
            ExplorationLength::TargetRadius(r) => {
                let tp = calibrated_exploration_length(t, r)?;
                if tp >= t {
                    Err(MomabError::HorizonTooSmall {
                        horizon: t,
                        arms: n,
                        t_prime: tp,
                    })
                } else {
                    Ok(tp)
                }
            }
        }
    }
}

/// `T' = ceil((T/n)^(2/3) (2 ln T)^(1/3))`, at least 1 and below `T`.
pub fn compute_exploration_length(horizon: u64, n: usize) -> Result<u64> {
    if n == 0 || horizon <= n as u64 {
        return Err(MomabError::InvalidConfig(format!(
            "need T > n >= 1 (got T={horizon}, n={n})"
        )));
    }
    let t = horizon as f64;
    let raw = (t / n as f64).powf(2.0 / 3.0) * (2.0 * t.ln()).cbrt();
    let t_prime = (raw.ceil() as u64).max(1);
    if t_prime >= horizon {
        return Err(MomabError::HorizonTooSmall {
            horizon,
            arms: n,
            t_prime,
        });
    }
    Ok(t_prime)
}

/// Smallest `T'` with `sqrt(2 ln T / T') <= radius`.
pub fn calibrated_exploration_length(horizon: u64, radius: f64) -> Result<u64> {
    if radius.is_nan() || radius <= 0.0 || horizon < 2 {
        return Err(MomabError::InvalidConfig(format!(
            "target radius needs r > 0 and T >= 2 (got r={radius}, T={horizon})"
        )));
    }
    Ok(((2.0 * (horizon as f64).ln() / (radius * radius)).ceil() as u64).max(1))
}

/// `r = sqrt(2 ln T / T')`.
pub fn confidence_radius(horizon: u64, t_prime: u64) -> f64 {
    debug_assert!(horizon >= 2 && t_prime >= 1);
    (2.0 * (horizon as f64).ln() / t_prime as f64).sqrt()
}

/// Pull counts and per-objective success totals after exploration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub pulls: Vec<u64>,
    pub sums: Vec<Vec<u64>>,
    pub radius: f64,
}

impl EmpiricalStats {
    pub fn n(&self) -> usize {
        self.pulls.len()
    }

    /// Empirical means; an arm with no pulls has no mean.
    pub fn mean(&self, arm: usize) -> Option<Vec<f64>> {
        let p = self.pulls[arm];
        (p > 0).then(|| self.sums[arm].iter().map(|&s| s as f64 / p as f64).collect())
    }

    pub fn means(&self) -> Result<Vec<Vec<f64>>> {
        (0..self.n())
            .map(|a| {
                self.mean(a)
                    .ok_or_else(|| MomabError::Inconsistent(format!("arm {a} was never pulled")))
            })
            .collect()
    }
}

/// Pulls every arm `t_prime` times from its own exploration stream.
pub fn run_explore(instance: &Instance, t_prime: u64, horizon: u64, seed: u64) -> Result<EmpiricalStats> {
    if t_prime == 0 {
        return Err(MomabError::InvalidConfig("exploration length must be >= 1".into()));
    }
    let sums = (0..instance.n())
        .map(|a| instance.sample_pull_batch(a, t_prime, &mut rng::exploration_stream(seed, a)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalStats {
        pulls: vec![t_prime; instance.n()],
        sums,
        radius: confidence_radius(horizon.max(2), t_prime),
    })
}

/// State at the end of exploration: statistics, survivors and the cover problem.
#[derive(Debug, Clone)]
pub struct Committed {
    pub t_prime: u64,
    pub radius: f64,
    pub stats: EmpiricalStats,
    pub empirical_means: Vec<Vec<f64>>,
    pub survivors: Vec<usize>,
    pub problem: CoverProblem,
    pub explore_s: f64,
}

/// Exploration, pruning and cover-list construction.
pub fn explore_and_build(instance: &Instance, config: &AlgoConfig, seed: u64) -> Result<Committed> {
    let start = Instant::now();
    let t_prime = config.exploration_length(instance.n())?;
    let stats = run_explore(instance, t_prime, config.horizon, seed)?;
    let radius = stats.radius;
    let empirical_means = stats.means()?;
    let explore_s = start.elapsed().as_secs_f64();
    let two_r = 2.0 * radius;
    let survivors = if config.prune {
        prune_dominated(&empirical_means, two_r)?
    } else {
        (0..instance.n()).collect()
    };
    let problem = build_cover_problem(&empirical_means, &survivors, two_r)?;
    Ok(Committed {
        t_prime,
        radius,
        stats,
        empirical_means,
        survivors,
        problem,
        explore_s,
    })
}

pub fn solve_cover(problem: &CoverProblem, mode: CoverMode, exact_limit: usize) -> Result<CoverSolution> {
    match mode {
        CoverMode::Exact => exact_set_cover(problem, exact_limit),
        CoverMode::Greedy => greedy_set_cover(problem),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSummary {
    pub exploration_rounds: u64,
    pub exploration_pulls: u64,
    pub exploitation_rounds: u64,
    /// Arms pulled per exploitation round: the committed set size, or 1.
    pub arms_per_round: usize,
    /// Exploitation pulls received by each arm.
    pub exploitation_pulls: Vec<u64>,
}

impl ScheduleSummary {
    pub fn total_pulls(&self) -> u64 {
        self.exploration_pulls + self.exploitation_pulls.iter().sum::<u64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub explore_s: f64,
    pub cover_s: f64,
    pub epo_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub horizon: u64,
    pub seed: u64,
    pub variant: Variant,
    pub t_prime: u64,
    pub radius: f64,
    pub survivors: Vec<usize>,
    pub cover: CoverSolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epo_members: Option<Vec<usize>>,
    /// Arms pulled during exploitation: the cover, or its efficient part.
    pub exploited: Vec<usize>,
    pub schedule_summary: ScheduleSummary,
    pub empirical: EmpiricalStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exploitation_rewards: Option<Vec<Vec<u64>>>,
    /// Hex digest of the cover problem handed to the solver.
    pub problem_fingerprint: String,
    pub timings: Option<Timings>,
}

impl RunResult {
    /// Drops every wall-clock measurement, leaving a seed-determined record.
    pub fn strip_timings(&mut self) {
        self.timings = None;
        self.cover.elapsed = None;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run result serializes")
    }
}

/// Explore, build the cover, commit, and summarise the exploitation schedule.
pub fn run_algorithm(instance: &Instance, config: &AlgoConfig, seed: u64) -> Result<RunResult> {
    let start = Instant::now();
    let committed = explore_and_build(instance, config, seed)?;
    let cover = solve_cover(&committed.problem, config.cover_mode, config.exact_limit)?;
    let cover_s = cover.elapsed.unwrap_or(0.0);

    let epo_start = Instant::now();
    let (epo_members, exploited) = match config.variant {
        Variant::EpoFiltered => {
            let epo = epo_filter(&committed.empirical_means, &cover.chosen)?.members;
            (Some(epo.clone()), epo)
        }
        Variant::FullB | Variant::SingleRandom => (None, cover.chosen.clone()),
    };
    let epo_s = epo_start.elapsed().as_secs_f64();

    let n = instance.n();
    let t_prime = committed.t_prime;
    let rounds = config.horizon - t_prime;
    let mut exploitation_pulls = vec![0u64; n];
    let arms_per_round = match config.variant {
        Variant::SingleRandom => {
            let mut rng = rng::selection_stream(seed);
            let mut remaining = rounds;
            let m = exploited.len();
            for (k, &arm) in exploited.iter().enumerate() {
                let share = if k + 1 == m {
                    remaining
                } else {
                    binomial(remaining, 1.0 / (m - k) as f64, &mut rng)
                };
                exploitation_pulls[arm] = share;
                remaining -= share;
            }
            1
        }
        Variant::FullB | Variant::EpoFiltered => {
            for &arm in &exploited {
                exploitation_pulls[arm] = rounds;
            }
            exploited.len()
        }
    };

    let exploitation_rewards = config.sample_exploitation.then(|| {
        (0..n)
            .map(|a| {
                let mut rng = rng::exploitation_stream(seed, a);
                instance
                    .mean(a)
                    .iter()
                    .map(|&p| binomial(exploitation_pulls[a], p, &mut rng))
                    .collect()
            })
            .collect()
    });

    Ok(RunResult {
        horizon: config.horizon,
        seed,
        variant: config.variant,
        t_prime,
        radius: committed.radius,
        survivors: committed.survivors,
        problem_fingerprint: format!("{:016x}", committed.problem.fingerprint()),
        cover,
        epo_members,
        exploited,
        schedule_summary: ScheduleSummary {
            exploration_rounds: t_prime,
            exploration_pulls: n as u64 * t_prime,
            exploitation_rounds: rounds,
            arms_per_round,
            exploitation_pulls,
        },
        empirical: committed.stats,
        exploitation_rewards,
        timings: Some(Timings {
            explore_s: committed.explore_s,
            cover_s,
            epo_s,
            total_s: start.elapsed().as_secs_f64(),
        }),
    })
}

/// Per-arm outcome of a Pareto-UCB1 run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcbTrace {
    pub horizon: u64,
    pub pulls: Vec<u64>,
    /// Rounds (after initialization) in which each arm was in the candidate set.
    pub candidate_rounds: Vec<u64>,
    pub selection_rounds: u64,
}

impl UcbTrace {
    pub fn pull_fraction(&self, arm: usize) -> f64 {
        self.pulls[arm] as f64 / self.horizon as f64
    }

    pub fn candidate_frequency(&self, arm: usize) -> f64 {
        if self.selection_rounds == 0 {
            0.0
        } else {
            self.candidate_rounds[arm] as f64 / self.selection_rounds as f64
        }
    }
}

/// Pareto-UCB1: one initial pull per arm, then each round a uniform pick among
/// the arms whose UCB vectors `mean + sqrt(2 ln(t (D n)^(1/4)) / pulls)` are
/// mutually non-dominated, where `t` counts the pulls made so far.
pub fn run_pareto_ucb1(instance: &Instance, horizon: u64, seed: u64) -> Result<UcbTrace> {
    let n = instance.n();
    let d = instance.d();
    if horizon < n as u64 {
        return Err(MomabError::InvalidConfig(format!(
            "Pareto-UCB1 needs T >= n (got T={horizon}, n={n})"
        )));
    }
    let mut rng = rng::ucb_stream(seed);
    let mut pulls = vec![0u64; n];
    let mut sums = vec![vec![0.0; d]; n];
    let mut candidate_rounds = vec![0u64; n];
    let record = |arm: usize, rng: &mut rng::StreamRng, pulls: &mut [u64], sums: &mut [Vec<f64>]| -> Result<()> {
        let out = instance.sample_pull(arm, rng)?;
        pulls[arm] += 1;
        for (s, r) in sums[arm].iter_mut().zip(out.reward.iter()) {
            *s += r;
        }
        Ok(())
    };
    for arm in 0..n {
        record(arm, &mut rng, &mut pulls, &mut sums)?;
    }
    let log_scale = ((d * n) as f64).powf(0.25);
    let mut ucb = vec![vec![0.0; d]; n];
    for t in n as u64..horizon {
        let log_term = (t as f64 * log_scale).ln();
        for a in 0..n {
            let bonus = (2.0 * log_term / pulls[a] as f64).sqrt();
            for k in 0..d {
                ucb[a][k] = sums[a][k] / pulls[a] as f64 + bonus;
            }
        }
        let candidates = pareto_front(&ucb)?.members;
        for &a in &candidates {
            candidate_rounds[a] += 1;
        }
        let arm = candidates[rng.random_range(0..candidates.len())];
        record(arm, &mut rng, &mut pulls, &mut sums)?;
    }
    Ok(UcbTrace {
        horizon,
        pulls,
        candidate_rounds,
        selection_rounds: horizon - n as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample() -> Instance {
        Instance::from_means(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    #[test]
    fn exploration_length_examples() {
        // (1000/10)^(2/3) = 21.5443, (2 ln 1000)^(1/3) = 2.4001, product 51.71.
        assert_eq!(compute_exploration_length(1000, 10).unwrap(), 52);
        let tp = compute_exploration_length(100_000_000, 100).unwrap();
        assert!((33_274..=33_276).contains(&tp), "{tp}");
        assert_eq!(compute_exploration_length(10, 9).unwrap(), 2);
        assert!(compute_exploration_length(5, 5).is_err());
        assert!(matches!(
            compute_exploration_length(2, 1),
            Err(MomabError::HorizonTooSmall { .. })
        ));
    }

    #[test]
    fn radius_examples() {
        assert!((confidence_radius(100_000_000, 92_103) - 0.02).abs() < 1e-4);
        let e2 = std::f64::consts::E.powi(2);
        assert!(((2.0 * e2.ln() / 4.0).sqrt() - 1.0).abs() < 1e-12);
        assert!((confidence_radius(100_000_000, 33_275) - 0.0333).abs() < 1e-4);
        let tp = calibrated_exploration_length(100_000_000, 0.02).unwrap();
        assert_eq!(tp, 92_104);
        assert!(confidence_radius(100_000_000, tp) <= 0.02);
        assert!(confidence_radius(100_000_000, tp - 1) > 0.02);
    }

    #[test]
    fn config_validation() {
        let mut c = AlgoConfig::new(100);
        c.exploration = ExplorationLength::Fixed(100);
        assert!(c.exploration_length(3).is_err());
        c.exploration = ExplorationLength::Fixed(0);
        assert!(c.exploration_length(3).is_err());
        c.exploration = ExplorationLength::Fixed(99);
        assert_eq!(c.exploration_length(3).unwrap(), 99);
        c.exploration = ExplorationLength::TargetRadius(0.02);
        assert!(c.exploration_length(3).is_err());
        c.exact_limit = 0;
        assert!(c.exploration_length(3).is_err());
    }

    #[test]
    fn explore_deterministic_arms() {
        let inst = counterexample();
        let stats = run_explore(&inst, 5, 1000, 1).unwrap();
        assert_eq!(stats.means().unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(stats.pulls, vec![5, 5, 5]);
        let inst = Instance::generate(10, 3, 4).unwrap();
        let stats = run_explore(&inst, 1, 1000, 1).unwrap();
        assert!(stats
            .means()
            .unwrap()
            .iter()
            .flatten()
            .all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn counterexample_commits_to_front() {
        let inst = counterexample();
        let mut c = AlgoConfig::new(10_000);
        let run = run_algorithm(&inst, &c, 3).unwrap();
        assert!(run.radius < 0.5);
        assert_eq!(run.cover.chosen, vec![0, 1]);
        assert_eq!(run.schedule_summary.exploitation_pulls[2], 0);
        assert_eq!(run.schedule_summary.exploitation_pulls[0], 10_000 - run.t_prime);
        c.cover_mode = CoverMode::Exact;
        assert_eq!(run_algorithm(&inst, &c, 3).unwrap().cover.chosen, vec![0, 1]);
    }

    #[test]
    fn pull_conservation_per_variant() {
        let inst = Instance::generate(30, 3, 17).unwrap();
        for variant in [Variant::FullB, Variant::EpoFiltered, Variant::SingleRandom] {
            let mut c = AlgoConfig::new(1_000_000);
            c.variant = variant;
            let run = run_algorithm(&inst, &c, 5).unwrap();
            let s = &run.schedule_summary;
            let expected = match variant {
                Variant::SingleRandom => 30 * run.t_prime + (c.horizon - run.t_prime),
                _ => 30 * run.t_prime + (c.horizon - run.t_prime) * run.exploited.len() as u64,
            };
            assert_eq!(s.total_pulls(), expected, "{variant:?}");
            assert!(run.cover.chosen.iter().all(|a| run.survivors.contains(a)));
            assert!(run.exploited.iter().all(|a| run.cover.chosen.contains(a)));
        }
    }

    #[test]
    fn prune_toggle_keeps_cover_feasible() {
        let inst = Instance::generate(25, 2, 8).unwrap();
        let mut c = AlgoConfig::new(1_000_000);
        c.prune = false;
        let committed = explore_and_build(&inst, &c, 2).unwrap();
        assert_eq!(committed.survivors.len(), 25);
        let sol = greedy_set_cover(&committed.problem).unwrap();
        assert!(committed.problem.is_cover(&sol.chosen));
    }

    #[test]
    fn run_is_reproducible() {
        let inst = Instance::generate(20, 2, 1).unwrap();
        let mut c = AlgoConfig::new(100_000);
        c.sample_exploitation = true;
        let mut a = run_algorithm(&inst, &c, 9).unwrap();
        let mut b = run_algorithm(&inst, &c, 9).unwrap();
        a.strip_timings();
        b.strip_timings();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn converges_on_deterministic_instances() {
        // Smallest positive coordinate gap is 0.25; formula radius at T=1e8 is ~0.05.
        let inst = Instance::from_means(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.75, 0.75],
            vec![0.5, 0.25],
            vec![0.0, 0.0],
        ])
        .unwrap();
        let mut c = AlgoConfig::new(100_000_000);
        c.cover_mode = CoverMode::Exact;
        let run = run_algorithm(&inst, &c, 0).unwrap();
        assert!(2.0 * run.radius < 0.25);
        assert_eq!(run.cover.chosen, pareto_front(inst.means()).unwrap().members);
    }

    #[test]
    fn ucb_edge_cases() {
        let one = Instance::from_means(vec![vec![0.3, 0.4]]).unwrap();
        let tr = run_pareto_ucb1(&one, 50, 1).unwrap();
        assert_eq!(tr.pulls, vec![50]);
        assert!(run_pareto_ucb1(&counterexample(), 2, 1).is_err());
        let tr = run_pareto_ucb1(&counterexample(), 3, 1).unwrap();
        assert_eq!(tr.pulls, vec![1, 1, 1]);
        assert_eq!(tr.selection_rounds, 0);
    }

    #[test]
    fn ucb_concentrates_on_dominant_arm() {
        let inst = Instance::from_means(vec![vec![1.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let tr = run_pareto_ucb1(&inst, 10_000, 4).unwrap();
        assert!(tr.pull_fraction(0) >= 0.9, "{:?}", tr.pulls);
    }
}

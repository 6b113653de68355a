use serde::{Deserialize, Serialize};

use super::{cell, flag, CsvTable};
use crate::error::{MomabError, Result};
use crate::instance::Instance;
use crate::momab::{run_algorithm, run_pareto_ucb1, AlgoConfig};
use crate::par::map_replications;

/// Index of the `(0, 0)` arm in the three-arm instance.
pub const DOMINATED_ARM: usize = 2;

pub fn counterexample_instance() -> Instance {
    Instance::from_means(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]])
        .expect("valid fixed instance")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSeed {
    pub seed: u64,
    pub ucb_pull_fraction: Vec<f64>,
    pub ucb_dominated_candidate_frequency: f64,
    /// `None` when the horizon is too short for an exploration phase.
    pub algo_pull_fraction: Option<Vec<f64>>,
    pub algo_cover: Option<Vec<usize>>,
    pub algo_dominated_exploitation_pulls: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub horizon: u64,
    pub per_seed: Vec<CounterexampleSeed>,
    pub ucb_mean_pull_fraction: Vec<f64>,
    pub ucb_mean_dominated_candidate_frequency: f64,
    pub algo_dominated_never_exploited: bool,
}

impl CounterexampleRecord {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new([
            "seed",
            "ucb_frac_0",
            "ucb_frac_1",
            "ucb_frac_2",
            "ucb_dominated_candidate_freq",
            "algo_frac_0",
            "algo_frac_1",
            "algo_frac_2",
            "algo_dominated_exploit_pulls",
            "algo_dominated_in_B",
        ]);
        for s in &self.per_seed {
            let mut row = vec![cell(s.seed)];
            row.extend(s.ucb_pull_fraction.iter().map(cell));
            row.push(cell(s.ucb_dominated_candidate_frequency));
            match &s.algo_pull_fraction {
                Some(f) => row.extend(f.iter().map(cell)),
                None => row.extend(std::iter::repeat_n(String::new(), 3)),
            }
            row.push(s.algo_dominated_exploitation_pulls.map(cell).unwrap_or_default());
            row.push(
                s.algo_cover
                    .as_ref()
                    .map(|b| flag(b.contains(&DOMINATED_ARM)))
                    .unwrap_or_default(),
            );
            t.push_row(row);
        }
        t
    }
}

fn one_seed(instance: &Instance, horizon: u64, seed: u64) -> Result<CounterexampleSeed> {
    let trace = run_pareto_ucb1(instance, horizon, seed)?;
    let n = instance.n();
    let algo = match run_algorithm(instance, &AlgoConfig::new(horizon), seed) {
        Ok(run) => Some(run),
        Err(MomabError::HorizonTooSmall { .. }) | Err(MomabError::InvalidConfig(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CounterexampleSeed {
        seed,
        ucb_pull_fraction: (0..n).map(|a| trace.pull_fraction(a)).collect(),
        ucb_dominated_candidate_frequency: trace.candidate_frequency(DOMINATED_ARM),
        algo_pull_fraction: algo.as_ref().map(|run| {
            (0..n)
                .map(|a| {
                    (run.empirical.pulls[a] + run.schedule_summary.exploitation_pulls[a]) as f64
                        / run.schedule_summary.total_pulls() as f64
                })
                .collect()
        }),
        algo_cover: algo.as_ref().map(|run| run.cover.chosen.clone()),
        algo_dominated_exploitation_pulls: algo
            .as_ref()
            .map(|run| run.schedule_summary.exploitation_pulls[DOMINATED_ARM]),
    })
}

/// Pareto-UCB1 and the greedy explore-then-commit algorithm on the
/// `[[1,0],[0,1],[0,0]]` instance, one run of each per seed.
pub fn run_counterexample(horizon: u64, seeds: &[u64]) -> Result<CounterexampleRecord> {
    if horizon < 3 {
        return Err(MomabError::InvalidConfig(format!(
            "counterexample needs T >= 3 (got {horizon})"
        )));
    }
    if seeds.is_empty() {
        return Err(MomabError::InvalidConfig("at least one seed is required".into()));
    }
    let instance = counterexample_instance();
    let per_seed = map_replications(seeds.len(), |i| one_seed(&instance, horizon, seeds[i]))?;
    let k = per_seed.len() as f64;
    let ucb_mean_pull_fraction = (0..instance.n())
        .map(|a| per_seed.iter().map(|s| s.ucb_pull_fraction[a]).sum::<f64>() / k)
        .collect();
    let ucb_mean_dominated_candidate_frequency =
        per_seed.iter().map(|s| s.ucb_dominated_candidate_frequency).sum::<f64>() / k;
    let algo_dominated_never_exploited = per_seed
        .iter()
        .all(|s| s.algo_dominated_exploitation_pulls.unwrap_or(0) == 0);
    Ok(CounterexampleRecord {
        horizon,
        per_seed,
        ucb_mean_pull_fraction,
        ucb_mean_dominated_candidate_frequency,
        algo_dominated_never_exploited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_horizon_runs() {
        let rec = run_counterexample(3, &[1, 2]).unwrap();
        for s in &rec.per_seed {
            assert_eq!(s.ucb_pull_fraction, vec![1.0 / 3.0; 3]);
        }
        assert!(run_counterexample(2, &[1]).is_err());
        assert!(run_counterexample(10, &[]).is_err());
    }

    #[test]
    fn algorithm_never_exploits_dominated_arm() {
        let rec = run_counterexample(2_000, &[0, 1, 2, 3]).unwrap();
        assert!(rec.algo_dominated_never_exploited);
        assert_eq!(rec.to_csv().rows.len(), 4);
    }
}

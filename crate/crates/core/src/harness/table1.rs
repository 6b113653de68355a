use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{cell, generated_at, opt_cell, write_to_dir, CsvTable, SweepConfig};
use crate::cover::{exact_set_cover, greedy_set_cover, CoverMode};
use crate::error::{MomabError, Result};
use crate::instance::Instance;
use crate::momab::{explore_and_build, AlgoConfig};
use crate::par::map_replications;
use crate::pareto::pareto_front;
use crate::rng::replication_seed;

/// One replication: both solvers on the same empirical cover problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Replication {
    pub rep: usize,
    pub seed: u64,
    pub t_prime: u64,
    pub radius: f64,
    pub universe: usize,
    pub true_po: usize,
    pub exact_b: Option<usize>,
    pub exact_time_s: Option<f64>,
    /// The universe exceeded the exact-cover limit.
    pub exact_refused: bool,
    pub greedy_b: Option<usize>,
    pub greedy_time_s: Option<f64>,
    /// Digest of the problem each solver received; equal by construction.
    pub exact_fingerprint: Option<u64>,
    pub greedy_fingerprint: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub replications: usize,
    pub avg_true_po: f64,
    /// Absent when any replication's universe exceeded the exact limit.
    pub exact_b: Option<f64>,
    pub exact_time_s: Option<f64>,
    pub greedy_b: Option<f64>,
    pub greedy_time_s: Option<f64>,
    pub exact_refused: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Output {
    pub rows: Vec<Table1Row>,
    pub replications: Vec<Vec<Table1Replication>>,
    pub csv_text: String,
    pub csv_path: Option<PathBuf>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

fn replicate(config: &SweepConfig, n: usize, d: usize, rep: usize) -> Result<Table1Replication> {
    let seed = replication_seed(config.base_seed, rep);
    let instance = Instance::generate(n, d, seed)?;
    let mut algo = AlgoConfig::new(config.horizon);
    algo.exploration = config.exploration;
    let committed = explore_and_build(&instance, &algo, seed)?;
    let true_po = pareto_front(instance.means())?.len();

    let mut out = Table1Replication {
        rep,
        seed,
        t_prime: committed.t_prime,
        radius: committed.radius,
        universe: committed.problem.len(),
        true_po,
        exact_b: None,
        exact_time_s: None,
        exact_refused: false,
        greedy_b: None,
        greedy_time_s: None,
        exact_fingerprint: None,
        greedy_fingerprint: None,
    };
    if config.cover_modes.contains(&CoverMode::Exact) {
        let problem = committed.problem.clone();
        match exact_set_cover(&problem, config.exact_limit) {
            Ok(sol) => {
                out.exact_b = Some(sol.chosen.len());
                out.exact_time_s = sol.elapsed;
                out.exact_fingerprint = Some(problem.fingerprint());
            }
            Err(MomabError::ExactLimitExceeded { .. }) => out.exact_refused = true,
            Err(e) => return Err(e),
        }
    }
    if config.cover_modes.contains(&CoverMode::Greedy) {
        let problem = committed.problem.clone();
        let sol = greedy_set_cover(&problem)?;
        out.greedy_b = Some(sol.chosen.len());
        out.greedy_time_s = sol.elapsed;
        out.greedy_fingerprint = Some(problem.fingerprint());
    }
    Ok(out)
}

fn aggregate(n: usize, d: usize, reps: &[Table1Replication]) -> Table1Row {
    let exact_refused = reps.iter().filter(|r| r.exact_refused).count();
    let all_exact = reps.iter().all(|r| r.exact_b.is_some());
    let all_greedy = reps.iter().all(|r| r.greedy_b.is_some());
    Table1Row {
        n,
        d,
        replications: reps.len(),
        avg_true_po: mean(reps.iter().map(|r| r.true_po as f64)),
        exact_b: all_exact.then(|| mean(reps.iter().filter_map(|r| r.exact_b).map(|b| b as f64))),
        exact_time_s: all_exact.then(|| mean(reps.iter().filter_map(|r| r.exact_time_s))),
        greedy_b: all_greedy.then(|| mean(reps.iter().filter_map(|r| r.greedy_b).map(|b| b as f64))),
        greedy_time_s: all_greedy.then(|| mean(reps.iter().filter_map(|r| r.greedy_time_s))),
        exact_refused,
    }
}

/// Runs every `(n, D)` cell of the grid. Within a replication the exact and
/// greedy solvers receive the same cover problem built from one exploration.
pub fn run_table1(config: &SweepConfig) -> Result<Table1Output> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut all_reps = Vec::new();
    for &n in &config.n_values {
        for &d in &config.d_values {
            let reps = map_replications(config.replications, |rep| replicate(config, n, d, rep))?;
            rows.push(aggregate(n, d, &reps));
            all_reps.push(reps);
        }
    }

    let mut table = CsvTable::new([
        "n",
        "D",
        "replications",
        "avg_true_po",
        "exact_B",
        "greedy_B",
        "exact_refused",
    ]);
    table.push_meta(generated_at());
    table.push_meta("timing,n,D,exact_time_s,greedy_time_s");
    for row in &rows {
        table.push_meta(format!(
            "timing,{},{},{},{}",
            row.n,
            row.d,
            opt_cell(row.exact_time_s),
            opt_cell(row.greedy_time_s)
        ));
    }
    for row in &rows {
        table.push_row(vec![
            cell(row.n),
            cell(row.d),
            cell(row.replications),
            cell(row.avg_true_po),
            opt_cell(row.exact_b),
            opt_cell(row.greedy_b),
            cell(row.exact_refused),
        ]);
    }
    let csv_path = write_to_dir(&table, config.output_dir.as_deref(), "table1.csv")?;
    Ok(Table1Output {
        rows,
        replications: all_reps,
        csv_text: table.render(),
        csv_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::csv_body;
    use crate::momab::ExplorationLength;

    fn small(n: usize, d: usize, reps: usize) -> SweepConfig {
        SweepConfig {
            n_values: vec![n],
            d_values: vec![d],
            horizon: 1_000_000,
            replications: reps,
            base_seed: 3,
            exploration: ExplorationLength::TargetRadius(0.05),
            ..SweepConfig::table1_default()
        }
    }

    #[test]
    fn single_arm_row() {
        let out = run_table1(&small(1, 1, 1)).unwrap();
        let row = &out.rows[0];
        assert_eq!(row.avg_true_po, 1.0);
        assert_eq!(row.exact_b, Some(1.0));
        assert_eq!(row.greedy_b, Some(1.0));
    }

    #[test]
    fn pairing_and_ordering_hold() {
        let out = run_table1(&small(30, 3, 4)).unwrap();
        for r in &out.replications[0] {
            assert_eq!(r.exact_fingerprint, r.greedy_fingerprint);
            assert!(r.greedy_b.unwrap() >= r.exact_b.unwrap());
        }
    }

    #[test]
    fn limit_marks_row_greedy_only() {
        let mut c = small(40, 5, 2);
        c.exact_limit = 1;
        let out = run_table1(&c).unwrap();
        assert_eq!(out.rows[0].exact_b, None);
        assert_eq!(out.rows[0].exact_refused, 2);
        assert!(out.rows[0].greedy_b.is_some());
    }

    #[test]
    fn csv_body_is_deterministic() {
        let a = run_table1(&small(20, 2, 3)).unwrap();
        let b = run_table1(&small(20, 2, 3)).unwrap();
        assert_eq!(csv_body(&a.csv_text), csv_body(&b.csv_text));
        assert!(csv_body(&a.csv_text).starts_with("n,D,replications,avg_true_po,exact_B,greedy_B"));
    }
}

use serde::{Deserialize, Serialize};

use super::{cell, CsvTable};
use crate::cover::CoverMode;
use crate::error::{MomabError, Result};
use crate::instance::Instance;
use crate::momab::{confidence_radius, run_algorithm, AlgoConfig, ExplorationLength};
use crate::par::map_replications;
use crate::regret::build_report;
use crate::rng::replication_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRequest {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub horizons: Vec<u64>,
    pub replications: usize,
    pub base_seed: u64,
    pub cover_mode: CoverMode,
    pub exploration: ExplorationLength,
    pub exact_limit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub horizon: u64,
    pub t_prime: u64,
    pub radius: f64,
    pub coverage_max: f64,
    pub adjustment_normalized: f64,
    /// `4 T sqrt(2 ln T / T')`.
    pub bound_envelope: f64,
    pub clean_fraction: f64,
    pub nonpositive_coverage_runs: usize,
}

impl SweepRow {
    pub const HEADER: [&'static str; 8] = [
        "T",
        "t_prime",
        "radius",
        "coverage_max",
        "adjustment_normalized",
        "bound_envelope",
        "clean_fraction",
        "nonpositive_coverage_runs",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            cell(self.horizon),
            cell(self.t_prime),
            cell(self.radius),
            cell(self.coverage_max),
            cell(self.adjustment_normalized),
            cell(self.bound_envelope),
            cell(self.clean_fraction),
            cell(self.nonpositive_coverage_runs),
        ]
    }
}

/// Mean regret metrics per horizon. Replication `k` uses the same instance
/// (seeded `base_seed + k`) at every horizon.
pub fn run_scaling_sweep(req: &ScalingRequest) -> Result<(Vec<SweepRow>, CsvTable)> {
    if req.horizons.is_empty() || req.replications == 0 {
        return Err(MomabError::InvalidConfig(
            "sweep needs at least one horizon and one replication".into(),
        ));
    }
    if req.horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MomabError::InvalidConfig("horizons must be strictly ascending".into()));
    }
    let instances = (0..req.replications)
        .map(|k| Instance::generate(req.n, req.d, replication_seed(req.base_seed, k)))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for &horizon in &req.horizons {
        let mut config = AlgoConfig::new(horizon);
        config.exploration = req.exploration;
        config.cover_mode = req.cover_mode;
        config.exact_limit = req.exact_limit;
        let t_prime = config.exploration_length(req.n)?;
        let reports = map_replications(req.replications, |k| {
            let seed = replication_seed(req.base_seed, k);
            let run = run_algorithm(&instances[k], &config, seed)?;
            build_report(&run, &instances[k])
        })?;
        let reps = reports.len() as f64;
        rows.push(SweepRow {
            horizon,
            t_prime,
            radius: confidence_radius(horizon, t_prime),
            coverage_max: reports.iter().map(|r| r.coverage_max).sum::<f64>() / reps,
            adjustment_normalized: reports.iter().map(|r| r.adjustment_normalized).sum::<f64>()
                / reps,
            bound_envelope: 4.0 * horizon as f64 * confidence_radius(horizon, t_prime),
            clean_fraction: reports.iter().filter(|r| r.clean_event).count() as f64 / reps,
            nonpositive_coverage_runs: reports.iter().filter(|r| r.coverage_max <= 0.0).count(),
        });
    }

    let mut table = CsvTable::new(SweepRow::HEADER);
    table.push_meta(format!(
        "n={},D={},replications={},base_seed={},cover={}",
        req.n, req.d, req.replications, req.base_seed, req.cover_mode
    ));
    for row in &rows {
        table.push_row(row.cells());
    }
    Ok((rows, table))
}

/// Least-squares slope of `ln y` on `ln x`; `None` unless every point is positive
/// and there are at least two distinct `x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

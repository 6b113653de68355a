use super::{cell, flag, CsvTable};
use crate::epo::epo_filter;
use crate::error::{MomabError, Result};
use crate::instance::Instance;
use crate::momab::RunResult;
use crate::pareto::pareto_front;

/// Per-arm scatter table: `arm_id, mean_1..mean_D, is_true_po, in_B, in_epo`.
///
/// `in_B` marks the arms the run exploited. `in_epo` marks members of the
/// convex-hull-undominated subset of the true Pareto front.
pub fn export_front_scatter(instance: &Instance, run: &RunResult) -> Result<CsvTable> {
    if run.empirical.n() != instance.n() {
        return Err(MomabError::DimensionMismatch {
            expected: instance.n(),
            got: run.empirical.n(),
        });
    }
    let d = instance.d();
    let front = pareto_front(instance.means())?;
    let epo = epo_filter(instance.means(), &front.members)?;

    let mut header = vec!["arm_id".to_string()];
    header.extend((1..=d).map(|k| format!("mean_{k}")));
    header.extend(["is_true_po", "in_B", "in_epo"].map(String::from));
    let mut table = CsvTable::new(header);
    table.push_meta(format!("n={},D={},seed={}", instance.n(), d, run.seed));
    if d != 2 {
        table.push_meta(format!("D={d}: a two-dimensional scatter shows only mean_1 and mean_2"));
    }
    for (arm, mean) in instance.means().iter().enumerate() {
        let mut row = vec![cell(arm)];
        row.extend(mean.0.iter().map(cell));
        row.push(flag(front.contains(arm)));
        row.push(flag(run.exploited.contains(&arm)));
        row.push(flag(epo.members.contains(&arm)));
        table.push_row(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momab::{run_algorithm, AlgoConfig};

    #[test]
    fn scatter_columns_and_flags() {
        let inst = Instance::from_means(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.4, 0.4],
            vec![0.1, 0.1],
        ])
        .unwrap();
        let run = run_algorithm(&inst, &AlgoConfig::new(200_000), 5).unwrap();
        let t = export_front_scatter(&inst, &run).unwrap();
        assert_eq!(t.header, ["arm_id", "mean_1", "mean_2", "is_true_po", "in_B", "in_epo"]);
        let po = t.column("is_true_po").unwrap();
        let epo = t.column("in_epo").unwrap();
        let flags: Vec<(&str, &str)> = t.rows.iter().map(|r| (r[po].as_str(), r[epo].as_str())).collect();
        assert_eq!(flags, [("1", "1"), ("1", "1"), ("1", "0"), ("0", "0")]);
        assert_eq!(t.meta.len(), 1);
    }

    #[test]
    fn higher_dimension_gets_a_note() {
        let inst = Instance::generate(8, 3, 2).unwrap();
        let run = run_algorithm(&inst, &AlgoConfig::new(100_000), 2).unwrap();
        let t = export_front_scatter(&inst, &run).unwrap();
        assert_eq!(t.header.len(), 1 + 3 + 3);
        assert_eq!(t.meta.len(), 2);
    }
}

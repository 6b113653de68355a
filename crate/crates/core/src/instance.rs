//! Problem instances and the Bernoulli reward environment.

use std::ops::Index;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{MomabError, Result};
use crate::rng;

/// A point in objective space, one coordinate per objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardVector(pub Vec<f64>);

impl RewardVector {
    pub fn new(values: Vec<f64>) -> Self {
        RewardVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl Index<usize> for RewardVector {
    type Output = f64;

    fn index(&self, d: usize) -> &f64 {
        &self.0[d]
    }
}

impl From<Vec<f64>> for RewardVector {
    fn from(values: Vec<f64>) -> Self {
        RewardVector(values)
    }
}

impl AsRef<[f64]> for RewardVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// True Bernoulli means of `n` arms over `D` objectives.
///
/// Immutable once built; shared freely across worker threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    n: usize,
    #[serde(rename = "D")]
    d: usize,
    seed: u64,
    means: Vec<RewardVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PullOutcome {
    pub arm: usize,
    pub reward: RewardVector,
}

impl Instance {
    /// Draws every mean i.i.d. uniform on `[0, 1]` from the instance stream of `seed`.
    pub fn generate(n: usize, d: usize, seed: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(MomabError::InvalidConfig(format!(
                "instance needs n >= 1 and D >= 1 (got n={n}, D={d})"
            )));
        }
        let mut rng = rng::instance_stream(seed);
        let means = (0..n)
            .map(|_| RewardVector((0..d).map(|_| rng.random::<f64>()).collect()))
            .collect();
        Ok(Instance { n, d, seed, means })
    }

    /// Builds an instance with exactly the given means (seed recorded as 0).
    pub fn from_means(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().ok_or(MomabError::Empty("means matrix"))?.len();
        if d == 0 {
            return Err(MomabError::Empty("objective vector"));
        }
        for (arm, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(MomabError::RaggedRow {
                    row: arm,
                    expected: d,
                    got: row.len(),
                });
            }
            for (dim, &value) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(MomabError::MeanOutOfRange { arm, dim, value });
                }
            }
        }
        Ok(Instance {
            n: rows.len(),
            d,
            seed: 0,
            means: rows.into_iter().map(RewardVector).collect(),
        })
    }

    /// Parses the JSON form `{n, D, seed, means}` and re-validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Instance = serde_json::from_str(text)?;
        let mut checked = Instance::from_means(raw.means.into_iter().map(|m| m.0).collect())?;
        if checked.n != raw.n || checked.d != raw.d {
            return Err(MomabError::Inconsistent(format!(
                "header says n={}, D={} but means are {}x{}",
                raw.n, raw.d, checked.n, checked.d
            )));
        }
        checked.seed = raw.seed;
        Ok(checked)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn means(&self) -> &[RewardVector] {
        &self.means
    }

    pub fn mean(&self, arm: usize) -> &RewardVector {
        &self.means[arm]
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.n {
            Err(MomabError::ArmOutOfRange { arm, n: self.n })
        } else {
            Ok(())
        }
    }

    /// One pull: an independent Bernoulli draw per objective.
    pub fn sample_pull<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<PullOutcome> {
        self.check_arm(arm)?;
        let reward = self.means[arm]
            .iter()
            .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
            .collect();
        Ok(PullOutcome {
            arm,
            reward: RewardVector(reward),
        })
    }

    /// Per-objective success counts of `count` pulls of `arm`, each Binomial(count, mean).
    pub fn sample_pull_batch<R: Rng + ?Sized>(
        &self,
        arm: usize,
        count: u64,
        rng: &mut R,
    ) -> Result<Vec<u64>> {
        self.check_arm(arm)?;
        if count == 0 {
            return Err(MomabError::InvalidConfig("batch count must be >= 1".into()));
        }
        Ok(self.means[arm]
            .iter()
            .map(|&p| binomial(count, p, rng))
            .collect())
    }
}

pub(crate) fn binomial<R: Rng + ?Sized>(count: u64, p: f64, rng: &mut R) -> u64 {
    if count == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        count
    } else {
        Binomial::new(count, p)
            .expect("p in (0, 1)")
            .sample(rng)
    }
}

//! Replication fan-out.
//!
//! With the `parallel` feature (default) replications run on the rayon pool;
//! without it they run in a plain loop. Either way results come back in
//! replication-index order, so aggregates do not depend on scheduling.

use crate::error::{MomabError, Result};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "MOMAB_THREADS";

pub fn map_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Runs `f(0..count)` and collects in index order, failing on the first error by index.
pub fn map_replications<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let out = map_parallel(count, f);
    #[cfg(not(feature = "parallel"))]
    let out = map_sequential(count, f);
    out.into_iter().collect()
}

/// Sizes the global pool from `MOMAB_THREADS`, if set. Call once, before any work.
pub fn configure_threads_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| MomabError::InvalidConfig(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| MomabError::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(Some(threads))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let out = map_replications(100, |i| Ok(i * i)).unwrap();
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
        assert_eq!(map_sequential(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn first_error_by_index_wins() {
        let err = map_replications(10, |i| {
            if i >= 3 {
                Err(MomabError::InvalidConfig(format!("rep {i}")))
            } else {
                Ok(i)
            }
        })
        .unwrap_err();
        assert_eq!(err.to_string(), "invalid configuration: rep 3");
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let f = |i: usize| (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        assert_eq!(map_parallel(1000, f), map_sequential(1000, f));
    }
}

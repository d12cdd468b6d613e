//! Order-preserving batch execution.

use crate::error::{Error, Result};

/// How a batch of independent jobs is run. Output order always matches input
/// order, so results do not depend on the choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// A bounded pool of `jobs` workers. Without the `parallel` feature this
    /// runs sequentially.
    Parallel { jobs: usize },
}

impl Execution {
    /// `jobs <= 1` selects the sequential path.
    pub fn with_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { jobs }
        }
    }

    pub fn jobs(self) -> usize {
        match self {
            Execution::Sequential => 1,
            Execution::Parallel { jobs } => jobs,
        }
    }

    /// Applies `f` to every item and returns the results in input order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => Ok(items.iter().map(f).collect()),
            Execution::Parallel { jobs } => parallel_map(jobs, items, f),
        }
    }
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel {
                jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            }
        } else {
            Execution::Sequential
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Argument(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> R,
{
    if jobs == 0 {
        return Err(Error::Argument("zero workers requested".into()));
    }
    Ok(items.iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..500).collect();
        let seq = Execution::Sequential.map(&items, |x| x * x).unwrap();
        let par = Execution::with_jobs(8).map(&items, |x| x * x).unwrap();
        assert_eq!(seq, par);
        assert_eq!(par[499], 499 * 499);
    }

    #[test]
    fn one_job_is_sequential() {
        assert_eq!(Execution::with_jobs(1), Execution::Sequential);
        assert_eq!(Execution::with_jobs(0).jobs(), 1);
    }
}

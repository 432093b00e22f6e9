//! Per-frequency parallel maps.
//!
//! Every task is a pure function of its index and writes to its own output slot, so results do
//! not depend on the thread count or on scheduling.

use rayon::prelude::*;

use crate::error::CliError;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `threads = None` uses every available core; `Some(1)` runs serially.
    pub fn new(threads: Option<usize>) -> Result<Self, CliError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        let pool = b
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), …, f(n − 1)` in index order; the first error by index is returned.
    pub fn map<T, E, F>(&self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync,
    {
        self.pool.install(|| {
            let results: Vec<Result<T, E>> = (0..n).into_par_iter().map(&f).collect();
            results.into_iter().collect()
        })
    }
}

use std::sync::Arc;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Worker budget handed down from the runner.
///
/// A single worker runs everything inline on the calling thread. With more
/// workers, independent units go through a dedicated pool of exactly that
/// many threads; results always come back in unit order.
#[derive(Clone, Default)]
pub struct Workers {
    pool: Option<Arc<ThreadPool>>,
}

impl Workers {
    pub fn sequential() -> Self {
        Workers { pool: None }
    }

    pub fn new(count: usize) -> Result<Self> {
        match count {
            0 => Err(Error::Config("workers must be at least 1".into())),
            1 => Ok(Workers::sequential()),
            n => {
                let pool = ThreadPoolBuilder::new()
                    .num_threads(n)
                    .thread_name(|i| format!("sdtree-worker-{i}"))
                    .build()
                    .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
                Ok(Workers { pool: Some(Arc::new(pool)) })
            }
        }
    }

    pub fn count(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub fn map<T, R, F>(&self, units: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match &self.pool {
            None => units.iter().map(f).collect(),
            Some(pool) => pool.install(|| units.par_iter().map(f).collect()),
        }
    }
}

impl std::fmt::Debug for Workers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workers").field("count", &self.count()).finish()
    }
}

/// Splits `len` elements into `parts` contiguous ranges of near equal size.
pub(crate) fn partition_ranges(len: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.max(1);
    let base = len / parts;
    let extra = len % parts;
    let mut start = 0;
    (0..parts)
        .map(|p| {
            let size = base + usize::from(p < extra);
            let r = start..start + size;
            start += size;
            r
        })
        .collect()
}

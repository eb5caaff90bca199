//! Order-preserving map over sample indices, parallel when the `parallel`
//! feature is on.

use std::ops::Range;

/// Maps `f` over `range` in order on the current thread.
pub fn map_sequential<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    range.map(f).collect()
}

/// Maps `f` over `range` on the rayon pool; output order follows `range`.
#[cfg(feature = "parallel")]
pub fn map_parallel<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

/// Parallel map when available, sequential otherwise.
pub fn map<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(range, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(range, f)
    }
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Runs `op` with at most `workers` threads (`None`: rayon's default).
pub fn with_workers<R: Send>(workers: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(w) = workers {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            return pool.install(op);
        }
    }
    let _ = workers;
    op()
}

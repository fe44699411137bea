//! Data-parallel helpers. With the `parallel` feature (the default) these fan
//! out over rayon's pool; without it they run sequentially. Output order is
//! always input order, so results never depend on the worker count.

use crate::error::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `f(0), f(1), ..., f(len - 1)` collected in order.
#[cfg(feature = "parallel")]
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Applies `f` to every item, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Sizes the global worker pool. `0` keeps the default (one per core).
/// Must be called before any parallel work; a no-op in sequential builds.
pub fn set_jobs(jobs: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| {
                crate::error::Error::InvalidConfig(format!("cannot size worker pool: {e}"))
            })?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    Ok(())
}

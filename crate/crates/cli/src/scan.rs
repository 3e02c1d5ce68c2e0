//! Parallel evaluation of grid cells with results in grid order.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::{usage, CliError};

/// Thread pool with `workers` threads, or one per available core.
pub fn pool(workers: Option<usize>) -> Result<ThreadPool, CliError> {
    let workers = match workers {
        Some(0) => return usage("--workers must be at least 1"),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

/// `f` applied to every cell on `pool`; the output follows the order of `cells`.
pub fn ordered<T, R, F>(pool: &ThreadPool, cells: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    pool.install(|| cells.par_iter().map(f).collect())
}

/// `steps` equally spaced values from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return usage("--steps must be at least 1");
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return usage(format!("empty range [{lo}, {hi}]"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / last).collect())
}

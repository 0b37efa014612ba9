//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the current rayon pool; without it the same closures run sequentially.
//! Results are always combined in index order, so outputs do not depend on
//! how the work was split.

use std::ops::Range;

/// Maps every index of `range` and returns the results in index order.
pub fn map_collect<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

/// Folds each index into a per-chunk accumulator and merges the chunk
/// accumulators left to right. `merge` should be associative.
pub fn fold_chunks<A, I, F, M>(range: Range<u64>, chunk: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) + Sync + Send,
    M: Fn(A, A) -> A,
{
    let chunk = chunk.max(1);
    let len = range.end.saturating_sub(range.start);
    let chunks = len.div_ceil(chunk);
    let start = range.start;
    let end = range.end;
    let parts = map_collect(0..chunks, |c| {
        let mut acc = init();
        let lo = start + c * chunk;
        let hi = (lo + chunk).min(end);
        for i in lo..hi {
            fold(&mut acc, i);
        }
        acc
    });
    parts.into_iter().fold(init(), merge)
}

/// Number of worker threads the current pool would use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` inside a dedicated pool of `threads` workers (sequentially when
/// the `parallel` feature is off or `threads <= 1`).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

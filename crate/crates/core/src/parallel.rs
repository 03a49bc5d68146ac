use std::ops::Range;

/// How element, facet and sweep loops are scheduled.
///
/// Work is always split into the same fixed-size chunks and the per-chunk
/// results are concatenated in chunk order, so both modes produce identical
/// output. Without the `parallel` feature `Parallel` runs sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

pub(crate) const CHUNK: usize = 256;

/// Runs `f` on consecutive index chunks of `0..n` and concatenates the results.
pub(crate) fn map_chunks<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> Vec<T> + Sync + Send,
{
    let chunks: Vec<Range<usize>> = (0..n.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(n))
        .collect();
    let parts: Vec<Vec<T>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            chunks.into_par_iter().map(&f).collect()
        }
        _ => chunks.into_iter().map(&f).collect(),
    };
    parts.into_iter().flatten().collect()
}

/// Maps independent jobs, keeping the input order in the output.
pub(crate) fn map_jobs<J, T, F>(jobs: Vec<J>, exec: Execution, f: F) -> Vec<T>
where
    J: Send,
    T: Send,
    F: Fn(J) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.into_par_iter().map(f).collect()
        }
        _ => jobs.into_iter().map(f).collect(),
    }
}

//! Thin dispatch between rayon and sequential execution.
//!
//! With the `parallel` feature disabled the crate compiles without rayon and
//! every call falls back to the sequential loop. Results are returned in
//! node order either way, and all reductions downstream use a fixed pairwise
//! summation tree, so outputs do not depend on thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn try_map_indexed<T, E, F>(n: usize, parallel: bool, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

pub(crate) fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

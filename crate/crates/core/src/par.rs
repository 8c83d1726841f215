//! Feature-gated data-parallel map.
//!
//! With the `parallel` feature (default) batches run on the rayon pool; the
//! sequential form is always compiled and is the fallback without the
//! feature. Both produce identical output vectors: work items are
//! independent, each owns its RNG stream, and results are collected in
//! index order, so thread scheduling can never change a result.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
pub(crate) fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential map over `0..n`, always available; the reference path for the
/// parallel/sequential comparison benches and determinism tests.
pub(crate) fn map_indexed_seq<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..n).map(f).collect()
}

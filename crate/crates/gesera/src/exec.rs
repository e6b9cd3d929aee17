//! Data-parallel loop execution with a sequential fallback.
//!
//! Every batch loop in the crate funnels through [`map_collect`] so the
//! `parallel` feature can be swapped in and out at a single point. Results
//! are collected in input order, which keeps both execution paths
//! byte-identical downstream.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving input order in the output.
///
/// Runs on the rayon thread pool when `parallel` is true and the crate was
/// built with the `parallel` feature; otherwise runs sequentially.
pub(crate) fn map_collect<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items.par_iter().map(&f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_input_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_collect(&items, false, |x| x * x);
        let par = map_collect(&items, true, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[3], 9);
    }
}

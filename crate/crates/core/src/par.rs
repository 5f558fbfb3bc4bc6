use alloc::vec::Vec;

/// Evaluates `f` for every row index, in parallel when the `parallel`
/// feature is on. Output order is always row order.
pub(crate) fn map_rows<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the map runs on the rayon pool when the caller
//! asks for it; otherwise, or when `parallel == false`, it runs sequentially.
//! Output order always matches input order, so reductions performed by the
//! caller over the returned vector are deterministic either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indexed<R, F>(n: usize, parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && n > 1 {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Map `f` over a slice, collecting results in slice order.
pub fn map_slice<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_indexed(items.len(), parallel, |i| f(&items[i]))
}

/// True when this build can actually run work concurrently.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_both_ways() {
        let seq = map_indexed(100, false, |i| i * i);
        let par = map_indexed(100, true, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }
}

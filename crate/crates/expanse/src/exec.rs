//! Batch execution strategy.
//!
//! Every hot loop in the crate funnels through [`map_batch`], which fans out
//! across threads when the `parallel` feature is enabled (the default) and
//! degrades to a plain sequential map otherwise.  [`map_batch_seq`] is always
//! sequential; the benchmark suite uses it as the baseline for comparing the
//! two strategies on identical inputs.  Results preserve input order, so
//! callers are deterministic under either strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, in parallel when the `parallel` feature is on.
pub fn map_batch<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Sequential reference implementation with the same contract as
/// [`map_batch`].
pub fn map_batch_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let par = map_batch(xs.clone(), |x| x * x);
        let seq = map_batch_seq(xs, |x| x * x);
        assert_eq!(par, seq);
        assert_eq!(par[17], 289);
    }
}

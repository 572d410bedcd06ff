//! Data-parallel ensemble execution with a sequential fallback.
//!
//! With the default `parallel` feature, indexed maps run on rayon; without it
//! they run as plain iterators. Results are collected in index order either
//! way, and all randomness is keyed by index, so both paths are bit-identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n` and collect in index order.
#[cfg(feature = "parallel")]
pub fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Run `f` under a bounded rayon pool. `budget = 0` keeps the global default.
/// Without the `parallel` feature the budget is ignored and `f` runs inline.
#[cfg(feature = "parallel")]
pub fn with_thread_budget<R: Send>(budget: usize, f: impl FnOnce() -> R + Send) -> R {
    if budget == 0 {
        f()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(budget)
            .build()
            .expect("thread pool construction");
        pool.install(f)
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_thread_budget<R>(_budget: usize, f: impl FnOnce() -> R) -> R {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_index_order() {
        let v = par_map(100, |i| i * i);
        assert_eq!(v[7], 49);
        assert_eq!(v.len(), 100);
    }

    #[test]
    fn budget_one_matches_default() {
        let a = with_thread_budget(1, || par_map(50, |i| (i as f64).sin()));
        let b = with_thread_budget(0, || par_map(50, |i| (i as f64).sin()));
        assert_eq!(a, b);
    }
}

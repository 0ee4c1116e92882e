//! Data-parallel fan-out with a sequential fallback.
//!
//! Restart batches and oracle grid cells are embarrassingly parallel; results
//! are combined by a total order (value, then smallest index) so the outcome
//! is independent of the schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether a fan-out runs on the rayon pool or on the calling thread.
/// `Parallel` silently degrades to sequential when the `parallel` feature
/// is disabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Parallel,
    Sequential,
}

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism::Parallel
    }
}

/// Cap the global rayon pool. No-op when `n` is `None`, the pool was already
/// initialized, or the crate was built without the `parallel` feature.
pub fn init_thread_cap(n: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

/// Map `f` over `0..n`, collecting in index order.
pub fn map_indexed<U, F>(mode: Parallelism, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Parallelism::Parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Argmax of `eval` over `0..n`; ties go to the smallest index.
pub fn max_indexed<F>(mode: Parallelism, n: usize, eval: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let better = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if mode == Parallelism::Parallel {
        return (0..n)
            .into_par_iter()
            .map(|i| (i, eval(i)))
            .reduce_with(|a, b| better(a, b));
    }
    let _ = mode;
    (0..n).map(|i| (i, eval(i))).reduce(|a, b| better(a, b))
}

/// The `k` largest values of `eval` over `0..n`, sorted by descending value
/// with ties to the smallest index. Schedule-independent.
pub fn top_k_indexed<F>(mode: Parallelism, n: usize, k: usize, eval: F) -> Vec<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fn push(acc: &mut Vec<(usize, f64)>, item: (usize, f64), k: usize) {
        if acc.len() == k {
            // hot path: reject anything not beating the current worst
            let worst = acc[k - 1];
            if item.1 < worst.1 || (item.1 == worst.1 && item.0 > worst.0) {
                return;
            }
        }
        acc.push(item);
        acc.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        acc.truncate(k);
    }
    fn merge(mut a: Vec<(usize, f64)>, b: Vec<(usize, f64)>, k: usize) -> Vec<(usize, f64)> {
        for item in b {
            push(&mut a, item, k);
        }
        a
    }
    if k == 0 {
        return Vec::new();
    }
    #[cfg(feature = "parallel")]
    if mode == Parallelism::Parallel {
        return (0..n)
            .into_par_iter()
            .fold(Vec::new, |mut acc, i| {
                push(&mut acc, (i, eval(i)), k);
                acc
            })
            .reduce(Vec::new, |a, b| merge(a, b, k));
    }
    let _ = mode;
    let mut acc = Vec::new();
    for i in 0..n {
        push(&mut acc, (i, eval(i)), k);
    }
    acc
}

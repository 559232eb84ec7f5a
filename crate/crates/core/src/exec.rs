//! Data-parallel helpers with a sequential fallback.
//!
//! Every exhaustive sweep in the crate goes through these functions so that
//! the `parallel` feature (rayon) can be switched off without touching call
//! sites. Results never depend on the execution mode: reductions use a total
//! order on keys and "first" searches respect index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a sweep should be executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise falls back
    /// to sequential execution.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Minimum of `f` over `0..n`, skipping `None`. Ties on the key are resolved
/// towards the smaller index, so the answer is identical in both modes.
pub fn min_over_range<K, T, F>(exec: Exec, n: u64, f: F) -> Option<(K, T)>
where
    K: Ord + Send,
    T: Send,
    F: Fn(u64) -> Option<(K, T)> + Sync + Send,
{
    let keyed = |i: u64| f(i).map(|(k, t)| ((k, i), t));
    let best = if exec.is_parallel() {
        par_min(n, &keyed)
    } else {
        (0..n).filter_map(keyed).min_by(|a, b| a.0.cmp(&b.0))
    };
    best.map(|((k, _), t)| (k, t))
}

#[cfg(feature = "parallel")]
fn par_min<K, T, F>(n: u64, f: &F) -> Option<((K, u64), T)>
where
    K: Ord + Send,
    T: Send,
    F: Fn(u64) -> Option<((K, u64), T)> + Sync + Send,
{
    (0..n).into_par_iter().filter_map(f).min_by(|a, b| a.0.cmp(&b.0))
}

#[cfg(not(feature = "parallel"))]
fn par_min<K, T, F>(n: u64, f: &F) -> Option<((K, u64), T)>
where
    K: Ord + Send,
    T: Send,
    F: Fn(u64) -> Option<((K, u64), T)> + Sync + Send,
{
    (0..n).filter_map(f).min_by(|a, b| a.0.cmp(&b.0))
}

/// First (lowest index) `i` in `0..n` for which `f` returns `Some`.
pub fn find_first<T, F>(exec: Exec, n: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().find_map_first(f);
    }
    let _ = exec;
    (0..n).find_map(f)
}

/// Order-preserving map over a slice.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_ties_resolve_to_lowest_index() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let got = min_over_range(exec, 100, |i| Some((i % 7, i)));
            assert_eq!(got, Some((0, 0)));
            let got = min_over_range(exec, 100, |i| (i > 50).then_some((i % 7, i)));
            assert_eq!(got, Some((0, 56)));
        }
    }

    #[test]
    fn find_first_is_ordered() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(find_first(exec, 1000, |i| (i % 97 == 96).then_some(i)), Some(96));
            assert_eq!(find_first(exec, 10, |_| None::<u64>), None);
        }
    }

    #[test]
    fn map_preserves_order() {
        let v: Vec<u32> = (0..64).collect();
        assert_eq!(map_slice(Exec::Parallel, &v, |x| x * 2), map_slice(Exec::Sequential, &v, |x| x * 2));
    }
}

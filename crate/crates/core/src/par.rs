//! Ordered fan-out over independent samples.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it the same functions run sequentially. Either way results come
//! back in input order and `first_failure` reports the lowest failing index,
//! so verdicts do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Index and payload of the first item (in input order) for which `f`
/// returns `Some`.
#[cfg(feature = "parallel")]
pub fn first_failure<T, W, F>(items: &[T], f: F) -> Option<(usize, W)>
where
    T: Sync,
    W: Send,
    F: Fn(&T) -> Option<W> + Sync + Send,
{
    items
        .par_iter()
        .enumerate()
        .find_map_first(|(i, t)| f(t).map(|w| (i, w)))
}

#[cfg(not(feature = "parallel"))]
pub fn first_failure<T, W, F>(items: &[T], f: F) -> Option<(usize, W)>
where
    T: Sync,
    W: Send,
    F: Fn(&T) -> Option<W> + Sync + Send,
{
    items.iter().enumerate().find_map(|(i, t)| f(t).map(|w| (i, w)))
}

/// Whether this build fans out over rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        assert_eq!(map(&xs, |x| x * 2), xs.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(first_failure(&xs, |&x| (x % 97 == 96).then_some(x)), Some((96, 96)));
        assert_eq!(first_failure(&xs, |_| None::<()>), None);
    }
}

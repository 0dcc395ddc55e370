//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) these dispatch to rayon;
//! without it they are plain iterator loops. Results are always returned in
//! input order, so output is identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
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
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Fallible ordered map; on failure returns the error of the earliest
/// failing item.
#[cfg(feature = "parallel")]
pub fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    let results: Vec<Result<R, E>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    F: Fn(&T) -> Result<R, E>,
{
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// The first (lowest-index) `Some` produced by `f` over `0..n`.
#[cfg(feature = "parallel")]
pub fn find_first<R, F>(n: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    (0..n).into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub fn find_first<R, F>(n: usize, f: F) -> Option<R>
where
    F: Fn(usize) -> Option<R>,
{
    (0..n).find_map(f)
}

/// Whether the library was built with rayon enabled.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u32> = (0..1000).collect();
        assert_eq!(map(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(map_range(5, |i| i), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn earliest_hit_wins() {
        assert_eq!(find_first(100, |i| (i % 7 == 3).then_some(i)), Some(3));
        let r: Result<Vec<u32>, u32> = try_map(&[1u32, 2, 3, 4], |&x| if x >= 3 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(3));
    }
}

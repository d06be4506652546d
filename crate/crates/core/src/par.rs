//! Data-parallel helpers. With the `parallel` feature these dispatch to the
//! rayon pool; without it they run the same closures sequentially. Output
//! order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items a parallel split costs more than it saves.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 64;

/// Applies `f` to every element with its index, collecting results in order.
#[cfg(feature = "parallel")]
pub fn map_mut<T, U, F>(items: &mut [T], f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(usize, &mut T) -> U + Sync + Send,
{
    items
        .par_iter_mut()
        .with_min_len(MIN_CHUNK)
        .enumerate()
        .map(|(i, x)| f(i, x))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_mut<T, U, F>(items: &mut [T], f: F) -> Vec<U>
where
    F: Fn(usize, &mut T) -> U,
{
    items.iter_mut().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    items.par_iter().with_min_len(MIN_CHUNK).enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(usize, &T) -> U,
{
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Coarse-grained variant of [`map_mut`] for a handful of heavy items
/// (populations, independent runs): no minimum chunk size.
#[cfg(feature = "parallel")]
pub fn map_each_mut<T, U, F>(items: &mut [T], f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(usize, &mut T) -> U + Sync + Send,
{
    items.par_iter_mut().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_each_mut<T, U, F>(items: &mut [T], f: F) -> Vec<U>
where
    F: Fn(usize, &mut T) -> U,
{
    map_mut(items, f)
}

/// Runs `f(i)` for `i in 0..n`, one task per index.
#[cfg(feature = "parallel")]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Runs `f` on a dedicated pool of `workers` threads (`None` uses the
/// global pool). Sequential builds ignore the worker count.
#[cfg(feature = "parallel")]
pub fn install<R, F>(workers: Option<usize>, f: F) -> Result<R, String>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| e.to_string())?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn install<R, F>(_workers: Option<usize>, f: F) -> Result<R, String>
where
    F: FnOnce() -> R,
{
    Ok(f())
}

/// Worker threads the current context would use.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let mut xs: Vec<u64> = (0..1000).collect();
        let out = map_mut(&mut xs, |i, x| {
            *x += 1;
            i as u64 * 2
        });
        assert_eq!(out, (0..1000).map(|i| i * 2).collect::<Vec<_>>());
        assert_eq!(xs[999], 1000);
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }

    #[test]
    fn install_runs_closure() {
        assert_eq!(install(Some(2), || 7).unwrap(), 7);
        assert!(current_workers() >= 1);
    }
}

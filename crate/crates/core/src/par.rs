//! Order-preserving batch evaluation.
//!
//! With the `parallel` feature (on by default) batches run on the rayon
//! global pool; without it every mode degrades to a plain sequential map.
//! Output order always matches input order, so results never depend on
//! scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether `Parallel` actually fans out in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn map_with<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// `map_with(ExecMode::Parallel, ..)`.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_with(ExecMode::Parallel, items, f)
}

/// Maps over `0..count`.
pub fn map_range<R, F>(mode: ExecMode, count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    let idx: Vec<usize> = (0..count).collect();
    map_with(mode, &idx, |&i| f(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map_with(ExecMode::Sequential, &xs, |x| x * x);
        let b = map_with(ExecMode::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
        assert_eq!(map_range(ExecMode::Parallel, 3, |i| i + 1), vec![1, 2, 3]);
    }
}

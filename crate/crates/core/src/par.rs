//! Data-parallel helpers. With the `parallel` feature the work is spread over the rayon
//! pool; without it, or with [`Execution::Sequential`], it runs on the calling thread.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `items.iter().map(f).collect()`, order preserved.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Sum of `f(i)` over the range.
pub fn sum<F>(exec: Execution, range: Range<u64>, f: F) -> u128
where
    F: Fn(u64) -> u128 + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => range.into_par_iter().map(f).sum(),
        _ => range.map(f).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let items: Vec<u64> = (0..100).collect();
        let a = map(Execution::Sequential, &items, |x| x * x);
        let b = map(Execution::Parallel, &items, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            sum(Execution::Sequential, 0..1000, |i| i as u128),
            sum(Execution::Parallel, 0..1000, |i| i as u128)
        );
    }
}

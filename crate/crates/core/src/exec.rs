//! Data-parallel fan-out with a sequential fallback.
//!
//! Every parallel site in this crate maps independent work items and
//! collects results in input index order, so the output is bit-identical
//! whichever mode runs. With the `parallel` feature disabled,
//! [`ExecMode::Parallel`] silently degrades to the sequential path.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl ExecMode {
    /// Parallel when compiled in, sequential otherwise.
    pub fn auto() -> ExecMode {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving index order in the output.
pub fn map_indexed<T, U, F>(items: &[T], mode: ExecMode, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..count`, preserving index order.
pub fn map_index_range<U, F>(count: usize, mode: ExecMode, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let items: Vec<f64> = (0..1000).map(|i| i as f64 * 0.37).collect();
        let f = |x: &f64| (x.sin() * x.exp_m1()).to_bits();
        let seq = map_indexed(&items, ExecMode::Sequential, f);
        let par = map_indexed(&items, ExecMode::Parallel, f);
        assert_eq!(seq, par);
    }

    #[test]
    fn range_map_is_ordered() {
        let out = map_index_range(100, ExecMode::Parallel, |i| i * 2);
        assert_eq!(out, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }
}

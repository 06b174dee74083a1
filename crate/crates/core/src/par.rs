//! Execution strategy for the data-parallel loops (σ-sums and Monte-Carlo batches).
//!
//! With the `parallel` feature (default) work is spread over a rayon pool; without it every
//! strategy runs sequentially. Reductions are always performed in index order so results do
//! not depend on the worker count.

/// How data-parallel loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon with the given number of workers, or the global pool when `None`.
    #[default]
    Parallel,
    Workers(usize),
}

impl Execution {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(0) | None => Execution::Parallel,
            Some(1) => Execution::Sequential,
            Some(k) => Execution::Workers(k),
        }
    }

    /// Maps `f` over `0..len` and returns the results in index order.
    pub fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Execution::Workers(k) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new().num_threads(*k).build() {
                    Ok(pool) => pool.install(|| (0..len).into_par_iter().map(f).collect()),
                    Err(_) => (0..len).map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            _ => (0..len).map(f).collect(),
        }
    }

    /// Splits `0..len` into fixed-size chunks, maps each chunk, and folds the chunk results
    /// left to right. Chunking is independent of the worker count.
    pub fn chunked_fold<T, F, R>(&self, len: usize, chunk: usize, map: F, init: T, reduce: R) -> T
    where
        T: Send,
        F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
        R: Fn(T, T) -> T,
    {
        let chunk = chunk.max(1);
        let n_chunks = len.div_ceil(chunk);
        let parts = self.map_indexed(n_chunks, |c| {
            let lo = c * chunk;
            map(lo..(lo + chunk).min(len))
        });
        parts.into_iter().fold(init, reduce)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for exec in [Execution::Sequential, Execution::Parallel, Execution::Workers(3)] {
            let v = exec.map_indexed(100, |i| i * i);
            assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn chunked_fold_matches_sequential_sum_bitwise() {
        let f = |r: std::ops::Range<usize>| r.map(|i| (i as f64).sqrt()).sum::<f64>();
        let a = Execution::Sequential.chunked_fold(1000, 64, f, 0.0, |a, b| a + b);
        let b = Execution::Workers(4).chunked_fold(1000, 64, f, 0.0, |a, b| a + b);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn worker_flag_mapping() {
        assert_eq!(Execution::from_workers(Some(1)), Execution::Sequential);
        assert_eq!(Execution::from_workers(None), Execution::Parallel);
        assert_eq!(Execution::from_workers(Some(8)), Execution::Workers(8));
    }
}

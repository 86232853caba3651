//! Order-preserving data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature a dedicated rayon pool is used whenever more
//! than one worker is requested. Results always come back in input order, so
//! callers that merge them sequentially stay independent of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub struct Pool {
    workers: usize,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Pool {
    /// `workers == 0` picks the available parallelism.
    pub fn new(workers: usize) -> Self {
        let workers = if workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            workers
        };
        #[cfg(feature = "parallel")]
        {
            let pool = (workers > 1)
                .then(|| rayon::ThreadPoolBuilder::new().num_threads(workers).build().ok())
                .flatten();
            Pool { workers, pool }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Pool { workers: 1.min(workers) }
        }
    }

    pub fn sequential() -> Self {
        Pool::new(1)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}

impl Default for Pool {
    fn default() -> Self {
        Pool::new(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Pool::sequential().map(&items, |x| x * x);
        let par = Pool::new(4).map(&items, |x| x * x);
        assert_eq!(seq, par);
    }
}

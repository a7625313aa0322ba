//! Execution strategy for the data-parallel loops (walk enumeration,
//! quadrature nodes).
//!
//! Results are always collected in input order and reduced sequentially, so
//! both strategies produce bit-identical output.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Applies `f` to every index in `0..len`, returning results in order.
    pub fn map_indices<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
        }
    }

    /// Like [`Execution::map_indices`] over a slice.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = Execution::Sequential.map_indices(1000, |i| i * i);
        let default = Execution::default().map_indices(1000, |i| i * i);
        assert_eq!(seq, default);
    }
}

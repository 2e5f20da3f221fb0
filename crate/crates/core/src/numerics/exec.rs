use crate::error::Result;

/// Execution strategy for embarrassingly parallel loops.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and quietly
/// degrades to sequential otherwise. Reductions are chunked in a fixed order
/// so both strategies return bit-identical sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

const CHUNK: usize = 2048;

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Ordered map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Ordered fallible map; the first error in index order wins.
    pub fn try_map<T, R, F>(self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }

    /// `Σ_{k<len} f(k)`, summed per fixed-size chunk and then in chunk order.
    pub fn sum_range<F>(self, len: usize, f: F) -> Result<f64>
    where
        F: Fn(usize) -> Result<f64> + Sync + Send,
    {
        let starts: Vec<usize> = (0..len).step_by(CHUNK).collect();
        let partial = self.try_map(&starts, |&s| {
            let mut acc = 0.0;
            for k in s..(s + CHUNK).min(len) {
                acc += f(k)?;
            }
            Ok(acc)
        })?;
        Ok(partial.into_iter().sum())
    }
}

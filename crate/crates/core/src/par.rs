//! Index-ordered batch evaluation.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it, or with [`Execution::Sequential`], it runs on the caller's
//! thread. Either way results come back in index order, so any reduction
//! done afterwards sees the same sequence of values.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually run on the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

pub fn try_map_indexed<T, E, F>(n: usize, exec: Execution, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indexed(1000, Execution::Sequential, |i| (i as f64).sqrt());
        let par = map_indexed(1000, Execution::Parallel, |i| (i as f64).sqrt());
        assert_eq!(seq, par);
        let r: Result<Vec<usize>, String> = try_map_indexed(10, Execution::Parallel, |i| {
            if i == 7 {
                Err("seven".into())
            } else {
                Ok(i)
            }
        });
        assert_eq!(r, Err("seven".to_string()));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }
}

//! Data-parallel helpers with a sequential fallback.
//!
//! The `parallel` cargo feature (default) backs [`run`] with rayon; without
//! it everything is sequential. [`Execution::Sequential`] forces the fallback
//! at runtime regardless of the feature, which is what the benchmark suite
//! uses to compare both paths in a single binary. Results are always
//! collected in input order, so parallel and sequential runs produce
//! identical output bit for bit.

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Use rayon when the `parallel` feature is enabled (no-op otherwise).
    #[default]
    Parallel,
    /// Always iterate sequentially.
    Sequential,
}

/// Map `f` over `0..n`, collecting results in index order.
pub fn run<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => run_seq(n, f),
        Execution::Parallel => run_par(n, f),
    }
}

/// Sequential variant, always available (used directly by the benches).
pub fn run_seq<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn run_par<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_par<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    run_seq(n, f)
}

/// Ordered sum of complex terms produced by `f` over `0..n`. The reduction
/// itself is sequential over the collected terms, so the result does not
/// depend on thread scheduling.
pub fn sum_ordered<F>(exec: Execution, n: usize, f: F) -> num_complex::Complex64
where
    F: Fn(usize) -> num_complex::Complex64 + Sync + Send,
{
    run(exec, n, f)
        .into_iter()
        .fold(num_complex::Complex64::new(0.0, 0.0), |a, b| a + b)
}

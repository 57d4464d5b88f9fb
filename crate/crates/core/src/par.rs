//! Order-preserving map over a slice, on the rayon pool when the `parallel`
//! feature is enabled and requested, sequentially otherwise.

use crate::complexity::Execution;

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Whether [`Execution::Parallel`] actually uses threads in this build.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

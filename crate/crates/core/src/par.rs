//! Indexed map over independent work items.
//!
//! With the `parallel` feature the items run on the rayon pool; otherwise (or
//! when the caller asks for it) they run in order on the current thread. The
//! output is in index order either way.

/// Execution strategy for restart and sampling loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

pub fn map_indexed<T, F>(count: usize, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// Lowest value wins; ties go to the lowest index.
pub fn argmin_by_value<T>(items: &[T], value: impl Fn(&T) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, it) in items.iter().enumerate() {
        let v = value(it);
        let better = match best {
            None => true,
            Some((_, bv)) => v < bv,
        };
        if better {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

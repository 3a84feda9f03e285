//! Ordered first-match search over index ranges, parallel when the `parallel`
//! feature is enabled and sequential otherwise.

use std::ops::Range;
use std::time::Instant;

use serde::Serialize;

/// How a search is executed. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// Outcome of probing one index.
#[derive(Debug)]
pub(crate) enum Probe<T> {
    Hit(T),
    OutOfTime,
}

/// Returns the probe result with the smallest index, or `None` if every probe
/// returned `None`. The answer is the same for any thread count.
pub(crate) fn find_first<T, F>(range: Range<u64>, mode: ExecMode, probe: F) -> Option<Probe<T>>
where
    T: Send,
    F: Fn(u64) -> Option<Probe<T>> + Sync + Send,
{
    match mode {
        ExecMode::Sequential => range.into_iter().find_map(probe),
        ExecMode::Parallel => parallel_find_first(range, probe),
    }
}

#[cfg(feature = "parallel")]
fn parallel_find_first<T, F>(range: Range<u64>, probe: F) -> Option<Probe<T>>
where
    T: Send,
    F: Fn(u64) -> Option<Probe<T>> + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().find_map_first(probe)
}

#[cfg(not(feature = "parallel"))]
fn parallel_find_first<T, F>(range: Range<u64>, probe: F) -> Option<Probe<T>>
where
    T: Send,
    F: Fn(u64) -> Option<Probe<T>> + Sync + Send,
{
    range.into_iter().find_map(probe)
}

/// Wall-clock limit shared by all workers of a search.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn after(seconds: Option<f64>) -> Self {
        Deadline(seconds.map(|s| Instant::now() + std::time::Duration::from_secs_f64(s.max(0.0))))
    }

    pub(crate) fn passed(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

//! File formats, reporting, and CLI plumbing around `genus-core`.

pub mod formats;

use std::time::Instant;

/// Wall clock backed by [`Instant`], for exact-search deadlines.
pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn new() -> Self {
        WallClock { start: Instant::now() }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl genus_core::exact::Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

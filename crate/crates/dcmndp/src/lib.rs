//! Std companion to `dcmndp-core`: the DCMNDP-v1 file format, wall-clock
//! timing, the benchmark harness and the `dcmndp` command line.

pub mod cli;
pub mod format;
pub mod report;

use std::time::Instant;

use dcmndp_core::Clock;

pub use format::{parse_instance, parse_unchecked, serialize_instance, FormatError, ParseError};
pub use report::{BenchRow, GapTable, RunStats, CSV_HEADER};

/// `(nodes, edges)` of the twenty generated benchmark instances D.1 to D.20.
pub const RANDOM_SUITE: [(usize, usize); 20] = [
    (10, 15),
    (15, 20),
    (15, 25),
    (15, 30),
    (20, 35),
    (20, 40),
    (20, 45),
    (21, 40),
    (22, 45),
    (23, 50),
    (24, 55),
    (25, 60),
    (25, 50),
    (30, 60),
    (34, 70),
    (40, 75),
    (40, 75),
    (45, 80),
    (50, 90),
    (50, 100),
];

/// Seconds since construction.
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> Self {
        StdClock(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

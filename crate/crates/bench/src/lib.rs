//! Benchmark-only crate; see `benches/replica.rs`. Fixtures shared by the
//! benchmarks live here.

use julienne_core::bench::{gen_headcount, HeadcountVariant};
use julienne_core::Application;

/// The 5458-task thermal head-counting replica used by every benchmark.
pub fn thermal_replica() -> Application {
    gen_headcount(HeadcountVariant::Thermal).app
}

/// Replica ADL source, for parser benchmarks.
pub fn thermal_adl() -> String {
    gen_headcount(HeadcountVariant::Thermal).adl
}

//! Library side of the `annc` command-line tool: curve file I/O, seeded
//! workloads and the oracle-checked benchmark harness.

pub mod app;
pub mod bench;
pub mod curvefile;
pub mod workload;

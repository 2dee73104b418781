//! Library side of the CLI: the verification suites and the benchmark
//! harness, kept out of `main.rs` so integration tests can drive them
//! directly.

pub mod bench;
pub mod verify;

pub use bench::{run_bench, write_csv, BenchRecord, Precision, Variant};
pub use verify::{run_verify, CheckOutcome, VerifyMode};

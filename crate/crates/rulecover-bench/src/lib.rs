//! Benchmark-only crate; see `benches/learner.rs`.

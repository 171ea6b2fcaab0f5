//! Benchmark-only crate; see `benches/predictors.rs`.

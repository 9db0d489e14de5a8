//! Criterion benchmarks for the `ultradense` crate live under `benches/`.

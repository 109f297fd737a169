//! Criterion benchmarks for dirikit; see `benches/`.

//! Criterion benchmarks for qtel-core live under `benches/`.

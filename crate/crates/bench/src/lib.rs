//! Criterion benchmarks for `kdq-core`; see `benches/`.

//! Criterion benchmarks for the `leo-outage` crate; see `benches/`.

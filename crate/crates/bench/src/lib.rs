//! Criterion benchmarks for the spectral and nodal pipeline; see `benches/pipeline.rs`.

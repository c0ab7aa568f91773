//! Criterion benchmarks for `frobenius-core`; see `benches/`.

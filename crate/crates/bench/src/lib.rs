//! Benchmarks for `coarse-core`; see `benches/`.

//! Benchmarks for `tfsets`; see `benches/`.

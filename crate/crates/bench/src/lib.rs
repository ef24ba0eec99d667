//! Criterion benchmarks for the hot paths of `mmslab`; see `benches/`.

//! Criterion benchmarks for the hot kernels of `zol-core`; see `benches/kernels.rs`.

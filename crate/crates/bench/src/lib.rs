//! Benchmark harness for `zonosvm`; see `benches/`.

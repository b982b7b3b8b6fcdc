//! Rates, benchmarks and the statistics behind them.

pub mod bench;
pub mod rate;
pub mod stats;
pub mod zones;

//! Shared fixtures for the benchmarks.

use drsim_core::ProtocolParams;

/// The reference configuration at full vector length.
pub fn reference_params() -> ProtocolParams {
    ProtocolParams { n: 10_000, k: 16.0, gauge_k: 4.0, code_len: 4, pa: 1, border_fix: true, rounds: 5_000 }
}

/// A short run that finishes in milliseconds.
pub fn small_run(pa: usize) -> ProtocolParams {
    ProtocolParams { n: 1_000, k: 16.0, gauge_k: 4.0, code_len: 2, pa, border_fix: true, rounds: 200 }
}

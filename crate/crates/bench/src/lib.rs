//! Shared fixtures for the kernel benchmarks.

use ptsim::SystemParams;

/// Reference coupling used across the suite: Ω = 2π·32 kHz.
pub fn pts_params() -> SystemParams {
    SystemParams::from_khz(32.0, 1.0).unwrap()
}

pub fn ptb_params() -> SystemParams {
    SystemParams::from_khz(32.0, 47.0).unwrap()
}

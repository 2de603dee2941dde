//! Parameter fixtures shared by the benchmarks.

use std::f64::consts::PI;

use wqed_core::SystemParams;

/// The far-separated configuration where retardation matters most.
pub fn long_separation() -> SystemParams {
    SystemParams::new(0.1, 100.5 * PI)
}

/// The quarter-wavelength configuration with equal collective decay rates.
pub fn quarter_wave() -> SystemParams {
    SystemParams::new(0.1, PI / 2.0)
}

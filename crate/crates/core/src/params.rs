use std::f64::consts::PI;

use crate::error::{Result, WqedError};

/// Physical parameters of two identical qubits side-coupled to a waveguide.
///
/// Frequencies are in units of the waveguide decay rate and the separation enters
/// only through the phase `k0l = omega0 * L / c`. Qubit 1 sits at x = 0, qubit 2 at x = L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega0: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub k0l: f64,
    pub c: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams { omega0: 100.0, gamma: 1.0, gamma_prime: 0.1, k0l: 0.0, c: 1.0 }
    }
}

impl SystemParams {
    /// Reference system (omega0 = 100, gamma = c = 1) with the given loss and separation phase.
    pub fn new(gamma_prime: f64, k0l: f64) -> Self {
        SystemParams { gamma_prime, k0l, ..Default::default() }
    }

    pub fn with_k0l(self, k0l: f64) -> Self {
        SystemParams { k0l, ..self }
    }

    /// Qubit separation.
    pub fn length(&self) -> f64 {
        self.k0l * self.c / self.omega0
    }

    /// Resonant wavevector.
    pub fn k0(&self) -> f64 {
        self.omega0 / self.c
    }

    pub fn validate(self) -> Result<Self> {
        let finite = [self.omega0, self.gamma, self.gamma_prime, self.k0l, self.c].iter().all(|v| v.is_finite());
        if !finite {
            return Err(WqedError::Domain("all parameters must be finite".into()));
        }
        if self.gamma <= 0.0 {
            return Err(WqedError::Domain(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.gamma_prime < 0.0 {
            return Err(WqedError::Domain(format!("gamma_prime must be >= 0, got {}", self.gamma_prime)));
        }
        if self.omega0 <= 0.0 {
            return Err(WqedError::Domain(format!("omega0 must be > 0, got {}", self.omega0)));
        }
        if self.k0l < 0.0 {
            return Err(WqedError::Domain(format!("k0L must be >= 0, got {}", self.k0l)));
        }
        if self.c <= 0.0 {
            return Err(WqedError::Domain(format!("c must be > 0, got {}", self.c)));
        }
        Ok(self)
    }
}

/// Asymptotic output region of a two-photon state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Both photons right-moving, beyond qubit 2.
    Transmitted,
    /// Both photons left-moving, before qubit 1.
    Reflected,
}

/// Side from which a single photon is incident.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    FromLeft,
    FromRight,
}

/// Controls for the two-photon momentum integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Relative change below which a refinement is accepted.
    pub tol: f64,
    /// Initial half-width of the per-photon frequency window around E/2.
    pub window: f64,
    /// Maximum number of mesh halvings and window doublings, each.
    pub max_refine: u32,
    /// Initial mesh spacing.
    pub mesh: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { tol: 1e-6, window: 50.0, max_refine: 6, mesh: 0.02 }
    }
}

impl QuadratureSettings {
    pub fn validate(self) -> Result<Self> {
        if !(self.tol > 0.0 && self.window > 0.0 && self.mesh > 0.0) || self.max_refine == 0 {
            return Err(WqedError::Domain("quadrature settings must be positive".into()));
        }
        Ok(self)
    }
}

/// Controls for Newton continuation of poles in k0L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationSettings {
    pub step_k0l: f64,
    pub newton_tol: f64,
    pub max_iter: u32,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        ContinuationSettings { step_k0l: 0.01 * PI, newton_tol: 1e-12, max_iter: 50 }
    }
}

impl ContinuationSettings {
    pub fn validate(self) -> Result<Self> {
        if !(self.step_k0l > 0.0 && self.newton_tol > 0.0) || self.max_iter == 0 {
            return Err(WqedError::Domain("continuation settings must be positive".into()));
        }
        Ok(self)
    }
}

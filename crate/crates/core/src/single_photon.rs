//! Single-photon scattering eigenstates of the two-qubit system.
//!
//! With qubit j at position `l_j`, a photon of wavevector k incident from the left has
//! the field profile
//!
//! ```text
//! x < l1:       e^{ikx} + r e^{-ikx}
//! l1 < x < l2:  t12 e^{ikx} + r12 e^{-ikx}
//! x > l2:       t e^{ikx}
//! ```
//!
//! (all divided by sqrt(2 pi)) and qubit amplitudes e1, e2.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::params::{Direction, SystemParams};

pub type ComplexAmplitude = Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub k: f64,
    pub direction: Direction,
    pub t_k: Complex64,
    pub r_k: Complex64,
    pub t12: Complex64,
    pub r12: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
}

impl ScatteringAmplitudes {
    pub fn transmission(&self) -> f64 {
        self.t_k.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r_k.norm_sqr()
    }

    /// Qubit amplitude of qubit `i` (0 or 1).
    pub fn e(&self, i: usize) -> Complex64 {
        if i == 0 {
            self.e1
        } else {
            self.e2
        }
    }
}

/// Two possibly different qubits; only used internally and in tests of limiting cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPair {
    pub omega: [f64; 2],
    pub gamma: [f64; 2],
    pub gamma_prime: [f64; 2],
    pub position: [f64; 2],
    pub c: f64,
}

impl QubitPair {
    pub fn identical(p: &SystemParams) -> Self {
        QubitPair { omega: [p.omega0; 2], gamma: [p.gamma; 2], gamma_prime: [p.gamma_prime; 2], position: [0.0, p.length()], c: p.c }
    }

    /// Identical qubits at the same point: only their symmetric combination couples to the
    /// waveguide.
    pub fn colocated_twins(&self) -> bool {
        self.position[0] == self.position[1]
            && self.omega[0] == self.omega[1]
            && self.gamma[0] == self.gamma[1]
            && self.gamma_prime[0] == self.gamma_prime[1]
    }

    /// The pair seen through the mirror x -> -x, listed left to right.
    pub fn mirrored(&self) -> Self {
        QubitPair {
            omega: [self.omega[1], self.omega[0]],
            gamma: [self.gamma[1], self.gamma[0]],
            gamma_prime: [self.gamma_prime[1], self.gamma_prime[0]],
            position: [-self.position[1], -self.position[0]],
            c: self.c,
        }
    }

    /// Same pair with the loss rates negated; its eigenstates are the dual basis of the
    /// lossy scattering states.
    pub fn dual(&self) -> Self {
        QubitPair { gamma_prime: [-self.gamma_prime[0], -self.gamma_prime[1]], ..*self }
    }
}

/// Left-incident amplitudes for a general pair. A qubit with zero decay rate is
/// decoupled and gets zero amplitude.
pub fn pair_amplitudes(k: f64, q: &QubitPair) -> ScatteringAmplitudes {
    let ck = q.c * k;
    let [g1, g2] = q.gamma;
    let [l1, l2] = q.position;
    let a1 = Complex64::new(ck - q.omega[0], q.gamma_prime[0] / 2.0);
    let a2 = Complex64::new(ck - q.omega[1], q.gamma_prime[1] / 2.0);
    let b1 = a1 + I * (g1 / 2.0);
    let b2 = a2 + I * (g2 / 2.0);
    let ph1 = Complex64::from_polar(1.0, 2.0 * k * l1);
    let ph2 = Complex64::from_polar(1.0, 2.0 * k * l2);
    let d = b1 * b2 + g1 * g2 / 4.0 * Complex64::from_polar(1.0, 2.0 * k * (l2 - l1));

    let (t12, r12, t_k, r_k) = if g2 == 0.0 {
        // Qubit 2 decoupled; B2 = A2 cancels, which matters when both vanish.
        let t1 = a1 / b1;
        (t1, Complex64::new(0.0, 0.0), t1, -I * g1 * ph1 / (2.0 * b1))
    } else if g1 == 0.0 {
        let r2 = -I * g2 * ph2 / (2.0 * b2);
        (Complex64::new(1.0, 0.0), r2, a2 / b2, r2)
    } else if q.colocated_twins() {
        // D = A (A + i G) here; dividing out A keeps the dark resonance A = 0 finite.
        let s = a1 + I * g1;
        ((a1 + I * (g1 / 2.0)) / s, -I * g1 * ph2 / (2.0 * s), a1 / s, -I * g1 * ph1 / s)
    } else {
        (a1 * b2 / d, -I * g2 * a1 * ph2 / (2.0 * d), a1 * a2 / d, (-I * g2 * (a1 - I * (g1 / 2.0)) * ph2 - I * g1 * b2 * ph1) / (2.0 * d))
    };

    let norm = (2.0 * PI).sqrt();
    let qubit = |gamma: f64, l: f64, jump: Complex64| {
        if gamma == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            I * (2.0 * q.c / gamma).sqrt() * Complex64::from_polar(1.0, k * l) * jump / norm
        }
    };
    ScatteringAmplitudes { k, direction: Direction::FromLeft, t_k, r_k, t12, r12, e1: qubit(g1, l1, t12 - 1.0), e2: qubit(g2, l2, t_k - t12) }
}

/// Amplitudes for incidence from either side. A right-incident state is the mirror image
/// of the left-incident state of the mirrored pair, so no extra phases appear: for x > l2
/// its field is `e^{-ikx} + r_k e^{ikx}` and for x < l1 it is `t_k e^{-ikx}`.
pub fn pair_amplitudes_dir(k: f64, q: &QubitPair, direction: Direction) -> ScatteringAmplitudes {
    match direction {
        Direction::FromLeft => pair_amplitudes(k, q),
        Direction::FromRight => {
            let m = pair_amplitudes(k, &q.mirrored());
            ScatteringAmplitudes { direction, e1: m.e2, e2: m.e1, ..m }
        }
    }
}

/// Amplitudes without any parameter checks.
pub(crate) fn amplitudes_unchecked(k: f64, p: &SystemParams, direction: Direction) -> ScatteringAmplitudes {
    pair_amplitudes_dir(k, &QubitPair::identical(p), direction)
}

/// Single-photon amplitudes at wavevector `k` for validated identical-qubit parameters.
///
/// For `FromRight` the roles of t and r refer to the photon's own direction
/// (see [`pair_amplitudes_dir`]).
pub fn amplitudes(k: f64, params: &SystemParams, direction: Direction) -> ScatteringAmplitudes {
    debug_assert!(params.validate().is_ok());
    amplitudes_unchecked(k, params, direction)
}

/// Amplitudes parameterized as in the transmission maps: detuning `delta` of the photon
/// and its propagation phase `two_kl` = 2kL between the qubits.
pub fn amplitudes_at_phase(delta: f64, two_kl: f64, params: &SystemParams) -> ScatteringAmplitudes {
    let k = (params.omega0 + delta) / params.c;
    let length = two_kl / (2.0 * k);
    let p = params.with_k0l(params.omega0 * length / params.c);
    amplitudes(k, &p, Direction::FromLeft)
}

/// Transmission probability and principal-value phase in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionPoint {
    pub delta: f64,
    pub two_kl: f64,
    pub transmission: f64,
    pub phase: f64,
}

/// Transmission map over detunings (rows) and propagation phases 2kL (columns).
pub fn transmission_map(delta_grid: &[f64], two_kl_grid: &[f64], params: &SystemParams) -> Vec<Vec<TransmissionPoint>> {
    use rayon::prelude::*;
    delta_grid
        .par_iter()
        .map(|&delta| {
            two_kl_grid
                .iter()
                .map(|&two_kl| {
                    let a = amplitudes_at_phase(delta, two_kl, params);
                    TransmissionPoint { delta, two_kl, transmission: a.transmission(), phase: principal_arg(a.t_k) }
                })
                .collect()
        })
        .collect()
}

/// arg z mapped to (-pi, pi]; `atan2` returns -pi for a negative real with negative zero.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

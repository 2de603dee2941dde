#![allow(dead_code)]

pub mod lattice;

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64 as C;
use wqed_core::two_photon::{PhotonCoord, TwoPhotonInput, TwoPhotonSolver};
use wqed_core::{Channel, QuadratureSettings, SystemParams};

use lattice::{extrapolate_to_zero, Lattice};

/// Free two-boson Green matrix from the real-space qubit propagator,
/// G_ij = (i/2π) ∫ g_ij(ω) g_ij(E - ω) dω, on a plain trapezoid grid with the free part
/// subtracted and added back exactly.
pub fn convolution_g_dd(params: &SystemParams, e: f64, half_width: f64, h: f64) -> Matrix2<C> {
    let i = C::new(0.0, 1.0);
    let tau = params.length() / params.c;
    let prop = |w: f64| {
        let a = C::new(w - params.omega0, (params.gamma + params.gamma_prime) / 2.0);
        let b = i * (params.gamma / 2.0) * (i * w * tau).exp();
        let det = a * a - b * b;
        (a / det, -b / det)
    };
    let a0 = C::new(params.omega0, -params.gamma_prime / 2.0);
    let n = (half_width / h).round() as i64;
    let (mut s11, mut s12) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for m in -n..=n {
        let w = e / 2.0 + m as f64 * h;
        let (g11, g12) = prop(w);
        let (h11, h12) = prop(e - w);
        let free = 1.0 / ((w - a0) * (e - w - a0));
        let wt = if m.abs() == n { 0.5 * h } else { h };
        s11 += (g11 * h11 - free) * wt;
        s12 += g12 * h12 * wt;
    }
    let c = i / (2.0 * PI);
    let d = c * s11 + 1.0 / (e - 2.0 * a0);
    Matrix2::new(d, c * s12, c * s12, d)
}

pub struct OracleComparison {
    pub tau: f64,
    pub continuum: C,
    pub lattice: C,
    pub relative_error: f64,
}

/// ψ2/φ2 in transmission at x1 = L + c, x2 = x1 + cτ: continuum solver versus the lattice
/// extrapolated to zero spacing. Each lattice level is compared at its own site positions,
/// so only the discretization error is extrapolated.
pub fn lattice_comparison(k0l: f64, levels: &[i64], taus: &[f64]) -> Vec<OracleComparison> {
    let params = SystemParams::new(0.1, k0l);
    let solver = TwoPhotonSolver::new(&params, &QuadratureSettings::default()).unwrap();
    let input = TwoPhotonInput::degenerate(params.k0());
    let mut diffs = vec![Vec::new(); taus.len()];
    let mut cont = vec![C::new(0.0, 0.0); taus.len()];
    let mut lat = vec![C::new(0.0, 0.0); taus.len()];
    let mut spacing = Vec::new();
    for &n in levels {
        let l = Lattice::new(&params, n);
        let m1 = l.site(l.length + params.c);
        let pairs: Vec<(i64, i64)> = taus.iter().map(|t| (m1, m1 + (params.c * t / l.a).round() as i64)).collect();
        let r = l.ratios(&pairs, &[f64::INFINITY]);
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let (x1, x2) = (l.position(a), l.position(b));
            let psi = solver.interacting_wavefunction(x1, x2, Channel::Transmitted, &input).unwrap();
            let phi = solver.noninteracting_amplitude(PhotonCoord::right(x1), PhotonCoord::right(x2), &input);
            cont[k] = psi / phi;
            lat[k] = r.values[0][k];
            diffs[k].push(r.values[0][k] - psi / phi);
        }
        spacing.push(l.a);
    }
    taus.iter()
        .enumerate()
        .map(|(k, &tau)| {
            let d = extrapolate_to_zero(&spacing, &diffs[k]);
            OracleComparison { tau, continuum: cont[k], lattice: cont[k] + d, relative_error: d.norm() / cont[k].norm() }
        })
        .collect()
}

/// Lattice levels (sites between the qubits) for the reference comparison points.
pub fn oracle_points() -> Vec<(f64, Vec<i64>)> {
    vec![(PI / 2.0, vec![5, 9, 17]), (25.5 * PI, vec![103, 207, 415]), (100.5 * PI, vec![401, 801, 1601])]
}

//! Driven two-qubit master equation in the two-pole picture.
//!
//! Integrating out the waveguide leaves a Lindblad equation whose dissipator is diagonal in
//! the symmetric/antisymmetric basis σ_S,A = (σ1 ± σ2)/√2:
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_β Γ_β (σ_β ρ σ_β⁺ - {σ_β⁺σ_β, ρ}/2),   β ∈ {S, A}
//! H = Σ_β (ω_β - ω_d) σ_β⁺σ_β + Ω1 (σ1⁺ + σ1) + Ω2 (σ2⁺ + σ2)
//! ```
//!
//! in the frame rotating at the drive frequency ω_d. Local loss Γ' is part of Γ_S,A.
//! In the renormalized mode (ω_β, Γ_β) are the S and A poles instead of the Markov values.
//!
//! Superoperators act on the row-major vectorization vec(ρ)[4i + j] = ρ_ij, for which
//! A ρ B maps to kron(A, Bᵀ).

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, WqedError};
use crate::params::{ContinuationSettings, SystemParams};
use crate::poles::{markov_poles, poles_on_grid, TracePoint};

type C = Complex64;
pub type Liouvillian = SMatrix<C, 16, 16>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-10;
const KERNEL_TOL: f64 = 1e-9;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Two-qubit state in the basis {g1g2, g1e2, e1g2, e1e2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4<C>);

impl DensityMatrix4 {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix4<C>) -> Result<Self> {
        let rho = DensityMatrix4(m);
        if rho.hermiticity_error() > HERMITIAN_TOL {
            return Err(WqedError::Tolerance(format!("not Hermitian: {:.2e}", rho.hermiticity_error())));
        }
        if (rho.trace() - 1.0).abs() > TRACE_TOL {
            return Err(WqedError::Tolerance(format!("trace {}", rho.trace())));
        }
        if rho.min_eigenvalue() < -EIGEN_TOL {
            return Err(WqedError::Tolerance(format!("negative eigenvalue {:.2e}", rho.min_eigenvalue())));
        }
        Ok(rho)
    }

    pub fn ground() -> Self {
        Self::pure(&Vector4::new(ONE, ZERO, ZERO, ZERO))
    }

    /// |ψ⟩⟨ψ| for a normalized or unnormalized ψ.
    pub fn pure(psi: &Vector4<C>) -> Self {
        let psi = psi / C::new(psi.norm(), 0.0);
        DensityMatrix4(psi * psi.adjoint())
    }

    /// (|g1e2⟩ + |e1g2⟩)/√2.
    pub fn symmetric() -> Self {
        Self::pure(&Vector4::new(ZERO, ONE, ONE, ZERO))
    }

    /// (|g1e2⟩ - |e1g2⟩)/√2.
    pub fn antisymmetric() -> Self {
        Self::pure(&Vector4::new(ZERO, ONE, -ONE, ZERO))
    }

    pub fn matrix(&self) -> &Matrix4<C> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * C::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// ⟨ψ|ρ|ψ⟩ for normalized ψ.
    pub fn population(&self, psi: &Vector4<C>) -> f64 {
        (psi.adjoint() * self.0 * psi)[(0, 0)].re
    }

    fn to_vec(self) -> SVector<C, 16> {
        SVector::from_iterator((0..16).map(|n| self.0[(n / 4, n % 4)]))
    }

    fn from_vec(v: &SVector<C, 16>) -> Matrix4<C> {
        Matrix4::from_fn(|i, j| v[4 * i + j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectiveSource {
    Markov,
    Renormalized,
}

/// Collective frequencies and decay rates of the S and A modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveParams {
    pub omega0: f64,
    pub omega_s: f64,
    pub omega_a: f64,
    pub gamma_s: f64,
    pub gamma_a: f64,
    pub source: CollectiveSource,
}

impl CollectiveParams {
    pub fn markov(params: &SystemParams) -> Result<Self> {
        let (s, a) = markov_poles(params)?;
        Ok(CollectiveParams {
            omega0: params.omega0,
            omega_s: s.omega.re,
            omega_a: a.omega.re,
            gamma_s: s.gamma_eff,
            gamma_a: a.gamma_eff,
            source: CollectiveSource::Markov,
        })
    }

    pub fn renormalized(params: &SystemParams, poles: &TracePoint) -> Self {
        CollectiveParams {
            omega0: params.omega0,
            omega_s: poles.s.omega.re,
            omega_a: poles.a.omega.re,
            gamma_s: poles.s.gamma_eff,
            gamma_a: poles.a.gamma_eff,
            source: CollectiveSource::Renormalized,
        }
    }

    /// Decay rates may vanish (a perfectly dark state) but not go negative.
    pub fn validate(self) -> Result<Self> {
        let vals = [self.omega0, self.omega_s, self.omega_a, self.gamma_s, self.gamma_a];
        if vals.iter().any(|v| !v.is_finite()) || self.gamma_s < 0.0 || self.gamma_a < 0.0 {
            return Err(WqedError::Domain(format!("invalid collective parameters {self:?}")));
        }
        Ok(self)
    }
}

/// Coherent drive of the two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub omega1: f64,
    pub omega2: f64,
    /// Drive frequency minus ω0.
    pub detuning: f64,
}

impl Default for DriveParams {
    fn default() -> Self {
        DriveParams { omega1: 0.1, omega2: 0.0, detuning: 0.0 }
    }
}

impl DriveParams {
    pub fn off() -> Self {
        DriveParams { omega1: 0.0, omega2: 0.0, detuning: 0.0 }
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.omega1 >= 0.0 && self.omega2 >= 0.0 && self.detuning.is_finite() && self.omega1.is_finite() && self.omega2.is_finite()) {
            return Err(WqedError::Domain(format!("invalid drive {self:?}")));
        }
        Ok(self)
    }
}

fn lowering() -> Matrix2<C> {
    Matrix2::new(ZERO, ONE, ZERO, ZERO)
}

fn kron2(a: &Matrix2<C>, b: &Matrix2<C>) -> Matrix4<C> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

fn kron4(a: &Matrix4<C>, b: &Matrix4<C>) -> Liouvillian {
    Liouvillian::from_fn(|i, j| a[(i / 4, j / 4)] * b[(i % 4, j % 4)])
}

/// Lowering operators of qubit 1 and qubit 2.
pub fn site_lowering() -> [Matrix4<C>; 2] {
    let id = Matrix2::identity();
    [kron2(&lowering(), &id), kron2(&id, &lowering())]
}

fn commutator_super(h: &Matrix4<C>) -> Liouvillian {
    let id = Matrix4::identity();
    (kron4(h, &id) - kron4(&id, &h.transpose())) * (-I)
}

/// Σ_ij g_ij (σ_j ρ σ_i⁺ - {σ_i⁺σ_j, ρ}/2).
fn dissipator(ops: &[Matrix4<C>], rates: &[Vec<f64>]) -> Liouvillian {
    let id = Matrix4::identity();
    let mut l = Liouvillian::zeros();
    for (i, oi) in ops.iter().enumerate() {
        for (j, oj) in ops.iter().enumerate() {
            let g = rates[i][j];
            if g == 0.0 {
                continue;
            }
            let g = C::new(g, 0.0);
            let n = oi.adjoint() * oj;
            l += (kron4(oj, &oi.adjoint().transpose()) - (kron4(&n, &id) + kron4(&id, &n.transpose())) * C::new(0.5, 0.0)) * g;
        }
    }
    l
}

fn drive_hamiltonian(drive: &DriveParams) -> Matrix4<C> {
    let [s1, s2] = site_lowering();
    (s1 + s1.adjoint()) * C::new(drive.omega1, 0.0) + (s2 + s2.adjoint()) * C::new(drive.omega2, 0.0)
}

/// Liouvillian in the collective form: jump operators σ_S,A at rates Γ_S,A.
pub fn build_liouvillian(collective: &CollectiveParams, drive: &DriveParams) -> Result<Liouvillian> {
    let c = collective.validate()?;
    let d = drive.validate()?;
    let [s1, s2] = site_lowering();
    let r = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ss = (s1 + s2) * r;
    let sa = (s1 - s2) * r;
    let wd = c.omega0 + d.detuning;
    let h = ss.adjoint() * ss * C::new(c.omega_s - wd, 0.0) + sa.adjoint() * sa * C::new(c.omega_a - wd, 0.0) + drive_hamiltonian(&d);
    Ok(commutator_super(&h) + dissipator(&[ss, sa], &[vec![c.gamma_s, 0.0], vec![0.0, c.gamma_a]]))
}

/// Liouvillian in the site form with the Markov couplings Γ12 = Γ cos k0L and
/// Ω12 = (Γ/2) sin k0L. Same generator as [`build_liouvillian`] with Markov parameters.
pub fn build_site_liouvillian(params: &SystemParams, drive: &DriveParams) -> Result<Liouvillian> {
    let p = params.validate()?;
    let d = drive.validate()?;
    let [s1, s2] = site_lowering();
    let g_ii = p.gamma + p.gamma_prime;
    let g12 = p.gamma * p.k0l.cos();
    let om12 = p.gamma / 2.0 * p.k0l.sin();
    let det = C::new(-d.detuning, 0.0);
    let h = (s1.adjoint() * s1 + s2.adjoint() * s2) * det + (s1.adjoint() * s2 + s2.adjoint() * s1) * C::new(om12, 0.0) + drive_hamiltonian(&d);
    Ok(commutator_super(&h) + dissipator(&[s1, s2], &[vec![g_ii, g12], vec![g12, g_ii]]))
}

/// Unique stationary state of `l`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix4> {
    let svd = l.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(WqedError::Convergence { op: "steady_state", detail: "SVD failed".into() })?;
    let sv = &svd.singular_values;
    let scale = sv.max().max(1.0);
    let kernel = sv.iter().filter(|&&s| s < KERNEL_TOL * scale).count();
    if kernel != 1 {
        return Err(WqedError::DegenerateKernel(kernel));
    }
    let idx = sv.imin();
    let v: SVector<C, 16> = v_t.row(idx).adjoint();
    let m = DensityMatrix4::from_vec(&v);
    let tr = m.trace();
    let m = m / tr;
    let m = (m + m.adjoint()) * C::new(0.5, 0.0);
    let residual = (l * DensityMatrix4(m).to_vec()).camax();
    if residual > RESIDUAL_TOL {
        return Err(WqedError::Convergence { op: "steady_state", detail: format!("residual {residual:.2e}") });
    }
    DensityMatrix4::new(m)
}

/// ρ(t) = exp(L t) ρ0 at each time of `t_grid`.
pub fn evolve(rho0: &DensityMatrix4, l: &Liouvillian, t_grid: &[f64]) -> Result<Vec<DensityMatrix4>> {
    let v0 = rho0.to_vec();
    t_grid
        .iter()
        .map(|&t| {
            if !(t.is_finite() && t >= 0.0) {
                return Err(WqedError::Domain(format!("time must be finite and >= 0, got {t}")));
            }
            let m = DensityMatrix4::from_vec(&((l * C::new(t, 0.0)).exp() * v0));
            let rho = DensityMatrix4(m);
            if rho.min_eigenvalue() < -POSITIVITY_TOL {
                return Err(WqedError::Tolerance(format!("positivity lost at t = {t}: {:.2e}", rho.min_eigenvalue())));
            }
            Ok(rho)
        })
        .collect()
}

fn psd_sqrt(m: &Matrix4<C>) -> Matrix4<C> {
    let h = (m + m.adjoint()) * C::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|x| C::new(x.max(0.0).sqrt(), 0.0)));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Wootters concurrence, computed from the Hermitian form √ρ ρ̃ √ρ whose eigenvalues are
/// the squares of the λ_i.
pub fn concurrence(rho: &DensityMatrix4) -> f64 {
    let y = Matrix2::new(ZERO, -I, I, ZERO);
    let yy = kron2(&y, &y);
    let tilde = yy * rho.0.conjugate() * yy;
    let root = psd_sqrt(&rho.0);
    let m = root * tilde * root;
    let m = (m + m.adjoint()) * C::new(0.5, 0.0);
    let mut lam: Vec<f64> = m.symmetric_eigenvalues().iter().map(|&x| x.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    (lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0)
}

/// Steady-state excitation probability of a driven mode at detuning `delta` with decay
/// rate `gamma_y` and Rabi frequency `omega`.
pub fn excitation_probability(delta: f64, gamma_y: f64, omega: f64) -> f64 {
    1.0 / (2.0 + (delta / omega).powi(2) + (gamma_y / (2.0 * omega)).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrencePoint {
    pub k0l: f64,
    pub concurrence: f64,
    pub collective: CollectiveParams,
    /// Excitation probabilities of the S and A modes for a drive Ω1 on qubit 1, which
    /// couples to each mode with Ω1/√2.
    pub p_s: f64,
    pub p_a: f64,
    pub two_pole_breakdown: bool,
}

/// Steady-state concurrence along `k0l_grid`.
pub fn concurrence_scan(k0l_grid: &[f64], drive: &DriveParams, params: &SystemParams, mode: CollectiveSource) -> Result<Vec<ConcurrencePoint>> {
    let collectives: Vec<(CollectiveParams, bool)> = match mode {
        CollectiveSource::Markov => {
            k0l_grid.iter().map(|&k| CollectiveParams::markov(&params.with_k0l(k)).map(|c| (c, false))).collect::<Result<_>>()?
        }
        CollectiveSource::Renormalized => poles_on_grid(k0l_grid, params, &ContinuationSettings::default())?
            .iter()
            .map(|t| (CollectiveParams::renormalized(params, t), t.two_pole_breakdown))
            .collect(),
    };
    let d = drive.validate()?;
    let omega_mode = (d.omega1 * d.omega1 + d.omega2 * d.omega2).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    k0l_grid
        .par_iter()
        .zip(collectives.par_iter())
        .map(|(&k, &(c, breakdown))| {
            let rho = steady_state(&build_liouvillian(&c, &d)?)?;
            let wd = c.omega0 + d.detuning;
            Ok(ConcurrencePoint {
                k0l: k,
                concurrence: concurrence(&rho),
                collective: c,
                p_s: excitation_probability(c.omega_s - wd, c.gamma_s, omega_mode),
                p_a: excitation_probability(c.omega_a - wd, c.gamma_a, omega_mode),
                two_pole_breakdown: breakdown,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn markov(gp: f64, k0l: f64) -> CollectiveParams {
        CollectiveParams::markov(&SystemParams::new(gp, k0l)).unwrap()
    }

    #[test]
    fn site_and_collective_forms_agree() {
        for (k0l, drive) in
            [(0.3, DriveParams::default()), (2.9, DriveParams { omega1: 0.4, omega2: 0.2, detuning: -0.3 }), (100.5 * PI, DriveParams::off())]
        {
            let p = SystemParams::new(0.1, k0l);
            let a = build_liouvillian(&markov(0.1, k0l), &drive).unwrap();
            let b = build_site_liouvillian(&p, &drive).unwrap();
            assert!((a - b).camax() < 1e-12);
        }
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let rho = steady_state(&build_liouvillian(&markov(0.1, 1.0), &DriveParams::off()).unwrap()).unwrap();
        assert!((rho.matrix() - DensityMatrix4::ground().matrix()).camax() < 1e-10);
    }

    #[test]
    fn dark_state_gives_degenerate_kernel() {
        let l = build_liouvillian(&markov(0.0, 0.0), &DriveParams::off()).unwrap();
        assert!(matches!(steady_state(&l), Err(WqedError::DegenerateKernel(n)) if n > 1));
        let out = evolve(&DensityMatrix4::antisymmetric(), &l, &[0.0, 5.0, 50.0]).unwrap();
        for rho in out {
            assert!((rho.matrix() - DensityMatrix4::antisymmetric().matrix()).camax() < 1e-12);
        }
    }

    #[test]
    fn superradiant_decay() {
        let l = build_liouvillian(&markov(0.1, 0.0), &DriveParams::off()).unwrap();
        let ts = [0.0, 0.3, 1.0, 2.5];
        let out = evolve(&DensityMatrix4::symmetric(), &l, &ts).unwrap();
        assert_eq!(out[0], DensityMatrix4::symmetric());
        let s = Vector4::new(ZERO, ONE, ONE, ZERO) / C::new(2f64.sqrt(), 0.0);
        for (rho, t) in out.iter().zip(ts) {
            assert_abs_diff_eq!(rho.population(&s), (-2.1 * t).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn wootters_reference_states() {
        assert_abs_diff_eq!(concurrence(&DensityMatrix4::symmetric()), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(concurrence(&DensityMatrix4::ground()), 0.0, epsilon = 1e-12);
        let werner = DensityMatrix4::symmetric().matrix() * C::new(0.5, 0.0) + Matrix4::identity() * C::new(0.125, 0.0);
        assert_abs_diff_eq!(concurrence(&DensityMatrix4::new(werner).unwrap()), 0.25, epsilon = 1e-10);
    }

    #[test]
    fn excitation_probability_limits() {
        assert_abs_diff_eq!(excitation_probability(0.0, 1e-9, 1.0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(excitation_probability(2.0, 2.0, 1.0), 1.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_density_matrix_rejected() {
        assert!(DensityMatrix4::new(Matrix4::identity()).is_err());
        let mut m = *DensityMatrix4::ground().matrix();
        m[(0, 1)] = C::new(0.1, 0.0);
        assert!(DensityMatrix4::new(m).is_err());
    }
}

//! Interacting two-photon scattering states.
//!
//! The qubits are treated as bosonic sites with an on-site repulsion U. Between U = 0 and
//! U = ∞ the scattering state is fixed by the Lippmann–Schwinger equation, and in the
//! hard-core limit it reduces to
//!
//! ```text
//! ψ2(x1, x2) = φ2(x1, x2) - G_xd · G_dd^{-1} · φ_dd
//! ```
//!
//! where φ2 is the symmetrized product of single-photon eigenstates, φ_dd its double
//! occupation amplitudes, and the free two-excitation Green functions are expanded in
//! single-photon eigenstates:
//!
//! ```text
//! G_ij        = ∫∫ ρ_ij(k1) ρ_ij(k2) / (E - ck1 - ck2 + i0) dk1 dk2
//! G_i(x1, x2) = √2 ∫∫ σ_i(k1) σ_i(k2) e^{±i(k1 x1 + k2 x2)} / (E - ck1 - ck2 + i0) dk1 dk2
//! ```
//!
//! with ρ_ij = Σ_α e_i^α ē_j^α summed over both incidence directions. With loss the
//! eigenstates are not orthogonal; ē is the conjugated amplitude of the dual problem
//! (loss rate negated), which makes the expansion biorthogonal.
//!
//! The k1 integral is done on a uniform grid symmetric about E/2c, so E/c - k_m is again a
//! grid point: the retarded transform (principal value minus iπ times the density) is one
//! FFT convolution, and the k2 integral is a trapezoid sum. Both are spectrally accurate
//! for smooth integrands, so the densities are rolled off to zero over the outer half of
//! the window with a C∞ taper instead of being cut sharply. The amplitudes decay only as
//! 1/k, which leaves a window error c/W that Richardson extrapolation removes. Mesh
//! halving and window doubling continue until the result moves by less than the
//! tolerance.
//!
//! The expansion only sees modes that scatter waveguide photons. Close to k0L = nπ one
//! collective mode is nearly dark and its dual partner is amplified, and the expansion is
//! incomplete; [`GreenMatrices::completeness`] reports ∫ρ_ii dk, which is 1 when it is
//! complete. For colocated qubits only the symmetric mode couples, G_dd has rank one,
//! and the solve is carried out on a single site.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, WqedError};
use crate::hilbert::HilbertPlan;
use crate::params::{Channel, Direction, QuadratureSettings, SystemParams};
use crate::single_photon::{pair_amplitudes, pair_amplitudes_dir, QubitPair, ScatteringAmplitudes};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const MAX_GRID: usize = 1 << 22;
const MAX_CONDITION: f64 = 1e12;
/// Fraction of the window over which the integrands are left untouched.
const TAPER_START: f64 = 0.5;

/// Two photons incident from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonInput {
    pub k1: f64,
    pub k2: f64,
}

impl TwoPhotonInput {
    /// Both photons at the same wavevector, the weak coherent-drive limit.
    pub fn degenerate(k: f64) -> Self {
        TwoPhotonInput { k1: k, k2: k }
    }

    pub fn energy(&self, c: f64) -> f64 {
        c * (self.k1 + self.k2)
    }
}

/// Propagation direction of a photon coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mover {
    Right,
    Left,
}

/// A photon position together with the chiral field component it refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonCoord {
    pub x: f64,
    pub mover: Mover,
}

impl PhotonCoord {
    pub fn right(x: f64) -> Self {
        PhotonCoord { x, mover: Mover::Right }
    }

    pub fn left(x: f64) -> Self {
        PhotonCoord { x, mover: Mover::Left }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrices {
    pub g_dd: Matrix2<C>,
    /// ∫ρ_ii dk for each qubit over the final window.
    pub completeness: [f64; 2],
}

/// ψ2(x_c, x_c ± cτ) sampled along a delay grid in one output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    pub channel: Channel,
    pub x_c: f64,
    pub tau_grid: Vec<f64>,
    pub samples: Vec<C>,
    /// |φ2| on the sampled line, i.e. 2|a|^2/(2π) with a the single-photon amplitude of the
    /// channel; constant along the line for degenerate input.
    pub normalization: f64,
}

impl TwoPhotonState {
    pub fn g2(&self) -> Vec<(f64, f64)> {
        let n2 = self.normalization * self.normalization;
        self.tau_grid.iter().zip(&self.samples).map(|(&t, s)| (t, s.norm_sqr() / n2)).collect()
    }
}

/// Right- or left-moving field of a left-incident photon at x, including 1/√(2π).
pub fn photon_field(x: f64, mover: Mover, a: &ScatteringAmplitudes, q: &QubitPair) -> C {
    let [l1, l2] = q.position;
    let norm = 1.0 / (2.0 * PI).sqrt();
    match mover {
        Mover::Right => {
            let amp = if x < l1 {
                C::new(1.0, 0.0)
            } else if x > l2 {
                a.t_k
            } else {
                a.t12
            };
            amp * C::from_polar(norm, a.k * x)
        }
        Mover::Left => {
            let amp = if x < l1 {
                a.r_k
            } else if x > l2 {
                ZERO
            } else {
                a.r12
            };
            amp * C::from_polar(norm, -a.k * x)
        }
    }
}

/// Solver for one qubit pair and one set of quadrature controls.
#[derive(Debug, Clone, Copy)]
pub struct TwoPhotonSolver {
    pair: QubitPair,
    quad: QuadratureSettings,
}

/// Per-k spectral weights: (ρ, σ).
type KRow = ([[C; 2]; 2], [[C; 2]; 2]);

struct Spectral {
    k: Vec<f64>,
    h: f64,
    rho: [[Vec<C>; 2]; 2],
    /// Indexed by channel (transmitted, reflected), then qubit.
    sigma: [[Vec<C>; 2]; 2],
}

fn channel_index(channel: Channel) -> usize {
    match channel {
        Channel::Transmitted => 0,
        Channel::Reflected => 1,
    }
}

/// 1 below `start`, 0 at 1, infinitely differentiable in between.
fn smooth_cutoff(u: f64, start: f64) -> f64 {
    if u <= start {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let t = (u - start) / (1.0 - start);
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    f(1.0 - t) / (f(1.0 - t) + f(t))
}

/// Removes the c/W term from results at windows W and 2W.
fn richardson(narrow: &[Vec<C>], wide: &[Vec<C>]) -> Vec<Vec<C>> {
    narrow.iter().zip(wide).map(|(a, b)| a.iter().zip(b).map(|(x, y)| 2.0 * y - x).collect()).collect()
}

/// Largest change of each block relative to its largest entry, or to `floor` for that block
/// when larger.
fn relative_change(old: &[Vec<C>], new: &[Vec<C>], floor: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .enumerate()
        .map(|(n, (a, b))| {
            let scale = b.iter().map(|v| v.norm()).fold(floor.get(n).copied().unwrap_or(0.0), f64::max);
            let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            if scale > 0.0 {
                diff / scale
            } else {
                diff
            }
        })
        .fold(0.0, f64::max)
}

impl TwoPhotonSolver {
    pub fn new(params: &SystemParams, quad: &QuadratureSettings) -> Result<Self> {
        let p = params.validate()?;
        Ok(TwoPhotonSolver { pair: QubitPair::identical(&p), quad: quad.validate()? })
    }

    /// Solver for a general pair; a qubit with zero decay rate drops out.
    pub fn for_pair(pair: QubitPair, quad: &QuadratureSettings) -> Result<Self> {
        if pair.gamma.iter().all(|&g| g <= 0.0) || pair.gamma.iter().any(|&g| g < 0.0) {
            return Err(WqedError::Domain("at least one qubit must couple to the waveguide".into()));
        }
        Ok(TwoPhotonSolver { pair, quad: quad.validate()? })
    }

    pub fn pair(&self) -> &QubitPair {
        &self.pair
    }

    /// Qubits that enter the hard-core constraint as independent sites.
    fn active_sites(&self) -> Vec<usize> {
        let mut sites = Vec::with_capacity(2);
        if self.pair.gamma[0] > 0.0 {
            sites.push(0);
        }
        if self.pair.gamma[1] > 0.0 && !(self.pair.colocated_twins() && !sites.is_empty()) {
            sites.push(1);
        }
        sites
    }

    fn check_region(&self, channel: Channel, xs: &[f64]) -> Result<()> {
        let [l1, l2] = self.pair.position;
        let ok = match channel {
            Channel::Transmitted => xs.iter().all(|&x| x > l2),
            Channel::Reflected => xs.iter().all(|&x| x < l1),
        };
        if ok {
            Ok(())
        } else {
            Err(WqedError::Domain(format!("coordinates {xs:?} are not in the {channel:?} output region")))
        }
    }

    fn spectral(&self, e: f64, window: f64, mesh: f64) -> Result<Spectral> {
        let m = (window / mesh).round() as usize;
        let n = 2 * m + 1;
        if n > MAX_GRID {
            return Err(WqedError::Convergence {
                op: "green",
                detail: format!("grid of {n} points exceeds the limit; loosen tol or raise the window"),
            });
        }
        let h = window / m as f64;
        let centre = e / self.pair.c / 2.0;
        let k: Vec<f64> = (0..n).map(|j| centre + (j as f64 - m as f64) * h).collect();
        let dual = self.pair.dual();
        let norm = 1.0 / (2.0 * PI).sqrt();

        let rows: Vec<KRow> = k
            .par_iter()
            .map(|&kk| {
                let r = pair_amplitudes(kk, &self.pair);
                let l = pair_amplitudes_dir(kk, &self.pair, Direction::FromRight);
                let rd = pair_amplitudes(kk, &dual);
                let ld = pair_amplitudes_dir(kk, &dual, Direction::FromRight);
                let mut rho = [[ZERO; 2]; 2];
                let mut sig = [[ZERO; 2]; 2];
                for i in 0..2 {
                    let (ebr, ebl) = (rd.e(i).conj(), ld.e(i).conj());
                    for (j, slot) in rho.iter_mut().enumerate() {
                        slot[i] = r.e(j) * ebr + l.e(j) * ebl;
                    }
                    // Right-moving output beyond qubit 2, left-moving output before qubit 1.
                    sig[0][i] = (r.t_k * ebr + l.r_k * ebl) * norm;
                    sig[1][i] = (r.r_k * ebr + l.t_k * ebl) * norm;
                }
                let taper = smooth_cutoff((kk - centre).abs() / window, TAPER_START);
                for v in rho.iter_mut().chain(sig.iter_mut()).flatten() {
                    *v *= taper;
                }
                (rho, sig)
            })
            .collect();

        let column = |f: &dyn Fn(&KRow) -> C| rows.iter().map(f).collect::<Vec<C>>();
        let rho = [[column(&|r| r.0[0][0]), column(&|r| r.0[0][1])], [column(&|r| r.0[1][0]), column(&|r| r.0[1][1])]];
        let sigma = [[column(&|r| r.1[0][0]), column(&|r| r.1[0][1])], [column(&|r| r.1[1][0]), column(&|r| r.1[1][1])]];
        Ok(Spectral { k, h, rho, sigma })
    }

    /// Halves the mesh at the starting window until the result is stable, then doubles the
    /// window; successive windows are combined by Richardson extrapolation and the
    /// extrapolated values must agree to the tolerance.
    fn converge(&self, op: &'static str, floor: &[f64], mut eval: impl FnMut(f64, f64) -> Result<Vec<Vec<C>>>) -> Result<Vec<Vec<C>>> {
        let q = &self.quad;
        let mut mesh = q.mesh;
        let mut window = q.window;
        let mut current = eval(window, mesh)?;
        let mut halvings = 0;
        loop {
            let finer = eval(window, mesh / 2.0)?;
            let change = relative_change(&current, &finer, floor);
            if change <= q.tol {
                break;
            }
            if halvings == q.max_refine {
                return Err(WqedError::Convergence { op, detail: format!("mesh {mesh:.3e} still changes the result by {change:.2e}") });
            }
            halvings += 1;
            mesh /= 2.0;
            current = finer;
        }

        let mut wide = eval(2.0 * window, mesh)?;
        let mut estimate = richardson(&current, &wide);
        let mut change = f64::INFINITY;
        for _ in 0..q.max_refine {
            window *= 2.0;
            let wider = eval(2.0 * window, mesh)?;
            let next = richardson(&wide, &wider);
            change = relative_change(&estimate, &next, floor);
            if change <= q.tol {
                return Ok(next);
            }
            wide = wider;
            estimate = next;
        }
        Err(WqedError::Convergence { op, detail: format!("window {window} still changes the extrapolated result by {change:.2e}") })
    }

    fn g_dd_on(&self, s: &Spectral, plan: &HilbertPlan) -> (Matrix2<C>, [f64; 2]) {
        let n = s.k.len();
        let scale = s.h / self.pair.c;
        let mut g = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let f = &s.rho[i][j];
                let r = plan.retarded(f);
                g[(i, j)] = (0..n).map(|m| f[m] * r[n - 1 - m]).sum::<C>() * scale;
            }
        }
        let completeness = [0, 1].map(|i| s.rho[i][i].iter().sum::<C>().re * s.h);
        (g, completeness)
    }

    /// G_i(x1, x1 ± c τ) for every delay, both qubits.
    fn g_xd_on(&self, s: &Spectral, plan: &HilbertPlan, channel: Channel, x1: f64, x2: &[f64]) -> Vec<[C; 2]> {
        let n = s.k.len();
        let sign = match channel {
            Channel::Transmitted => 1.0,
            Channel::Reflected => -1.0,
        };
        let scale = 2f64.sqrt() * s.h / self.pair.c;
        let sig = &s.sigma[channel_index(channel)];
        let weights: Vec<Vec<C>> = (0..2)
            .map(|i| {
                let f: Vec<C> = sig[i].iter().zip(&s.k).map(|(v, &k)| v * C::from_polar(1.0, sign * k * x1)).collect();
                let r = plan.retarded(&f);
                (0..n).map(|m| sig[i][m] * r[n - 1 - m] * scale).collect()
            })
            .collect();
        x2.par_iter()
            .map(|&y| {
                let mut out = [ZERO; 2];
                for (m, &k) in s.k.iter().enumerate() {
                    let ph = C::from_polar(1.0, sign * k * y);
                    out[0] += weights[0][m] * ph;
                    out[1] += weights[1][m] * ph;
                }
                out
            })
            .collect()
    }

    /// Free two-excitation Green matrix between doubly occupied qubit sites.
    pub fn green_dd(&self, e: f64) -> Result<GreenMatrices> {
        let blocks = self.converge("green_dd", &[], |w, h| {
            let s = self.spectral(e, w, h)?;
            let plan = HilbertPlan::new(s.k.len());
            let (g, c) = self.g_dd_on(&s, &plan);
            Ok(vec![g.iter().copied().collect(), c.iter().map(|&v| C::new(v, 0.0)).collect()])
        })?;
        Ok(GreenMatrices { g_dd: Matrix2::from_column_slice(&blocks[0]), completeness: [blocks[1][0].re, blocks[1][1].re] })
    }

    /// Row (G_1(x1, x2), G_2(x1, x2)) for both photons in the given output region.
    pub fn green_xd(&self, x1: f64, x2: f64, channel: Channel, e: f64) -> Result<[C; 2]> {
        self.check_region(channel, &[x1, x2])?;
        let blocks = self.converge("green_xd", &[], |w, h| {
            let s = self.spectral(e, w, h)?;
            let plan = HilbertPlan::new(s.k.len());
            Ok(vec![self.g_xd_on(&s, &plan, channel, x1, &[x2])[0].to_vec()])
        })?;
        Ok([blocks[0][0], blocks[0][1]])
    }

    /// Symmetrized product state projected on two photon coordinates.
    pub fn noninteracting_amplitude(&self, x1: PhotonCoord, x2: PhotonCoord, input: &TwoPhotonInput) -> C {
        let a = pair_amplitudes(input.k1, &self.pair);
        let b = pair_amplitudes(input.k2, &self.pair);
        let f = |amp: &ScatteringAmplitudes, p: PhotonCoord| photon_field(p.x, p.mover, amp, &self.pair);
        f(&a, x1) * f(&b, x2) + f(&a, x2) * f(&b, x1)
    }

    /// ⟨d_i d_i|φ2⟩ = √2 e_i(k1) e_i(k2).
    pub fn noninteracting_qubit_amplitudes(&self, input: &TwoPhotonInput) -> [C; 2] {
        let a = pair_amplitudes(input.k1, &self.pair);
        let b = pair_amplitudes(input.k2, &self.pair);
        [0, 1].map(|i| 2f64.sqrt() * a.e(i) * b.e(i))
    }

    fn correction_coefficients(&self, g: &Matrix2<C>, phi_dd: &[C; 2]) -> Result<(Vec<usize>, DVector<C>)> {
        let sites = self.active_sites();
        let n = sites.len();
        let gm = DMatrix::from_fn(n, n, |a, b| g[(sites[a], sites[b])]);
        let sv = gm.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if cond > MAX_CONDITION {
            return Err(WqedError::SingularMatrix { op: "interacting_wavefunction", cond });
        }
        let rhs = DVector::from_fn(n, |a, _| phi_dd[sites[a]]);
        let coef = gm.lu().solve(&rhs).ok_or(WqedError::SingularMatrix { op: "interacting_wavefunction", cond })?;
        Ok((sites, coef))
    }

    fn line_amplitudes(&self, channel: Channel, x1: f64, x2: &[f64], input: &TwoPhotonInput) -> Result<Vec<C>> {
        self.check_region(channel, &[x1])?;
        self.check_region(channel, x2)?;
        let e = input.energy(self.pair.c);
        let phi_dd = self.noninteracting_qubit_amplitudes(input);
        let coord = |x: f64| match channel {
            Channel::Transmitted => PhotonCoord::right(x),
            Channel::Reflected => PhotonCoord::left(x),
        };
        // ψ2 can vanish (perfect antibunching), so its accuracy is judged against |φ2|.
        let phi_scale = x2.iter().map(|&y| self.noninteracting_amplitude(coord(x1), coord(y), input).norm()).fold(0.0, f64::max);
        let mut blocks = self.converge("interacting_wavefunction", &[0.0, phi_scale], |w, h| {
            let s = self.spectral(e, w, h)?;
            let plan = HilbertPlan::new(s.k.len());
            let (g, _) = self.g_dd_on(&s, &plan);
            let (sites, coef) = self.correction_coefficients(&g, &phi_dd)?;
            let rows = self.g_xd_on(&s, &plan, channel, x1, x2);
            let psi: Vec<C> = rows
                .iter()
                .zip(x2)
                .map(|(row, &y)| {
                    let corr: C = sites.iter().zip(coef.iter()).map(|(&i, c)| row[i] * c).sum();
                    self.noninteracting_amplitude(coord(x1), coord(y), input) - corr
                })
                .collect();
            Ok(vec![g.iter().copied().collect(), psi])
        })?;
        Ok(blocks.pop().unwrap_or_default())
    }

    /// ψ2(x1, x2) with both coordinates in the output region of `channel`.
    pub fn interacting_wavefunction(&self, x1: f64, x2: f64, channel: Channel, input: &TwoPhotonInput) -> Result<C> {
        Ok(self.line_amplitudes(channel, x1, &[x2], input)?[0])
    }

    /// Default reference point one unit of length outside the scatterer.
    pub fn default_x_c(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Transmitted => self.pair.position[1] + self.pair.c,
            Channel::Reflected => self.pair.position[0] - self.pair.c,
        }
    }

    /// ψ2(x_c, x_c ± cτ) for degenerate input at wavevector k; the second photon trails the
    /// first along its direction of motion.
    pub fn two_photon_state(&self, channel: Channel, x_c: f64, tau_grid: &[f64], k: f64) -> Result<TwoPhotonState> {
        if tau_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(WqedError::Domain("delays must be finite and >= 0".into()));
        }
        let a = pair_amplitudes(k, &self.pair);
        let amp = match channel {
            Channel::Transmitted => a.t_k,
            Channel::Reflected => a.r_k,
        };
        if amp.norm() < 1e-10 {
            return Err(WqedError::Normalization { amplitude: amp.norm() });
        }
        let c = self.pair.c;
        let x2: Vec<f64> = match channel {
            Channel::Transmitted => tau_grid.iter().map(|t| x_c + c * t).collect(),
            Channel::Reflected => tau_grid.iter().map(|t| x_c - c * t).collect(),
        };
        let samples = self.line_amplitudes(channel, x_c, &x2, &TwoPhotonInput::degenerate(k))?;
        Ok(TwoPhotonState { channel, x_c, tau_grid: tau_grid.to_vec(), samples, normalization: 2.0 * amp.norm_sqr() / (2.0 * PI) })
    }

    /// Normalized intensity correlation of the output in one channel.
    pub fn g2(&self, tau_grid: &[f64], k: f64, channel: Channel) -> Result<Vec<(f64, f64)>> {
        Ok(self.two_photon_state(channel, self.default_x_c(channel), tau_grid, k)?.g2())
    }
}

pub fn noninteracting_amplitude(x1: PhotonCoord, x2: PhotonCoord, input: &TwoPhotonInput, params: &SystemParams) -> Result<C> {
    Ok(TwoPhotonSolver::new(params, &QuadratureSettings::default())?.noninteracting_amplitude(x1, x2, input))
}

pub fn green_dd(e: f64, params: &SystemParams, quad: &QuadratureSettings) -> Result<GreenMatrices> {
    TwoPhotonSolver::new(params, quad)?.green_dd(e)
}

pub fn green_xd(x1: f64, x2: f64, channel: Channel, e: f64, params: &SystemParams, quad: &QuadratureSettings) -> Result<[C; 2]> {
    TwoPhotonSolver::new(params, quad)?.green_xd(x1, x2, channel, e)
}

pub fn interacting_wavefunction(
    x1: f64,
    x2: f64,
    channel: Channel,
    input: &TwoPhotonInput,
    params: &SystemParams,
    quad: &QuadratureSettings,
) -> Result<C> {
    TwoPhotonSolver::new(params, quad)?.interacting_wavefunction(x1, x2, channel, input)
}

pub fn g2(tau_grid: &[f64], k: f64, channel: Channel, params: &SystemParams, quad: &QuadratureSettings) -> Result<Vec<(f64, f64)>> {
    TwoPhotonSolver::new(params, quad)?.g2(tau_grid, k, channel)
}

//! Tight-binding oracle for the two-photon scattering state.
//!
//! The waveguide is an infinite chain with hopping J and spacing a, the qubits are bosonic
//! sites with on-site repulsion U side-coupled to chain sites 0 and N. Everything is built
//! from closed-form lattice propagators:
//!
//! - chain: G(n, m; ω) = e^{iθ|n-m|} / (2iJ sin θ), ω = ω0 - 2J cos θ
//! - qubits: g(ω) = [ω - ω0 + iΓ'/2 - g² G(n_i, n_j)]^{-1}
//! - two bosons: G2(αβ; jj) = (i/2π) ∫ G(α, j; ω) G(β, j; E - ω) dω
//!
//! and the scattering state is Ψ = Ψ0 + G2_xd (1/U - G2_dd)^{-1} Ψ0_d. The wavevector at ω0
//! is π/2a, where the dispersion has no curvature, and ω0 L/c = Nπ/2 modulo 2π fixes which N
//! are allowed. J = c/2a and g² = ΓJ reproduce the continuum group velocity and decay rate.
//!
//! Only E = 2ω0 is supported: then ω and E - ω leave the band at the same points.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64 as C;
use wqed_core::SystemParams;

const I: C = C::new(0.0, 1.0);
const GAUSS: usize = 16;
/// Half-width of the resonant region integrated in ω rather than θ.
const CORE: f64 = 20.0;
const CORE_PANEL: f64 = 0.05;

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    // Newton on Legendre polynomials; fine for the small fixed order used here.
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn panels(a: f64, b: f64, width: f64, rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n)
        .flat_map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            rule.iter().map(move |&(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect()
}

pub struct Lattice {
    pub omega0: f64,
    pub gamma_prime: f64,
    pub n: i64,
    pub a: f64,
    pub length: f64,
    hop: f64,
    g: f64,
}

/// ψ2/φ2 at a set of photon site pairs for several U.
pub struct LatticeRatios {
    /// Indexed [u][pair]; U = ∞ is the hard-core limit.
    pub values: Vec<Vec<C>>,
    pub g_dd: Matrix2<C>,
}

impl Lattice {
    /// Chain with `n` sites between the qubits. Panics unless ω0 L/c = nπ/2 modulo 2π.
    pub fn new(params: &SystemParams, n: i64) -> Self {
        let length = params.length();
        let mismatch = (params.k0l - n as f64 * PI / 2.0).rem_euclid(2.0 * PI);
        assert!(mismatch.min(2.0 * PI - mismatch) < 1e-9, "k0L incompatible with {n} sites");
        let a = length / n as f64;
        let hop = params.c / (2.0 * a);
        Lattice { omega0: params.omega0, gamma_prime: params.gamma_prime, n, a, length, hop, g: (params.gamma * hop).sqrt() }
    }

    /// Coordinate of chain site `m` counted from qubit 2.
    pub fn position(&self, m: i64) -> f64 {
        self.length + m as f64 * self.a
    }

    /// Nearest site to `x`, counted from qubit 2.
    pub fn site(&self, x: f64) -> i64 {
        ((x - self.length) / self.a).round() as i64
    }

    fn theta(&self, omega: f64) -> f64 {
        (-(omega - self.omega0) / (2.0 * self.hop)).clamp(-1.0, 1.0).acos()
    }

    fn chain(&self, theta: f64, d: i64) -> C {
        (I * theta * d.abs() as f64).exp() / (2.0 * I * self.hop * theta.sin())
    }

    fn qubits(&self, omega: f64, theta: f64) -> Matrix2<C> {
        let g2 = self.g * self.g;
        let diag = C::new(omega - self.omega0, self.gamma_prime / 2.0) - g2 * self.chain(theta, 0);
        let off = -g2 * self.chain(theta, self.n);
        Matrix2::new(diag, off, off, diag).try_inverse().expect("qubit propagator")
    }

    /// G(site, qubit j; ω) for chain site `m` counted from qubit 2.
    fn photon_qubit(&self, theta: f64, q: &Matrix2<C>, m: i64, j: usize) -> C {
        let from = [m + self.n, m];
        (0..2).map(|s| self.chain(theta, from[s]) * self.g * q[(s, j)]).sum()
    }

    /// Quadrature nodes (ω, weight) over the band, fine enough for photons up to `reach`
    /// sites from the qubits.
    fn nodes(&self, reach: f64) -> Vec<f64> {
        let rule = gauss_legendre(GAUSS);
        let mut out: Vec<(f64, f64)> = panels(self.omega0 - CORE, self.omega0 + CORE, CORE_PANEL, &rule);
        let width = (PI / (4.0 * reach.max(1.0))).min(0.05);
        let t_hi = (CORE / (2.0 * self.hop)).acos();
        let t_lo = (-CORE / (2.0 * self.hop)).acos();
        for (a, b) in [(0.0, t_hi), (t_lo, PI)] {
            for (t, w) in panels(a, b, width, &rule) {
                out.push((self.omega0 - 2.0 * self.hop * t.cos(), w * 2.0 * self.hop * t.sin()));
            }
        }
        out.into_iter().flat_map(|(o, w)| [o, w]).collect()
    }

    /// ψ2/φ2 for both photons at chain sites `pairs` (counted from qubit 2), incident
    /// photons at ω0 each.
    pub fn ratios(&self, pairs: &[(i64, i64)], us: &[f64]) -> LatticeRatios {
        let e = 2.0 * self.omega0;
        let reach = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + self.n;
        let nodes = self.nodes(reach as f64);
        let mut g_dd = Matrix2::<C>::zeros();
        let mut g_xd = vec![[C::new(0.0, 0.0); 2]; pairs.len()];
        let a0 = C::new(self.omega0, -self.gamma_prime / 2.0);
        for nw in nodes.chunks(2) {
            let (omega, w) = (nw[0], nw[1]);
            let th = self.theta(omega);
            let thp = PI - th;
            let q = self.qubits(omega, th);
            let qp = self.qubits(e - omega, thp);
            // Free qubit propagators are subtracted here and added back exactly below.
            let free = 1.0 / ((omega - a0) * (e - omega - a0));
            for i in 0..2 {
                for j in 0..2 {
                    let v = q[(i, j)] * qp[(i, j)] - if i == j { free } else { C::new(0.0, 0.0) };
                    g_dd[(i, j)] += v * w;
                }
            }
            for (slot, &(m1, m2)) in g_xd.iter_mut().zip(pairs) {
                for (j, s) in slot.iter_mut().enumerate() {
                    *s += self.photon_qubit(th, &q, m1, j) * self.photon_qubit(thp, &qp, m2, j) * w;
                }
            }
        }
        let c = I / (2.0 * PI);
        g_dd *= c;
        let full = 1.0 / (e - 2.0 * a0);
        g_dd[(0, 0)] += full;
        g_dd[(1, 1)] += full;
        for s in g_xd.iter_mut() {
            s[0] *= c;
            s[1] *= c;
        }

        let th0 = PI / 2.0;
        let q0 = self.qubits(self.omega0, th0);
        let wave = |n: i64| (I * th0 * n as f64).exp();
        let inc = nalgebra::Vector2::new(wave(0) * self.g, wave(self.n) * self.g);
        let amp = q0 * inc;
        let phi = |m: i64| wave(m + self.n) + (0..2).map(|s| self.chain(th0, [m + self.n, m][s]) * self.g * amp[s]).sum::<C>();
        let psi_d = nalgebra::Vector2::new(amp[0] * amp[0], amp[1] * amp[1]);

        let values = us
            .iter()
            .map(|&u| {
                let inv_u = if u.is_infinite() { C::new(0.0, 0.0) } else { C::new(1.0 / u, 0.0) };
                let t = (Matrix2::identity() * inv_u - g_dd).try_inverse().expect("T matrix");
                let coef = t * psi_d;
                pairs.iter().zip(&g_xd).map(|(&(m1, m2), gx)| 1.0 + (gx[0] * coef[0] + gx[1] * coef[1]) / (phi(m1) * phi(m2))).collect()
            })
            .collect();
        LatticeRatios { values, g_dd }
    }
}

/// Value at h = 0 of the polynomial through (h_i, v_i).
pub fn extrapolate_to_zero(h: &[f64], v: &[C]) -> C {
    let mut p = v.to_vec();
    for k in 1..p.len() {
        for i in (k..p.len()).rev() {
            p[i] = (p[i] * h[i - k] - p[i - 1] * h[i]) / (h[i - k] - h[i]);
        }
    }
    p[p.len() - 1]
}

//! Complex poles of the single-excitation qubit Green function.
//!
//! The poles are the zeros of
//!
//! ```text
//! F(ω) = [ω - ω0 + i(Γ+Γ')/2]² + (Γ²/4) e^{2iωL/c}
//! ```
//!
//! which factorizes exactly as F = F_S F_A with F_S,A(ω) = ω - ω0 + i(Γ+Γ')/2 ± i(Γ/2) e^{iωL/c}.
//! F_S carries the symmetric collective mode and F_A the antisymmetric one: at L = 0 their
//! single roots are the superradiant and subradiant states. For L > 0 each factor has
//! infinitely many roots. The S (A) pole is the root of F_S (F_A) closest to (ω0, 0); the
//! rest are collective poles C(n).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, WqedError};
use crate::params::{ContinuationSettings, SystemParams};

type C = Complex64;

const I: C = C::new(0.0, 1.0);
const DEDUP: f64 = 1e-6;
const MAX_RESIDUAL: f64 = 1e-10;
/// Half-size of the box around (ω0, 0) searched for the S and A poles during continuation.
const TRACK_BOX: f64 = 3.0;
/// Distance at which another pole spoils the two-pole picture.
const BREAKDOWN_DISTANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Symmetric,
    Antisymmetric,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Symmetric => 1.0,
            Branch::Antisymmetric => -1.0,
        }
    }
}

/// S and A are the symmetric and antisymmetric collective states; `C(n)` counts the other
/// poles outward from ω0, positive n above ω0 and negative n below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleLabel {
    S,
    A,
    C(i32),
}

impl std::fmt::Display for PoleLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoleLabel::S => write!(f, "S"),
            PoleLabel::A => write!(f, "A"),
            PoleLabel::C(n) => write!(f, "C{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleRecord {
    pub omega: C,
    /// -2 Im ω.
    pub gamma_eff: f64,
    pub label: PoleLabel,
    pub branch: Branch,
    pub k0l: f64,
    /// |F(ω)|; zero for closed-form Markov poles.
    pub residual: f64,
}

impl PoleRecord {
    fn new(omega: C, label: PoleLabel, branch: Branch, params: &SystemParams, residual: f64) -> Self {
        PoleRecord { omega, gamma_eff: -2.0 * omega.im, label, branch, k0l: params.k0l, residual }
    }

    /// Transition frequency relative to ω0.
    pub fn detuning(&self, omega0: f64) -> f64 {
        self.omega.re - omega0
    }
}

/// Axis-aligned rectangle in the complex ω plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    /// Rectangle given relative to ω0 in the real direction.
    pub fn around(omega0: f64, half_width: f64, im_min: f64, im_max: f64) -> Self {
        Rect { re_min: omega0 - half_width, re_max: omega0 + half_width, im_min, im_max }
    }

    pub fn contains(&self, z: C) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

fn validated(params: &SystemParams) -> Result<SystemParams> {
    params.validate()
}

/// F(ω).
pub fn f_value(omega: C, params: &SystemParams) -> C {
    let a = omega - params.omega0 + I * ((params.gamma + params.gamma_prime) / 2.0);
    let ph = (2.0 * I * omega * params.length() / params.c).exp();
    a * a + params.gamma * params.gamma / 4.0 * ph
}

/// F_S or F_A at ω and its derivative.
fn branch_value(omega: C, params: &SystemParams, branch: Branch) -> (C, C) {
    let tau = params.length() / params.c;
    let e = (I * omega * tau).exp();
    let coupling = I * (branch.sign() * params.gamma / 2.0);
    let v = omega - params.omega0 + I * ((params.gamma + params.gamma_prime) / 2.0) + coupling * e;
    let d = C::new(1.0, 0.0) + coupling * I * tau * e;
    (v, d)
}

fn newton(seed: C, params: &SystemParams, branch: Branch, tol: f64, max_iter: u32) -> Option<C> {
    let mut z = seed;
    for _ in 0..max_iter {
        let (v, d) = branch_value(z, params, branch);
        if v.norm() < tol {
            return Some(z);
        }
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
    }
    let (v, _) = branch_value(z, params, branch);
    (v.norm() < tol).then_some(z)
}

/// Closed-form poles with the retardation phase frozen at ω0: ω_S,A = ω0 ± Ω12 and
/// Γ_S,A = Γ + Γ' ± Γ12.
pub fn markov_poles(params: &SystemParams) -> Result<(PoleRecord, PoleRecord)> {
    let p = validated(params)?;
    let omega12 = p.gamma / 2.0 * p.k0l.sin();
    let gamma12 = p.gamma * p.k0l.cos();
    let total = p.gamma + p.gamma_prime;
    let s = C::new(p.omega0 + omega12, -(total + gamma12) / 2.0);
    let a = C::new(p.omega0 - omega12, -(total - gamma12) / 2.0);
    Ok((PoleRecord::new(s, PoleLabel::S, Branch::Symmetric, &p, 0.0), PoleRecord::new(a, PoleLabel::A, Branch::Antisymmetric, &p, 0.0)))
}

/// Roots of one factor found from a grid of Newton seeds covering `rect`, plus the extra
/// seeds given; only roots inside `rect` are kept.
fn branch_roots(rect: &Rect, params: &SystemParams, branch: Branch, spacing: f64, extra: &[C], tol: f64, max_iter: u32) -> Vec<C> {
    let nx = ((rect.re_max - rect.re_min) / spacing).ceil() as usize + 1;
    let ny = ((rect.im_max - rect.im_min) / spacing).ceil() as usize + 1;
    let mut seeds: Vec<C> = Vec::with_capacity(nx * ny + extra.len());
    seeds.extend_from_slice(extra);
    for i in 0..nx {
        for j in 0..ny {
            let re = rect.re_min + (rect.re_max - rect.re_min) * i as f64 / (nx - 1).max(1) as f64;
            let im = rect.im_min + (rect.im_max - rect.im_min) * j as f64 / (ny - 1).max(1) as f64;
            seeds.push(C::new(re, im));
        }
    }
    let mut roots: Vec<C> = Vec::new();
    for z in seeds.iter().filter_map(|&s| newton(s, params, branch, tol, max_iter)) {
        if rect.contains(z) && roots.iter().all(|r| (r - z).norm() > DEDUP) {
            roots.push(z);
        }
    }
    roots
}

fn closest_to(origin: C, roots: &[C]) -> Option<C> {
    roots.iter().copied().min_by(|a, b| (a - origin).norm().total_cmp(&(b - origin).norm()))
}

/// One step of the pole traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub k0l: f64,
    pub s: PoleRecord,
    pub a: PoleRecord,
    /// Another pole lies within 0.5Γ of S or A, so two-pole results are unreliable here.
    pub two_pole_breakdown: bool,
}

fn seed_spacing(params: &SystemParams) -> f64 {
    // Roots of one factor are about 2πc/L apart along the real direction.
    let natural = 2.0 * PI * params.c / params.length().max(1e-12);
    (natural / 8.0).clamp(0.05, 0.25) * (params.gamma + params.gamma_prime)
}

fn trace_point(params: &SystemParams, tracked: [C; 2], settings: &ContinuationSettings) -> Option<TracePoint> {
    let origin = C::new(params.omega0, 0.0);
    let rect = Rect::around(params.omega0, TRACK_BOX * params.gamma, -TRACK_BOX * params.gamma, 0.0);
    let spacing = seed_spacing(params);
    let found: Vec<(Branch, Vec<C>, C)> = [Branch::Symmetric, Branch::Antisymmetric]
        .par_iter()
        .zip(tracked.par_iter())
        .map(|(&b, &prev)| {
            let cont = newton(prev, params, b, settings.newton_tol, settings.max_iter);
            let extra: Vec<C> = cont.into_iter().collect();
            let roots = branch_roots(&rect, params, b, spacing, &extra, settings.newton_tol, settings.max_iter);
            (b, roots, cont.unwrap_or(C::new(f64::NAN, f64::NAN)))
        })
        .collect();
    let mut chosen = [C::new(0.0, 0.0); 2];
    for (i, (_, roots, cont)) in found.iter().enumerate() {
        if !cont.re.is_finite() {
            return None;
        }
        let mut pool = roots.clone();
        if pool.iter().all(|r| (r - cont).norm() > DEDUP) {
            pool.push(*cont);
        }
        chosen[i] = closest_to(origin, &pool)?;
    }
    let breakdown = found
        .iter()
        .flat_map(|(_, roots, _)| roots.iter())
        .any(|r| chosen.iter().all(|c| (r - c).norm() > DEDUP) && chosen.iter().any(|c| (r - c).norm() < BREAKDOWN_DISTANCE * params.gamma));
    let rec = |z: C, label, branch| PoleRecord::new(z, label, branch, params, f_value(z, params).norm());
    Some(TracePoint {
        k0l: params.k0l,
        s: rec(chosen[0], PoleLabel::S, Branch::Symmetric),
        a: rec(chosen[1], PoleLabel::A, Branch::Antisymmetric),
        two_pole_breakdown: breakdown,
    })
}

/// S and A poles from k0L = 0 up to `k0l_target` in steps of `settings.step_k0l`.
///
/// Each factor's previous root seeds Newton at the next step; because roots of a factor
/// can overtake each other as the nearest to ω0, each step also scans a box around ω0 and
/// keeps the nearest root. A failed step is retried with the step halved, up to ten times.
pub fn continue_poles(k0l_target: f64, params: &SystemParams, settings: &ContinuationSettings) -> Result<Vec<TracePoint>> {
    let p = validated(&params.with_k0l(0.0))?;
    let settings = settings.validate()?;
    if !(k0l_target >= 0.0 && k0l_target.is_finite()) {
        return Err(WqedError::Domain(format!("k0L target must be finite and >= 0, got {k0l_target}")));
    }
    let (ms, ma) = markov_poles(&p)?;
    let first = trace_point(&p, [ms.omega, ma.omega], &settings).ok_or(WqedError::Continuation { k0l: 0.0 })?;
    let mut trace = vec![first];
    let mut k = 0.0;
    let mut step = settings.step_k0l;
    let mut halvings = 0;
    while k < k0l_target - 1e-12 {
        let next = (k + step).min(k0l_target);
        let last = trace.last().copied().unwrap_or(first);
        match trace_point(&p.with_k0l(next), [last.s.omega, last.a.omega], &settings) {
            Some(point) if (point.s.omega - point.a.omega).norm() < settings.newton_tol => {
                return Err(WqedError::Collision { k0l: next });
            }
            Some(point) => {
                trace.push(point);
                k = next;
                if halvings > 0 {
                    halvings -= 1;
                    step *= 2.0;
                }
            }
            None => {
                if halvings == 10 {
                    return Err(WqedError::Continuation { k0l: next });
                }
                halvings += 1;
                step /= 2.0;
            }
        }
    }
    Ok(trace)
}

/// S and A poles at each k0L of `grid` (any order), continued from k0L = 0.
pub fn poles_on_grid(grid: &[f64], params: &SystemParams, settings: &ContinuationSettings) -> Result<Vec<TracePoint>> {
    let top = grid.iter().copied().fold(0.0, f64::max);
    if grid.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
        return Err(WqedError::Domain("k0L grid must be finite and >= 0".into()));
    }
    let trace = continue_poles(top, params, settings)?;
    grid.par_iter()
        .map(|&k| {
            let i = trace.partition_point(|t| t.k0l <= k).saturating_sub(1);
            let seed = trace[i];
            if seed.k0l == k {
                return Ok(seed);
            }
            trace_point(&params.with_k0l(k), [seed.s.omega, seed.a.omega], settings).ok_or(WqedError::Continuation { k0l: k })
        })
        .collect()
}

/// Net number of zeros of F inside `rect`, from the change of arg F along its boundary.
/// Segments are subdivided until arg F changes by less than π/2 across each.
pub fn winding_number(rect: &Rect, params: &SystemParams) -> i64 {
    let corners =
        [C::new(rect.re_min, rect.im_min), C::new(rect.re_max, rect.im_min), C::new(rect.re_max, rect.im_max), C::new(rect.re_min, rect.im_max)];
    let mut total = 0.0;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        total += arg_change(a, b, params, 0);
    }
    (total / (2.0 * PI)).round() as i64
}

fn arg_change(a: C, b: C, params: &SystemParams, depth: u32) -> f64 {
    let fa = f_value(a, params);
    let fb = f_value(b, params);
    let d = (fb / fa).arg();
    if (d.abs() < PI / 4.0 && depth >= 4) || depth >= 40 {
        return d;
    }
    let m = (a + b) / 2.0;
    let fm = f_value(m, params);
    let d1 = (fm / fa).arg();
    let d2 = (fb / fm).arg();
    if depth >= 4 && d1.abs() < PI / 2.0 && d2.abs() < PI / 2.0 && (d1 + d2 - d).abs() < 1e-9 {
        return d;
    }
    arg_change(a, m, params, depth + 1) + arg_change(m, b, params, depth + 1)
}

/// All zeros of F in `rect`, checked against the argument principle.
///
/// S and A are the roots of F_S and F_A nearest (ω0, 0) when they lie inside the
/// rectangle. The remaining roots are labelled C1, C2, … upward in frequency from ω0 and
/// C-1, C-2, … downward.
pub fn enumerate_poles(rect: &Rect, params: &SystemParams) -> Result<Vec<PoleRecord>> {
    let p = validated(params)?;
    if !(rect.re_min < rect.re_max && rect.im_min < rect.im_max) {
        return Err(WqedError::Domain("empty rectangle".into()));
    }
    let settings = ContinuationSettings::default();
    let extent = (rect.re_max - rect.re_min).max(rect.im_max - rect.im_min);
    let spacing = seed_spacing(&p).min((rect.re_max - rect.re_min) / 8.0).min((rect.im_max - rect.im_min) / 8.0).max(extent / 400.0);
    let origin = C::new(p.omega0, 0.0);
    let mut poles = Vec::new();
    for branch in [Branch::Symmetric, Branch::Antisymmetric] {
        let roots = branch_roots(rect, &p, branch, spacing, &[], settings.newton_tol, settings.max_iter);
        let nearest = closest_to(origin, &roots);
        for z in roots {
            let label = match (Some(z) == nearest, branch) {
                (true, Branch::Symmetric) => PoleLabel::S,
                (true, Branch::Antisymmetric) => PoleLabel::A,
                _ => PoleLabel::C(0),
            };
            poles.push(PoleRecord::new(z, label, branch, &p, f_value(z, &p).norm()));
        }
    }
    let expected = winding_number(rect, &p);
    if expected != poles.len() as i64 {
        return Err(WqedError::IncompleteEnumeration { expected, found: poles.len() });
    }
    if let Some(bad) = poles.iter().find(|r| r.residual >= MAX_RESIDUAL * (p.gamma + p.gamma_prime).powi(2)) {
        return Err(WqedError::Convergence { op: "enumerate_poles", detail: format!("residual {:.2e}", bad.residual) });
    }
    poles.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re));
    let above: Vec<usize> = (0..poles.len()).filter(|&i| poles[i].label == PoleLabel::C(0) && poles[i].omega.re >= p.omega0).collect();
    let below: Vec<usize> = (0..poles.len()).rev().filter(|&i| poles[i].label == PoleLabel::C(0) && poles[i].omega.re < p.omega0).collect();
    for (n, &i) in above.iter().enumerate() {
        poles[i].label = PoleLabel::C(n as i32 + 1);
    }
    for (n, &i) in below.iter().enumerate() {
        poles[i].label = PoleLabel::C(-(n as i32 + 1));
    }
    Ok(poles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn factors_multiply_to_f() {
        let p = SystemParams::new(0.1, 7.3);
        let z = C::new(100.4, -0.3);
        let (s, _) = branch_value(z, &p, Branch::Symmetric);
        let (a, _) = branch_value(z, &p, Branch::Antisymmetric);
        assert_abs_diff_eq!((s * a - f_value(z, &p)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn colocated_markov_rates() {
        let (s, a) = markov_poles(&SystemParams::new(0.1, 0.0)).unwrap();
        assert_abs_diff_eq!(s.gamma_eff, 2.1, epsilon = 1e-15);
        assert_abs_diff_eq!(a.gamma_eff, 0.1, epsilon = 1e-15);
        assert!(f_value(s.omega, &SystemParams::new(0.1, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn half_wavelength_markov_rates() {
        let (s, a) = markov_poles(&SystemParams::new(0.1, PI)).unwrap();
        assert_abs_diff_eq!(s.gamma_eff, 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(a.gamma_eff, 2.1, epsilon = 1e-14);
        assert_abs_diff_eq!(s.omega.re, 100.0, epsilon = 1e-14);
    }

    #[test]
    fn winding_counts_colocated_poles() {
        let p = SystemParams::new(0.1, 0.0);
        assert_eq!(winding_number(&Rect::around(100.0, 4.0, -2.0, 0.0), &p), 2);
        assert_eq!(winding_number(&Rect::around(100.0, 4.0, -0.5, 0.0), &p), 1);
    }

    #[test]
    fn long_separation_spectrum() {
        let p = SystemParams::new(0.1, 100.5 * PI);
        let poles = enumerate_poles(&Rect::around(100.0, 4.0, -2.0, 0.0), &p).unwrap();
        assert_eq!(poles.len(), 10);
        let find = |l| poles.iter().find(|r| r.label == l).unwrap();
        assert_abs_diff_eq!(find(PoleLabel::S).detuning(100.0), 0.31757, epsilon = 1e-4);
        assert_abs_diff_eq!(find(PoleLabel::A).detuning(100.0), -0.31757, epsilon = 1e-4);
        assert_abs_diff_eq!(find(PoleLabel::S).gamma_eff, 0.10505, epsilon = 1e-4);
        for (n, re, g) in [(1, 1.07948, 0.51031), (2, 2.00728, 0.88139), (3, 2.98340, 1.13149), (4, 3.97161, 1.31294)] {
            for sign in [1, -1] {
                let c = find(PoleLabel::C(sign * n));
                assert_abs_diff_eq!(c.detuning(100.0), sign as f64 * re, epsilon = 1e-4);
                assert_abs_diff_eq!(c.gamma_eff, g, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn weak_coupling_leaves_two_lossy_poles() {
        let p = SystemParams { gamma: 1e-8, ..SystemParams::new(0.1, PI / 2.0) };
        let poles = enumerate_poles(&Rect::around(100.0, 4.0, -2.0, 0.0), &p).unwrap();
        assert_eq!(poles.len(), 2);
        for r in poles {
            assert_abs_diff_eq!((r.omega - C::new(100.0, -0.05)).norm(), 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn continuation_starts_on_markov_poles() {
        let tr = continue_poles(0.01 * PI, &SystemParams::new(0.1, 0.0), &ContinuationSettings::default()).unwrap();
        let last = tr.last().unwrap();
        let (s, a) = markov_poles(&SystemParams::new(0.1, last.k0l)).unwrap();
        assert!((last.s.omega - s.omega).norm() < 1e-3);
        assert!((last.a.omega - a.omega).norm() < 1e-3);
    }

    #[test]
    fn continuation_reaches_long_separation() {
        let settings = ContinuationSettings { step_k0l: 0.05 * PI, ..Default::default() };
        let tr = continue_poles(100.5 * PI, &SystemParams::new(0.1, 0.0), &settings).unwrap();
        let last = tr.last().unwrap();
        assert_abs_diff_eq!(last.k0l, 100.5 * PI, epsilon = 1e-9);
        assert_abs_diff_eq!(last.s.detuning(100.0), 0.31757, epsilon = 1e-4);
        assert_abs_diff_eq!(last.a.detuning(100.0), -0.31757, epsilon = 1e-4);
        assert!(tr.iter().all(|t| t.s.residual < 1e-10 && t.a.residual < 1e-10));
    }

    #[test]
    fn bad_target_rejected() {
        let err = continue_poles(-1.0, &SystemParams::new(0.1, 0.0), &ContinuationSettings::default());
        assert!(matches!(err, Err(WqedError::Domain(_))));
    }
}

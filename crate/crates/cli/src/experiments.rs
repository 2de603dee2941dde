//! Experiment runners. Each reads its settings from the [`Config`] with figure-specific
//! defaults and returns the data to write.

use std::f64::consts::PI;

use serde_json::json;
use wqed_core::{
    concurrence_scan, enumerate_poles, markov_poles, poles_on_grid, transmission_map, Channel, CollectiveSource, ConcurrencePoint,
    ContinuationSettings, DriveParams, QuadratureSettings, Rect, SystemParams, TwoPhotonSolver,
};

use crate::config::Config;
use crate::output::{Output, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Map,
    G2,
    Poles,
    PoleList,
    Concurrence,
}

/// Figure presets. `custom` uses the same runners with the `kind` key choosing one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig1Map,
    Fig2G2,
    Fig3G2,
    Fig4Poles,
    Fig5Concurrence,
    FigS1Poles,
    Custom,
}

impl Experiment {
    pub const NAMES: [&'static str; 7] = ["fig1-map", "fig2-g2", "fig3-g2", "fig4-poles", "fig5-concurrence", "figS1-poles", "custom"];

    pub fn parse(s: &str) -> Result<Self, CliError> {
        use Experiment::*;
        let all = [Fig1Map, Fig2G2, Fig3G2, Fig4Poles, Fig5Concurrence, FigS1Poles, Custom];
        Self::NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| all[i])
            .ok_or_else(|| CliError::Config(format!("config: unknown experiment `{s}`, expected one of {}", Self::NAMES.join(", "))))
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    pub fn default_format(self, cfg: &Config) -> &'static str {
        let pole_list = self == Experiment::FigS1Poles || (self == Experiment::Custom && cfg.raw("kind") == Some("pole-list"));
        if pole_list {
            "json"
        } else {
            "csv"
        }
    }
}

fn system(cfg: &Config, gamma_prime: f64) -> Result<SystemParams, CliError> {
    Ok(SystemParams {
        omega0: cfg.f64("omega0", 100.0)?,
        gamma: cfg.f64("gamma", 1.0)?,
        gamma_prime: cfg.f64("gamma-prime", gamma_prime)?,
        c: cfg.f64("c", 1.0)?,
        k0l: 0.0,
    })
}

fn checked(p: SystemParams) -> Result<SystemParams, CliError> {
    p.validate().map_err(|e| CliError::core("params::validate", e))
}

fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![from];
    }
    (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect()
}

fn quadrature(cfg: &Config) -> Result<QuadratureSettings, CliError> {
    let d = QuadratureSettings::default();
    let max_refine = cfg.count("max-refine", d.max_refine as usize)?;
    QuadratureSettings {
        tol: cfg.f64("quad-tol", d.tol)?,
        window: cfg.f64("window", d.window)?,
        max_refine: u32::try_from(max_refine).map_err(|_| CliError::Config("config: `max-refine` too large".into()))?,
        mesh: cfg.f64("mesh", d.mesh)?,
    }
    .validate()
    .map_err(|e| CliError::core("params::QuadratureSettings", e))
}

fn continuation(cfg: &Config) -> Result<ContinuationSettings, CliError> {
    let d = ContinuationSettings::default();
    ContinuationSettings { step_k0l: cfg.f64("step", d.step_k0l)?, ..d }.validate().map_err(|e| CliError::core("params::ContinuationSettings", e))
}

pub fn run(exp: Experiment, cfg: &Config, format: &str) -> Result<Output, CliError> {
    let kind = match exp {
        Experiment::Fig1Map => Kind::Map,
        Experiment::Fig2G2 | Experiment::Fig3G2 => Kind::G2,
        Experiment::Fig4Poles => Kind::Poles,
        Experiment::Fig5Concurrence => Kind::Concurrence,
        Experiment::FigS1Poles => Kind::PoleList,
        Experiment::Custom => match cfg.raw("kind") {
            None => return Err(CliError::Config("config: custom runs need `kind` (map | g2 | poles | pole-list | concurrence)".into())),
            Some(_) => match cfg.choice("kind", &["map", "g2", "poles", "pole-list", "concurrence"])? {
                "map" => Kind::Map,
                "g2" => Kind::G2,
                "poles" => Kind::Poles,
                "pole-list" => Kind::PoleList,
                _ => Kind::Concurrence,
            },
        },
    };
    match kind {
        Kind::Map => transmission(cfg, exp),
        Kind::G2 => correlations(cfg, exp),
        Kind::Poles => pole_traces(cfg),
        Kind::PoleList => pole_list(cfg, format),
        Kind::Concurrence => entanglement(cfg, exp),
    }
}

/// Single-photon transmission over photon detuning and 2kL; lossless for the figure.
fn transmission(cfg: &Config, exp: Experiment) -> Result<Output, CliError> {
    let p = checked(system(cfg, if exp == Experiment::Fig1Map { 0.0 } else { 0.1 })?)?;
    let deltas = linspace(cfg.f64("delta-min", -3.0)?, cfg.f64("delta-max", 3.0)?, cfg.count("delta-points", 121)?);
    let phases = linspace(cfg.f64("phase-min", 0.0)?, cfg.f64("phase-max", 4.0 * PI)?, cfg.count("phase-points", 201)?);
    if deltas.iter().any(|d| p.omega0 + d <= 0.0) || phases.iter().any(|&x| x < 0.0) {
        return Err(CliError::Config("config: transmission map needs ω0 + δ > 0 and 2kL >= 0".into()));
    }
    let mut t = Table::new(&["delta", "two_kL", "T", "theta"]);
    for row in transmission_map(&deltas, &phases, &p) {
        for pt in row {
            t.push(vec![pt.delta.into(), pt.two_kl.into(), pt.transmission.into(), pt.phase.into()]);
        }
    }
    Ok(Output::Table(t))
}

/// g2(τ) of the transmitted and reflected light for a weak resonant coherent drive.
fn correlations(cfg: &Config, exp: Experiment) -> Result<Output, CliError> {
    let (k0ls, tau_max, tau_step): (&[f64], f64, f64) = match exp {
        Experiment::Fig3G2 => (&[25.5 * PI, 100.5 * PI], 60.0, 0.1),
        _ => (&[0.0, 0.5 * PI], 20.0, 0.05),
    };
    let base = system(cfg, 0.1)?;
    let k0ls = cfg.list("k0L", k0ls)?;
    let tau_max = cfg.f64("tau-max", tau_max)?;
    let tau_step = cfg.f64("tau-step", tau_step)?;
    if !(tau_max >= 0.0 && tau_step > 0.0) {
        return Err(CliError::Config("config: need tau-max >= 0 and tau-step > 0".into()));
    }
    let taus: Vec<f64> = (0..=(tau_max / tau_step + 1e-9).floor() as usize).map(|i| i as f64 * tau_step).collect();
    let k = (base.omega0 + cfg.f64("delta", 0.0)?) / base.c;
    let channels: &[(Channel, &str)] = match cfg.choice("channel", &["both", "transmitted", "reflected"])? {
        "transmitted" => &[(Channel::Transmitted, "transmitted")],
        "reflected" => &[(Channel::Reflected, "reflected")],
        _ => &[(Channel::Transmitted, "transmitted"), (Channel::Reflected, "reflected")],
    };
    let quad = quadrature(cfg)?;
    let mut t = Table::new(&["k0L", "channel", "tau", "g2"]);
    for k0l in k0ls {
        let p = checked(base.with_k0l(k0l))?;
        let solver = TwoPhotonSolver::new(&p, &quad).map_err(|e| CliError::core("two_photon::TwoPhotonSolver::new", e))?;
        for &(ch, name) in channels {
            for (tau, g) in solver.g2(&taus, k, ch).map_err(|e| CliError::core("two_photon::g2", e))? {
                t.push(vec![k0l.into(), name.into(), tau.into(), g.into()]);
            }
        }
    }
    Ok(Output::Table(t))
}

/// S and A poles from continuation next to their Markov values.
fn pole_traces(cfg: &Config) -> Result<Output, CliError> {
    let p = checked(system(cfg, 0.1)?)?;
    let grid = linspace(cfg.f64("k0L-min", 0.0)?, cfg.f64("k0L-max", 100.5 * PI)?, cfg.count("k0L-points", 2011)?);
    let settings = continuation(cfg)?;
    let trace = poles_on_grid(&grid, &p, &settings).map_err(|e| CliError::core("poles::poles_on_grid", e))?;
    let mut t = Table::new(&[
        "k0L",
        "omega_S",
        "Gamma_S",
        "omega_A",
        "Gamma_A",
        "omega_S_markov",
        "Gamma_S_markov",
        "omega_A_markov",
        "Gamma_A_markov",
        "two_pole_breakdown",
    ]);
    for tp in trace {
        let (ms, ma) = markov_poles(&p.with_k0l(tp.k0l)).map_err(|e| CliError::core("poles::markov_poles", e))?;
        t.push(vec![
            tp.k0l.into(),
            tp.s.omega.re.into(),
            tp.s.gamma_eff.into(),
            tp.a.omega.re.into(),
            tp.a.gamma_eff.into(),
            ms.omega.re.into(),
            ms.gamma_eff.into(),
            ma.omega.re.into(),
            ma.gamma_eff.into(),
            tp.two_pole_breakdown.into(),
        ]);
    }
    Ok(Output::Table(t))
}

/// Every pole in a window around ω0, for a few separations.
fn pole_list(cfg: &Config, format: &str) -> Result<Output, CliError> {
    let base = system(cfg, 0.1)?;
    let k0ls = cfg.list("k0L", &[0.0, 0.5 * PI, 25.5 * PI, 100.5 * PI])?;
    let half = cfg.f64("re-half-width", 4.0)?;
    let im_min = cfg.f64("im-min", -2.0)?;
    if !(half > 0.0 && im_min < 0.0) {
        return Err(CliError::Config("config: need re-half-width > 0 and im-min < 0".into()));
    }
    let mut sets = Vec::new();
    let mut t = Table::new(&["k0L", "label", "branch", "omega_re", "omega_im", "detuning", "gamma_eff", "residual"]);
    for k0l in k0ls {
        let p = checked(base.with_k0l(k0l))?;
        let mut poles = enumerate_poles(&Rect::around(p.omega0, half, im_min, 0.0), &p).map_err(|e| CliError::core("poles::enumerate_poles", e))?;
        poles.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re));
        let mut list = Vec::new();
        for r in &poles {
            let label = r.label.to_string();
            let branch = format!("{:?}", r.branch).to_lowercase();
            t.push(vec![
                k0l.into(),
                label.as_str().into(),
                branch.as_str().into(),
                r.omega.re.into(),
                r.omega.im.into(),
                r.detuning(p.omega0).into(),
                r.gamma_eff.into(),
                r.residual.into(),
            ]);
            list.push(json!({
                "label": label,
                "branch": branch,
                "omega_re": r.omega.re,
                "omega_im": r.omega.im,
                "detuning": r.detuning(p.omega0),
                "gamma_eff": r.gamma_eff,
                "residual": r.residual,
            }));
        }
        sets.push(json!({ "k0L": k0l, "poles": list }));
    }
    Ok(if format == "json" { Output::Json(json!({ "pole_sets": sets })) } else { Output::Table(t) })
}

/// Steady-state concurrence scans; the figure has one panel near the origin and one far out.
fn entanglement(cfg: &Config, exp: Experiment) -> Result<Output, CliError> {
    let p = checked(system(cfg, 0.1)?)?;
    let ranges: Vec<(f64, f64)> = if exp == Experiment::Fig5Concurrence && cfg.raw("k0L-min").is_none() && cfg.raw("k0L-max").is_none() {
        vec![(0.0, 5.0 * PI), (95.0 * PI, 100.0 * PI)]
    } else {
        vec![(cfg.f64("k0L-min", 0.0)?, cfg.f64("k0L-max", 5.0 * PI)?)]
    };
    let n = cfg.count("k0L-points", 501)?;
    let drive = DriveParams { omega1: cfg.f64("omega1", 0.1)?, omega2: cfg.f64("omega2", 0.0)?, detuning: cfg.f64("drive-detuning", 0.0)? };
    let modes: &[CollectiveSource] = match cfg.choice("mode", &["both", "markov", "renormalized"])? {
        "markov" => &[CollectiveSource::Markov],
        "renormalized" => &[CollectiveSource::Renormalized],
        _ => &[CollectiveSource::Markov, CollectiveSource::Renormalized],
    };
    let mut t = Table::new(&["k0L", "C_ss", "Gamma_S", "Gamma_A", "dOmega_S", "dOmega_A", "P_S", "P_A", "mode", "two_pole_breakdown"]);
    for &mode in modes {
        let name = if mode == CollectiveSource::Markov { "markov" } else { "renormalized" };
        for &(lo, hi) in &ranges {
            let scan: Vec<ConcurrencePoint> =
                concurrence_scan(&linspace(lo, hi, n), &drive, &p, mode).map_err(|e| CliError::core("master_eq::concurrence_scan", e))?;
            for pt in scan {
                let c = pt.collective;
                t.push(vec![
                    pt.k0l.into(),
                    pt.concurrence.into(),
                    c.gamma_s.into(),
                    c.gamma_a.into(),
                    (c.omega_s - c.omega0).into(),
                    (c.omega_a - c.omega0).into(),
                    pt.p_s.into(),
                    pt.p_a.into(),
                    name.into(),
                    pt.two_pole_breakdown.into(),
                ]);
            }
        }
    }
    Ok(Output::Table(t))
}

//! `wqed`: run the two-qubit waveguide experiments and write their data as CSV or JSON.
//!
//! ```text
//! wqed [run] <experiment> [--config FILE] [--key value]...
//! ```
//!
//! Settings come from an optional key-value file and are overridden by flags. Exit codes:
//! 1 for configuration errors, 2 for numerical failures, 3 for IO errors.

mod config;
mod experiments;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wqed_core::WqedError;

use config::Config;
use experiments::Experiment;
use output::Output;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(String),
    Io(String),
}

impl CliError {
    /// Core failures: invalid input counts as a configuration error.
    pub fn core(op: &str, e: WqedError) -> Self {
        match e {
            WqedError::Domain(_) => CliError::Config(format!("{op}: {e}")),
            _ => CliError::Compute(format!("{op}: {e}")),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Compute(m) | CliError::Io(m) => m,
        }
    }
}

/// Two-qubit waveguide QED experiments.
///
/// Experiments: fig1-map, fig2-g2, fig3-g2, fig4-poles, fig5-concurrence, figS1-poles,
/// custom (needs --kind). Angles accept a pi suffix, e.g. --k0L 100.5pi. WQED_THREADS caps
/// the number of worker threads.
#[derive(Debug, Parser)]
#[command(name = "wqed", version, allow_negative_numbers = true)]
struct Args {
    /// Experiment name, optionally preceded by `run`.
    #[arg(num_args = 0..=2, value_name = "EXPERIMENT")]
    words: Vec<String>,
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    omega0: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long = "gamma-prime")]
    gamma_prime: Option<String>,
    #[arg(long)]
    c: Option<String>,
    /// Separation phase(s), comma-separated.
    #[arg(long = "k0L")]
    k0l: Option<String>,
    #[arg(long = "k0L-min")]
    k0l_min: Option<String>,
    #[arg(long = "k0L-max")]
    k0l_max: Option<String>,
    #[arg(long = "k0L-points")]
    k0l_points: Option<String>,
    #[arg(long = "delta-min")]
    delta_min: Option<String>,
    #[arg(long = "delta-max")]
    delta_max: Option<String>,
    #[arg(long = "delta-points")]
    delta_points: Option<String>,
    #[arg(long = "phase-min")]
    phase_min: Option<String>,
    #[arg(long = "phase-max")]
    phase_max: Option<String>,
    #[arg(long = "phase-points")]
    phase_points: Option<String>,
    /// Photon detuning ck - ω0 for g2.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    channel: Option<String>,
    #[arg(long = "tau-max")]
    tau_max: Option<String>,
    #[arg(long = "tau-step")]
    tau_step: Option<String>,
    #[arg(long)]
    omega1: Option<String>,
    #[arg(long)]
    omega2: Option<String>,
    #[arg(long = "drive-detuning")]
    drive_detuning: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long = "re-half-width")]
    re_half_width: Option<String>,
    #[arg(long = "im-min")]
    im_min: Option<String>,
    /// Pole continuation step in k0L.
    #[arg(long)]
    step: Option<String>,
    #[arg(long = "quad-tol")]
    quad_tol: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long = "max-refine")]
    max_refine: Option<String>,
    #[arg(long)]
    mesh: Option<String>,
    /// Output path; `-` writes to stdout. Default: <experiment>.<format>.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl Args {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("kind", &self.kind),
            ("omega0", &self.omega0),
            ("gamma", &self.gamma),
            ("gamma-prime", &self.gamma_prime),
            ("c", &self.c),
            ("k0L", &self.k0l),
            ("k0L-min", &self.k0l_min),
            ("k0L-max", &self.k0l_max),
            ("k0L-points", &self.k0l_points),
            ("delta-min", &self.delta_min),
            ("delta-max", &self.delta_max),
            ("delta-points", &self.delta_points),
            ("phase-min", &self.phase_min),
            ("phase-max", &self.phase_max),
            ("phase-points", &self.phase_points),
            ("delta", &self.delta),
            ("channel", &self.channel),
            ("tau-max", &self.tau_max),
            ("tau-step", &self.tau_step),
            ("omega1", &self.omega1),
            ("omega2", &self.omega2),
            ("drive-detuning", &self.drive_detuning),
            ("mode", &self.mode),
            ("re-half-width", &self.re_half_width),
            ("im-min", &self.im_min),
            ("step", &self.step),
            ("quad-tol", &self.quad_tol),
            ("window", &self.window),
            ("max-refine", &self.max_refine),
            ("mesh", &self.mesh),
            ("out", &self.out),
            ("format", &self.format),
        ]
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WQED_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Config(format!("WQED_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(format!("WQED_THREADS: {e}")))
}

fn execute(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let mut cfg = match &args.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    let words: Vec<&str> = args.words.iter().map(String::as_str).skip_while(|w| *w == "run").collect();
    match words.as_slice() {
        [] => {}
        [name] => cfg.set("experiment", name)?,
        _ => return Err(CliError::Config(format!("expected one experiment, got {}", words.join(" ")))),
    }
    for (key, value) in args.flags() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    let Some(name) = cfg.raw("experiment").map(str::to_string) else {
        return Err(CliError::Config(format!("no experiment given; choose one of {}", Experiment::NAMES.join(", "))));
    };
    let exp = Experiment::parse(&name)?;
    cfg.string("experiment", exp.name());
    let format = cfg.choice("format", if exp.default_format(&cfg) == "json" { &["json", "csv"] } else { &["csv", "json"] })?;
    let out = cfg.string("out", &format!("{}.{format}", exp.name()));

    let result = experiments::run(exp, &cfg, format)?;

    let mut meta = vec![("wqed".to_string(), env!("CARGO_PKG_VERSION").to_string())];
    meta.extend(cfg.used().into_iter().filter(|(k, _)| k != "out"));
    let text = match (&result, format) {
        (Output::Table(t), "csv") => output::to_csv(&meta, t),
        _ => output::to_json(&meta, &result),
    };
    if out == "-" {
        std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("output: stdout: {e}")))
    } else {
        std::fs::write(&out, text).map_err(|e| CliError::Io(format!("output: cannot write {out}: {e}")))
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wqed: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

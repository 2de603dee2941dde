use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WqedError {
    #[error("invalid parameters: {0}")]
    Domain(String),

    #[error("{op}: no convergence ({detail})")]
    Convergence { op: &'static str, detail: String },

    #[error("{op}: Green matrix is numerically singular (condition number {cond:.3e})")]
    SingularMatrix { op: &'static str, cond: f64 },

    #[error("g2 undefined: single-photon amplitude {amplitude:.3e} is below 1e-10")]
    Normalization { amplitude: f64 },

    #[error("continue_poles: Newton failed at k0L = {k0l:.6} after step halving")]
    Continuation { k0l: f64 },

    #[error("continue_poles: S and A traces coalesce at k0L = {k0l:.6}")]
    Collision { k0l: f64 },

    #[error("enumerate_poles: winding number {expected} but {found} roots found")]
    IncompleteEnumeration { expected: i64, found: usize },

    #[error("steady_state: Liouvillian kernel has dimension {0}, expected 1")]
    DegenerateKernel(usize),

    #[error("evolve: {0}")]
    Tolerance(String),
}

pub type Result<T> = std::result::Result<T, WqedError>;

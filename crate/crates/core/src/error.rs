use thiserror::Error;

/// Errors raised by state constructors, dynamics and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("photon-number truncation needs more than {cap} levels for |alpha|^2 = {mean}")]
    CapExceeded { mean: f64, cap: usize },
    #[error("operation needs a single-mode state, got {n_modes} modes")]
    MultiModeState { n_modes: usize },
    #[error("mode {mode} is invalid for a {n_modes}-mode state")]
    BadMode { mode: usize, n_modes: usize },
    #[error("state has (numerically) zero norm")]
    ZeroState,
    #[error("|alpha| = {0:e} is too small: odd-cat normalization is singular")]
    DegenerateAlpha(f64),
    #[error("series failed to converge: {0}")]
    SeriesDiverged(String),
    #[error("outcome with photons at both detectors has no correction")]
    UnknownOutcome,
    #[error("interval [{lo}, {hi}] does not bracket the target (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

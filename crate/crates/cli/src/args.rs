use std::path::PathBuf;

use catport::fock::{DEFAULT_EPSILON, DEFAULT_NMAX_CAP};
use catport::{ComplexScalar, Schedule, TruncationPolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "catport",
    version,
    about = "Teleportation of superposed coherent states: figure data, single runs and cavity feasibility checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity and atomic excitation against interaction time.
    Fig1(Fig1Args),
    /// Fixed-time and best-time fidelity of even and odd cats against |alpha|.
    Fig2(Fig2Args),
    /// Monte Carlo average fidelity against |alpha| for both time schedules.
    Fig3(Fig3Args),
    /// Probability that the Bell measurement fails (vacuum on both detectors).
    Pfail(PfailArgs),
    /// Run every measurement branch for a single input state.
    Teleport(TeleportArgs),
    /// Check cavity-QED parameters against the coherence conditions.
    Feasibility(FeasibilityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fig1(_) => "fig1",
            Command::Fig2(_) => "fig2",
            Command::Fig3(_) => "fig3",
            Command::Pfail(_) => "pfail",
            Command::Teleport(_) => "teleport",
            Command::Feasibility(_) => "feasibility",
        }
    }
}

/// The input state `x|alpha> + y|-alpha>`, given either as Bloch angles of the
/// even/odd cat basis or as raw coefficients (rescaled to unit norm).
#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// Coherent amplitude (real part).
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Coherent amplitude (imaginary part).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
    /// Polar angle: pi is the even cat, 0 the odd cat.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_im: Option<f64>,
}

/// How the input state was specified on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Bloch { theta: f64, phi: f64 },
    Coefficients { x: ComplexScalar, y: ComplexScalar },
    Unspecified,
}

impl StateArgs {
    pub fn amplitude(&self) -> ComplexScalar {
        ComplexScalar::new(self.alpha, self.alpha_im)
    }

    pub fn spec(&self) -> Result<StateSpec, String> {
        let coeffs = [self.x_re, self.x_im, self.y_re, self.y_im];
        let angles = [self.theta, self.phi];
        let any_coeff = coeffs.iter().any(Option::is_some);
        let any_angle = angles.iter().any(Option::is_some);
        match (any_angle, any_coeff) {
            (true, true) => {
                Err("give either --theta/--phi or --x-re/--x-im/--y-re/--y-im, not both".into())
            }
            (false, true) => {
                let v = |o: Option<f64>| o.unwrap_or(0.0);
                Ok(StateSpec::Coefficients {
                    x: ComplexScalar::new(v(self.x_re), v(self.x_im)),
                    y: ComplexScalar::new(v(self.y_re), v(self.y_im)),
                })
            }
            (true, false) => Ok(StateSpec::Bloch {
                theta: self.theta.unwrap_or(std::f64::consts::PI),
                phi: self.phi.unwrap_or(0.0),
            }),
            (false, false) => Ok(StateSpec::Unspecified),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NumericArgs {
    /// Largest photon-number cutoff allowed.
    #[arg(long, default_value_t = DEFAULT_NMAX_CAP)]
    pub nmax_cap: usize,
    /// Probability mass allowed outside the photon-number cutoff.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

impl NumericArgs {
    pub fn policy(&self) -> catport::Result<TruncationPolicy> {
        TruncationPolicy::new(self.epsilon, self.nmax_cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleArg {
    Blind,
    Oracle,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Blind => Schedule::Blind,
            ScheduleArg::Oracle => Schedule::Oracle,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Fig1Args {
    #[command(flatten)]
    pub state: StateArgs,
    /// Coupling constant; times are in units of 1/g0.
    #[arg(long, default_value_t = 1.0)]
    pub g0: f64,
    /// End of the time axis [default: 4 pi / (|alpha| g0)].
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub n_points: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Write CSV here (plus a .manifest.json sidecar) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Fig2Args {
    #[arg(long, default_value_t = 0.5)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 46)]
    pub n_points: usize,
    #[arg(long, default_value_t = 1.0)]
    pub g0: f64,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Fig3Args {
    #[arg(long, default_value_t = 0.5)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 10)]
    pub n_points: usize,
    /// Monte Carlo samples per amplitude (at least 100).
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub g0: f64,
    /// Use photon-counting probabilities instead of the closed forms (slow).
    #[arg(long)]
    pub simulated_probabilities: bool,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PfailArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 26)]
    pub n_points: usize,
    /// Polar angle of the input; pi (default) is the even cat.
    #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TeleportArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Seed for drawing a random input when no state is given.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub g0: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Blind)]
    pub schedule: ScheduleArg,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FeasibilityArgs {
    /// Parameter set: rydberg or cesium. Explicit rates override it.
    #[arg(long)]
    pub preset: Option<String>,
    /// Vacuum Rabi frequency in rad/s.
    #[arg(long)]
    pub g0: Option<f64>,
    /// Atomic decay rate in rad/s.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Cavity field decay rate in rad/s.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Mean photon number |alpha|^2.
    #[arg(long, default_value_t = 1.0)]
    pub nbar: f64,
    /// Factor that counts as "much greater than".
    #[arg(long, default_value_t = catport::feasibility::DEFAULT_RATIO_THRESHOLD)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

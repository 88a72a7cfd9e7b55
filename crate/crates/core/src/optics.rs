//! Linear optics on coherent superpositions: the entangled source, a 50/50
//! beam splitter, photon counting on one mode, and the quasi-Bell outcome table.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_fock_amplitude, coherent_fock_amplitudes, CoherentSuperposition, CoherentTerm,
    ComplexScalar, MIN_ALPHA,
};

/// Which detector pattern fired. Indices 1..=5 follow the order
/// (0, odd), (odd, 0), (0, even>0), (even>0, 0), (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeTag {
    ZeroOdd,
    OddZero,
    ZeroEven,
    EvenZero,
    BothZero,
    /// Photons at both detectors; the ideal joint state has no such component.
    Impossible,
}

impl OutcomeTag {
    /// The five classes that can occur, in index order.
    pub const CLASSES: [OutcomeTag; 5] = [
        OutcomeTag::ZeroOdd,
        OutcomeTag::OddZero,
        OutcomeTag::ZeroEven,
        OutcomeTag::EvenZero,
        OutcomeTag::BothZero,
    ];

    /// 1-based index, `None` for [`OutcomeTag::Impossible`].
    pub fn index(self) -> Option<usize> {
        match self {
            OutcomeTag::ZeroOdd => Some(1),
            OutcomeTag::OddZero => Some(2),
            OutcomeTag::ZeroEven => Some(3),
            OutcomeTag::EvenZero => Some(4),
            OutcomeTag::BothZero => Some(5),
            OutcomeTag::Impossible => None,
        }
    }

    /// Smallest count pair belonging to the class.
    pub fn representative_counts(self) -> (usize, usize) {
        match self {
            OutcomeTag::ZeroOdd => (0, 1),
            OutcomeTag::OddZero => (1, 0),
            OutcomeTag::ZeroEven => (0, 2),
            OutcomeTag::EvenZero => (2, 0),
            OutcomeTag::BothZero => (0, 0),
            OutcomeTag::Impossible => (1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutcomeTag::ZeroOdd => "zero_odd",
            OutcomeTag::OddZero => "odd_zero",
            OutcomeTag::ZeroEven => "zero_even",
            OutcomeTag::EvenZero => "even_zero",
            OutcomeTag::BothZero => "both_zero",
            OutcomeTag::Impossible => "impossible",
        }
    }
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A detector reading `(n_E, n_F)` and its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellOutcome {
    pub tag: OutcomeTag,
    pub counts: (usize, usize),
}

pub fn classify_outcome(n_e: usize, n_f: usize) -> BellOutcome {
    let tag = match (n_e, n_f) {
        (0, 0) => OutcomeTag::BothZero,
        (0, n) if n % 2 == 1 => OutcomeTag::ZeroOdd,
        (0, _) => OutcomeTag::ZeroEven,
        (n, 0) if n % 2 == 1 => OutcomeTag::OddZero,
        (_, 0) => OutcomeTag::EvenZero,
        _ => OutcomeTag::Impossible,
    };
    BellOutcome {
        tag,
        counts: (n_e, n_f),
    }
}

/// `N (|alpha>_A |-alpha>_B - |-alpha>_A |alpha>_B)` on modes `[A, B]`,
/// with `N = 1 / sqrt(2 (1 - e^{-4|alpha|^2}))`.
pub fn entangled_source(alpha: ComplexScalar) -> Result<CoherentSuperposition> {
    let r = alpha.norm();
    if !(r >= MIN_ALPHA) {
        return Err(Error::DegenerateAlpha(r));
    }
    let n = 1.0 / (-2.0 * (-4.0 * alpha.norm_sqr()).exp_m1()).sqrt();
    CoherentSuperposition::new(
        2,
        vec![
            CoherentTerm::new(ComplexScalar::new(n, 0.0), vec![alpha, -alpha]),
            CoherentTerm::new(ComplexScalar::new(-n, 0.0), vec![-alpha, alpha]),
        ],
    )
}

/// Symmetric real 50/50 beam splitter. Per term, the amplitudes `(a, b)` on
/// `(mode_a, mode_b)` become `((a + b)/sqrt2, (b - a)/sqrt2)`.
///
/// Applying it twice gives `(a, b) -> (b, -a)`: a mode swap followed by parity
/// on `mode_b`.
pub fn beam_splitter(
    state: &CoherentSuperposition,
    mode_a: usize,
    mode_b: usize,
) -> Result<CoherentSuperposition> {
    let n_modes = state.n_modes();
    for mode in [mode_a, mode_b] {
        if mode >= n_modes {
            return Err(Error::BadMode { mode, n_modes });
        }
    }
    if mode_a == mode_b {
        return Err(Error::InvalidParameter(
            "beam splitter needs two distinct modes".into(),
        ));
    }
    Ok(state.map_amplitudes(|amps| {
        let (a, b) = (amps[mode_a], amps[mode_b]);
        amps[mode_a] = (a + b) * FRAC_1_SQRT_2;
        amps[mode_b] = (b - a) * FRAC_1_SQRT_2;
    }))
}

fn remove_mode(
    state: &CoherentSuperposition,
    mode: usize,
    weight: impl Fn(usize, ComplexScalar) -> ComplexScalar,
) -> Result<CoherentSuperposition> {
    let terms = state
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut amps = t.amplitudes.clone();
            let a = amps.remove(mode);
            CoherentTerm::new(t.coeff * weight(i, a), amps)
        })
        .collect();
    CoherentSuperposition::new(state.n_modes() - 1, terms)
}

fn check_mode(state: &CoherentSuperposition, mode: usize) -> Result<()> {
    if mode >= state.n_modes() {
        Err(Error::BadMode {
            mode,
            n_modes: state.n_modes(),
        })
    } else {
        Ok(())
    }
}

/// `<n|_mode state`, unnormalized, on the remaining modes.
pub fn project_unnormalized(
    state: &CoherentSuperposition,
    mode: usize,
    n: usize,
) -> Result<CoherentSuperposition> {
    check_mode(state, mode)?;
    remove_mode(state, mode, |_, a| coherent_fock_amplitude(a, n))
}

/// `<n|_mode state` for every `n = 0..=n_max`, unnormalized.
pub fn project_all(
    state: &CoherentSuperposition,
    mode: usize,
    n_max: usize,
) -> Result<Vec<CoherentSuperposition>> {
    check_mode(state, mode)?;
    let tables: Vec<Vec<ComplexScalar>> = state
        .terms()
        .iter()
        .map(|t| coherent_fock_amplitudes(t.amplitudes[mode], n_max))
        .collect();
    (0..=n_max)
        .map(|n| remove_mode(state, mode, |i, _| tables[i][n]))
        .collect()
}

/// Result of counting photons on one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Normalized state of the remaining modes; `None` when the outcome has zero probability.
    pub conditional: Option<CoherentSuperposition>,
}

/// Probability of finding `n` photons on `mode` and the post-measurement state of the other modes.
pub fn project_photon_number(
    state: &CoherentSuperposition,
    mode: usize,
    n: usize,
) -> Result<Projection> {
    let projected = project_unnormalized(state, mode, n)?;
    let probability = projected.norm_sqr();
    Ok(Projection {
        probability,
        conditional: projected.normalized().ok(),
    })
}

/// Marginal photon-number distribution of `mode` for `n = 0..=n_max`.
pub fn photon_number_distribution(
    state: &CoherentSuperposition,
    mode: usize,
    n_max: usize,
) -> Result<Vec<f64>> {
    Ok(project_all(state, mode, n_max)?
        .iter()
        .map(CoherentSuperposition::norm_sqr)
        .collect())
}

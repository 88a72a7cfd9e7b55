//! End-to-end teleportation of `x|alpha> + y|-alpha>`.
//!
//! The joint state is kept on modes `[E, F, B]`: the two beam-splitter output
//! ports seen by the detectors and the receiver's mode. Beam splitter input
//! `A` (the sender's half of the entangled pair) exits on `E = (A + C)/sqrt2`;
//! the unknown input `C` exits on `F = (C - A)/sqrt2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{
    cat_from_bloch, cat_overlap, choose_nmax, input_cat, normalize_cat_coefficients, parity_apply,
    to_fock, CoherentSuperposition, CoherentTerm, ComplexScalar, FockVector, TruncationPolicy,
    MIN_ALPHA,
};
use crate::jc::{field_fidelity, find_fmax, fixed_time, jc_evolve, AtomFieldState, JcParams};
use crate::optics::{
    beam_splitter, classify_outcome, entangled_source, photon_number_distribution, project_all,
    project_unnormalized, BellOutcome, OutcomeTag,
};

pub const MODE_E: usize = 0;
pub const MODE_F: usize = 1;
pub const MODE_B: usize = 2;

/// Truncation used for the photon-count tail estimate; far below any reported tolerance.
const TAIL_EPSILON: f64 = 1e-30;

/// The receiver's operation for each detector class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Correction {
    None,
    Parity,
    Jc,
    ParityThenJc,
}

impl Correction {
    /// `None` for outcomes with photons at both detectors.
    pub fn for_outcome(tag: OutcomeTag) -> Option<Correction> {
        match tag {
            OutcomeTag::ZeroOdd | OutcomeTag::BothZero => Some(Correction::None),
            OutcomeTag::OddZero => Some(Correction::Parity),
            OutcomeTag::ZeroEven => Some(Correction::Jc),
            OutcomeTag::EvenZero => Some(Correction::ParityThenJc),
            OutcomeTag::Impossible => None,
        }
    }

    pub fn uses_parity(self) -> bool {
        matches!(self, Correction::Parity | Correction::ParityThenJc)
    }

    pub fn uses_jc(self) -> bool {
        matches!(self, Correction::Jc | Correction::ParityThenJc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Correction::None => "none",
            Correction::Parity => "parity",
            Correction::Jc => "jc",
            Correction::ParityThenJc => "parity_then_jc",
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// When the receiver stops the atom-field interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// `t = pi / (|alpha| g0)`; needs no knowledge of the input state.
    #[default]
    Blind,
    /// The fidelity-maximizing time for the actual `(x, y)`.
    Oracle,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Blind => "blind",
            Schedule::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blind" => Ok(Schedule::Blind),
            "oracle" => Ok(Schedule::Oracle),
            other => Err(Error::InvalidParameter(format!(
                "unknown schedule `{other}`"
            ))),
        }
    }
}

/// A normalized input `x|alpha> + y|-alpha>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatInput {
    pub alpha: ComplexScalar,
    pub x: ComplexScalar,
    pub y: ComplexScalar,
}

impl CatInput {
    /// Rescales `(x, y)` onto the unit sphere of the cat norm.
    pub fn new(alpha: ComplexScalar, x: ComplexScalar, y: ComplexScalar) -> Result<Self> {
        let r = alpha.norm();
        if !(r >= MIN_ALPHA) {
            return Err(Error::DegenerateAlpha(r));
        }
        let (x, y) = normalize_cat_coefficients(alpha, x, y)?;
        Ok(Self { alpha, x, y })
    }

    pub fn from_bloch(alpha: ComplexScalar, theta: f64, phi: f64) -> Result<Self> {
        let (x, y) = cat_from_bloch(alpha, theta, phi)?;
        Self::new(alpha, x, y)
    }

    pub fn state(&self) -> Result<CoherentSuperposition> {
        Ok(input_cat(self.alpha, self.x, self.y)?.0)
    }
}

/// Source and input combined on the beam splitter, on modes `[E, F, B]`.
pub fn build_joint_state(input: &CatInput) -> Result<CoherentSuperposition> {
    let source = entangled_source(input.alpha)?; // [A, B]
    let joint = source.tensor(&input.state()?); // [A, B, C]
    let mixed = beam_splitter(&joint, 0, 2)?; // A -> E, C -> F
    mixed.permute_modes(&[0, 2, 1])
}

/// Probability that both detectors see vacuum:
/// `e^{-2|alpha|^2} / (1 + e^{-2|alpha|^2}) |x + y|^2`.
pub fn failure_probability(alpha: ComplexScalar, x: ComplexScalar, y: ComplexScalar) -> f64 {
    let e = cat_overlap(alpha);
    e / (1.0 + e) * (x + y).norm_sqr()
}

/// `(1 - e^{-2|alpha|^2}) / 2 |x - y|^2`, the fidelity left after a failed measurement.
pub fn f5_fidelity(alpha: ComplexScalar, x: ComplexScalar, y: ComplexScalar) -> f64 {
    let one_minus = -(-2.0 * alpha.norm_sqr()).exp_m1();
    0.5 * one_minus * (x - y).norm_sqr()
}

/// Class probabilities `P1..P5` from the closed forms.
pub fn outcome_probabilities_closed(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
) -> [f64; 5] {
    let pf = failure_probability(alpha, x, y);
    let even = 0.25 - 0.5 * pf;
    [0.25, 0.25, even, even, pf]
}

/// Class probabilities obtained by counting photons on the joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedOutcomes {
    /// `P1..P5`
    pub p: [f64; 5],
    /// Weight found with photons at both detectors.
    pub impossible: f64,
    /// Probability of counts beyond the enumeration cutoff on either detector.
    pub tail: f64,
    pub n_max: usize,
}

impl SimulatedOutcomes {
    pub fn total(&self) -> f64 {
        self.p.iter().sum::<f64>() + self.impossible + self.tail
    }
}

/// Enumerates every `(n_E, n_F)` up to the cutoff for `sqrt2 alpha` and
/// accumulates each class; the tail beyond the cutoff is summed separately
/// from the detector marginals.
pub fn outcome_probabilities_simulated(
    input: &CatInput,
    policy: &TruncationPolicy,
) -> Result<SimulatedOutcomes> {
    let joint = build_joint_state(input)?;
    let port_amplitude = input.alpha * std::f64::consts::SQRT_2;
    let n_max = choose_nmax(&[port_amplitude], policy)?;

    let mut p = [0.0; 5];
    let mut impossible = 0.0;
    for (n_e, rest) in project_all(&joint, MODE_E, n_max)?.iter().enumerate() {
        // rest is on [F, B]
        for (n_f, prob) in photon_number_distribution(rest, 0, n_max)?
            .into_iter()
            .enumerate()
        {
            match classify_outcome(n_e, n_f).tag.index() {
                Some(i) => p[i - 1] += prob,
                None => impossible += prob,
            }
        }
    }

    let tail_policy = TruncationPolicy::new(TAIL_EPSILON, policy.n_max_cap.max(n_max + 1))?;
    let n_far = choose_nmax(&[port_amplitude], &tail_policy)?.max(n_max);
    let beyond = |mode| -> Result<f64> {
        Ok(
            photon_number_distribution(&joint, mode, n_far)?[n_max + 1..]
                .iter()
                .sum(),
        )
    };
    let tail = beyond(MODE_E)? + beyond(MODE_F)?;
    Ok(SimulatedOutcomes {
        p,
        impossible,
        tail,
        n_max,
    })
}

/// Receiver's normalized state after the detectors report `counts`, with the
/// probability of that reading. `None` when the reading has zero probability.
pub fn conditional_state(
    input: &CatInput,
    counts: (usize, usize),
) -> Result<Option<(f64, CoherentSuperposition)>> {
    let joint = build_joint_state(input)?;
    let after_e = project_unnormalized(&joint, MODE_E, counts.0)?;
    let bob = project_unnormalized(&after_e, 0, counts.1)?;
    let p = bob.norm_sqr();
    Ok(bob.normalized().ok().map(|s| (p, s)))
}

/// The receiver's state for each class as read off the beam-splitter output
/// decomposition, normalized.
pub fn line_state(input: &CatInput, tag: OutcomeTag) -> Result<CoherentSuperposition> {
    let CatInput { alpha, x, y } = *input;
    let pair = |a: ComplexScalar, b: ComplexScalar, amp: ComplexScalar| {
        CoherentSuperposition::new(
            1,
            vec![
                CoherentTerm::new(a, vec![amp]),
                CoherentTerm::new(b, vec![-amp]),
            ],
        )
    };
    let one = ComplexScalar::new(1.0, 0.0);
    let state = match tag {
        OutcomeTag::ZeroOdd => pair(x, y, alpha)?,
        OutcomeTag::ZeroEven => pair(x, -y, alpha)?,
        OutcomeTag::OddZero => pair(x, y, -alpha)?,
        OutcomeTag::EvenZero => pair(x, -y, -alpha)?,
        OutcomeTag::BothZero => pair(one, -one, alpha)?,
        OutcomeTag::Impossible => return Err(Error::UnknownOutcome),
    };
    state.normalized()
}

/// Receiver's field after the correction.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrectedField {
    /// Pure field state (no atom involved).
    Pure(FockVector),
    /// Joint atom-field state after the interaction; the field alone is mixed.
    AtomField(AtomFieldState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionResult {
    pub correction: Correction,
    pub corrected: CorrectedField,
    pub fidelity: f64,
    /// Interaction time used, 0 without a JC step.
    pub t_used: f64,
}

/// Interaction time under `schedule`.
pub fn jc_time(
    input: &CatInput,
    g0: f64,
    schedule: Schedule,
    policy: &TruncationPolicy,
) -> Result<f64> {
    match schedule {
        Schedule::Blind => fixed_time(input.alpha, g0),
        Schedule::Oracle => Ok(find_fmax(input.alpha, input.x, input.y, g0, None, policy)?.t_star),
    }
}

/// Applies the correction for `tag` to `state` (the receiver's single-mode
/// state) and scores it against the original input.
pub fn bob_correct(
    tag: OutcomeTag,
    state: &CoherentSuperposition,
    input: &CatInput,
    g0: f64,
    schedule: Schedule,
    policy: &TruncationPolicy,
) -> Result<CorrectionResult> {
    let correction = Correction::for_outcome(tag).ok_or(Error::UnknownOutcome)?;
    let t = if correction.uses_jc() {
        jc_time(input, g0, schedule, policy)?
    } else {
        0.0
    };
    bob_correct_at(correction, state, input, g0, t, policy)
}

/// [`bob_correct`] with the interaction time already chosen.
pub fn bob_correct_at(
    correction: Correction,
    state: &CoherentSuperposition,
    input: &CatInput,
    g0: f64,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<CorrectionResult> {
    let target = input.state()?;
    let n_max = choose_nmax(&[input.alpha], policy)?;
    let pre = if correction.uses_parity() {
        parity_apply(state, 0)?
    } else {
        state.clone()
    }
    .normalized()?;

    if correction.uses_jc() {
        let field = to_fock(&pre, n_max)?;
        let atom = jc_evolve(&field, JcParams::new(g0, t)?);
        let fidelity = field_fidelity(&atom, &to_fock(&target, n_max)?);
        Ok(CorrectionResult {
            correction,
            corrected: CorrectedField::AtomField(atom),
            fidelity,
            t_used: t,
        })
    } else {
        let fidelity = target.inner(&pre)?.norm_sqr();
        Ok(CorrectionResult {
            correction,
            corrected: CorrectedField::Pure(to_fock(&pre, n_max)?),
            fidelity,
            t_used: 0.0,
        })
    }
}

/// `F1..F5` for the receiver states of every class, with the JC step run for time `t_jc`.
pub fn outcome_fidelities_at(
    input: &CatInput,
    g0: f64,
    t_jc: f64,
    policy: &TruncationPolicy,
) -> Result<[f64; 5]> {
    let mut out = [0.0; 5];
    for (slot, tag) in out.iter_mut().zip(OutcomeTag::CLASSES) {
        let correction = Correction::for_outcome(tag).ok_or(Error::UnknownOutcome)?;
        let t = if correction.uses_jc() { t_jc } else { 0.0 };
        *slot =
            bob_correct_at(correction, &line_state(input, tag)?, input, g0, t, policy)?.fidelity;
    }
    Ok(out)
}

/// One row of a teleportation run.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeReport {
    /// The class, with its smallest count pair.
    pub outcome: BellOutcome,
    pub probability: f64,
    pub bob_state_pre: CoherentSuperposition,
    pub correction: Correction,
    pub fidelity: f64,
    pub t_used: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportRun {
    pub input: CatInput,
    pub schedule: Schedule,
    pub reports: Vec<OutcomeReport>,
    pub simulated: SimulatedOutcomes,
}

impl TeleportRun {
    /// `sum_i P_i F_i` for this input.
    pub fn mean_fidelity(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.probability * r.fidelity)
            .sum()
    }
}

/// Runs all five measurement branches for one input state.
///
/// Receiver states come from projecting the joint state on each class's
/// smallest count pair; if that reading has zero probability the
/// decomposition state from [`line_state`] is used instead.
pub fn teleport(
    input: &CatInput,
    g0: f64,
    schedule: Schedule,
    policy: &TruncationPolicy,
) -> Result<TeleportRun> {
    let simulated = outcome_probabilities_simulated(input, policy)?;
    let t_jc = jc_time(input, g0, schedule, policy)?;
    let mut reports = Vec::with_capacity(5);
    for (i, tag) in OutcomeTag::CLASSES.into_iter().enumerate() {
        let counts = tag.representative_counts();
        let bob = match conditional_state(input, counts)? {
            Some((_, s)) => s,
            None => line_state(input, tag)?,
        };
        let correction = Correction::for_outcome(tag).ok_or(Error::UnknownOutcome)?;
        let t = if correction.uses_jc() { t_jc } else { 0.0 };
        let result = bob_correct_at(correction, &bob, input, g0, t, policy)?;
        reports.push(OutcomeReport {
            outcome: classify_outcome(counts.0, counts.1),
            probability: simulated.p[i],
            bob_state_pre: bob,
            correction,
            fidelity: result.fidelity,
            t_used: result.t_used,
        });
    }
    Ok(TeleportRun {
        input: *input,
        schedule,
        reports,
        simulated,
    })
}

//! Resonant Jaynes-Cummings correction of the receiving mode.
//!
//! The atom starts in its ground state and couples to the field through
//! `H = (g0/2)(a sigma+ + a^dagger sigma-)`, which rotates each pair
//! `(|g,n>, |e,n-1>)` at angular rate `sqrt(n) g0 / 2`. Dissipation is not
//! modelled.
//!
//! Two independent routes give the fidelity of the reduced field with the
//! intended state `x|alpha> + y|-alpha>`:
//! [`fidelity_closed_form`] evaluates the double Poisson series directly from
//! `(alpha, x, y)`, while [`jc_evolve`] + [`field_fidelity`] propagate an
//! explicit photon-number vector.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{
    choose_nmax, input_cat, poisson_pmf, to_fock, CoherentSuperposition, CoherentTerm,
    ComplexScalar, FockVector, TruncationPolicy, MIN_ALPHA,
};
use crate::optimize::golden_section_max;

/// Series cutoff tolerance for the closed-form fidelity.
pub const SERIES_EPSILON: f64 = 1e-14;
/// Coarse scan resolution of the maximum-fidelity search.
pub const FMAX_GRID_POINTS: usize = 200;
/// Relative width (in `t`) at which golden-section refinement stops.
pub const FMAX_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    g0: f64,
    t: f64,
}

impl JcParams {
    /// `g0` is the single-photon Rabi frequency (rad/s), `t` the interaction time.
    pub fn new(g0: f64, t: f64) -> Result<Self> {
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "g0 must be positive, got {g0}"
            )));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t must be non-negative, got {t}"
            )));
        }
        Ok(Self { g0, t })
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The dimensionless product `g0 t`; the only combination the dynamics depend on.
    pub fn g0t(&self) -> f64 {
        self.g0 * self.t
    }
}

/// `pi / (|alpha| g0)`, the interaction time that approximately maximizes the correction fidelity.
pub fn fixed_time(alpha: ComplexScalar, g0: f64) -> Result<f64> {
    let r = alpha.norm();
    if !(r >= MIN_ALPHA) {
        return Err(Error::DegenerateAlpha(r));
    }
    if !(g0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "g0 must be positive, got {g0}"
        )));
    }
    Ok(PI / (r * g0))
}

/// Joint atom-field amplitudes. `g_amps[n]` is `|g, n>` and `e_amps[n]` is `|e, n>`.
///
/// `|e, n_max>` couples to `|g, n_max + 1>`, which lies outside the basis; it is
/// left stationary so evolution stays unitary on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFieldState {
    g_amps: Vec<ComplexScalar>,
    e_amps: Vec<ComplexScalar>,
}

impl AtomFieldState {
    pub fn new(g_amps: Vec<ComplexScalar>, e_amps: Vec<ComplexScalar>) -> Result<Self> {
        if g_amps.is_empty() || g_amps.len() != e_amps.len() {
            return Err(Error::InvalidParameter(
                "ground and excited amplitude vectors must be non-empty and equally long".into(),
            ));
        }
        Ok(Self { g_amps, e_amps })
    }

    /// Atom in `|g>`, field in `field`.
    pub fn ground(field: &FockVector) -> Self {
        let g_amps = field.amps().to_vec();
        let e_amps = vec![ComplexScalar::new(0.0, 0.0); g_amps.len()];
        Self { g_amps, e_amps }
    }

    pub fn n_max(&self) -> usize {
        self.g_amps.len() - 1
    }

    pub fn g_amps(&self) -> &[ComplexScalar] {
        &self.g_amps
    }

    pub fn e_amps(&self) -> &[ComplexScalar] {
        &self.e_amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.g_amps
            .iter()
            .chain(&self.e_amps)
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Field component with the atom in `|g>` (unnormalized).
    pub fn ground_field(&self) -> FockVector {
        FockVector::new(self.g_amps.clone()).expect("amplitudes are finite")
    }

    /// Field component with the atom in `|e>` (unnormalized).
    pub fn excited_field(&self) -> FockVector {
        FockVector::new(self.e_amps.clone()).expect("amplitudes are finite")
    }

    /// Exact propagation for time `params.t()`.
    pub fn evolve(&self, params: JcParams) -> Self {
        let mut g = self.g_amps.clone();
        let mut e = self.e_amps.clone();
        let half = 0.5 * params.g0t();
        let minus_i = ComplexScalar::new(0.0, -1.0);
        for n in 1..g.len() {
            let (s, c) = ((n as f64).sqrt() * half).sin_cos();
            let (gn, em) = (g[n], e[n - 1]);
            g[n] = gn * c + minus_i * s * em;
            e[n - 1] = minus_i * s * gn + em * c;
        }
        Self {
            g_amps: g,
            e_amps: e,
        }
    }
}

/// Evolves `field` together with a ground-state atom.
pub fn jc_evolve(field: &FockVector, params: JcParams) -> AtomFieldState {
    AtomFieldState::ground(field).evolve(params)
}

/// Probability of finding the atom excited.
pub fn excitation_probability(state: &AtomFieldState) -> f64 {
    state.e_amps.iter().map(|a| a.norm_sqr()).sum()
}

/// `<target| rho_field |target>` with the atom traced out.
pub fn field_fidelity(state: &AtomFieldState, target: &FockVector) -> f64 {
    let on_g = target.inner(&state.ground_field()).norm_sqr();
    let on_e = target.inner(&state.excited_field()).norm_sqr();
    on_g + on_e
}

/// Outcome of measuring the atom and keeping only runs where it is found excited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herald {
    /// Probability of the atom being found in `|e>`.
    pub probability: f64,
    /// Fidelity of the field conditioned on that result (0 when the probability is 0).
    pub fidelity: f64,
}

pub fn heralded_excited(state: &AtomFieldState, target: &FockVector) -> Herald {
    let probability = excitation_probability(state);
    let fidelity = if probability > 0.0 {
        target.inner(&state.excited_field()).norm_sqr() / probability
    } else {
        0.0
    };
    Herald {
        probability,
        fidelity,
    }
}

/// Fidelity after a JC interaction of duration `params.t()` starting from
/// `M (x|alpha> - y|-alpha>)`, measured against `x|alpha> + y|-alpha>`.
///
/// `(x, y)` must already satisfy the cat normalization. Valid for complex
/// `alpha`, `x` and `y`: the phase of `alpha` only contributes a global phase
/// to the excited-atom sum.
pub fn fidelity_closed_form(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
    params: JcParams,
) -> Result<f64> {
    let m_inv_sqr = 2.0 * (x.norm_sqr() + y.norm_sqr()) - 1.0;
    if !(m_inv_sqr > 1e-300) {
        return Err(Error::ZeroState);
    }
    let policy = TruncationPolicy::default().with_epsilon(SERIES_EPSILON)?;
    let n_max = choose_nmax(&[alpha], &policy)?;
    let pmf = poisson_pmf(alpha.norm_sqr(), n_max + 1);

    let diff = x.norm_sqr() - y.norm_sqr();
    let cross = 2.0 * (x * y.conj()).im;
    let sum_sq = (x + y).norm_sqr();
    let diff_sq = (x - y).norm_sqr();
    let half = 0.5 * params.g0t();

    let mut ground = ComplexScalar::new(0.0, 0.0);
    let mut excited = 0.0;
    for n in 0..=n_max {
        let even = n % 2 == 0;
        let coeff = ComplexScalar::new(diff, if even { cross } else { -cross });
        ground += coeff * (pmf[n] * ((n as f64).sqrt() * half).cos());
        let weight = (pmf[n] * pmf[n + 1]).sqrt();
        let pair = if even { sum_sq } else { diff_sq };
        excited += weight * pair * ((n as f64 + 1.0).sqrt() * half).sin();
    }
    if !ground.re.is_finite() || !ground.im.is_finite() || !excited.is_finite() {
        return Err(Error::SeriesDiverged("non-finite partial sum".into()));
    }
    if pmf[n_max] > 1e-8 {
        return Err(Error::SeriesDiverged(format!(
            "last retained Poisson weight {:e} at n = {n_max} is not negligible",
            pmf[n_max]
        )));
    }
    Ok((ground.norm_sqr() + excited * excited) / m_inv_sqr)
}

/// Field states entering the correction: the normalized input
/// `M (x|alpha> - y|-alpha>)` and the target `x|alpha> + y|-alpha>`, both
/// expanded to a common cutoff.
pub fn correction_states(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
    policy: &TruncationPolicy,
) -> Result<(FockVector, FockVector)> {
    let (target, _) = input_cat(alpha, x, y)?;
    let initial = CoherentSuperposition::new(
        1,
        vec![
            CoherentTerm::new(x, vec![alpha]),
            CoherentTerm::new(-y, vec![-alpha]),
        ],
    )?
    .normalized()?;
    let n_max = choose_nmax(&[alpha], policy)?;
    Ok((to_fock(&initial, n_max)?, to_fock(&target, n_max)?))
}

/// Fidelity through explicit propagation of a photon-number vector.
pub fn fidelity_numeric(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
    params: JcParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let (initial, target) = correction_states(alpha, x, y, policy)?;
    Ok(field_fidelity(&jc_evolve(&initial, params), &target))
}

/// `t -> field_fidelity(jc_evolve(initial, t), target)` with the overlaps
/// that do not depend on `t` computed once.
#[derive(Debug, Clone)]
pub struct FidelityTrace {
    /// `conj(target_n) initial_n`
    ground: Vec<ComplexScalar>,
    /// `conj(target_n) initial_{n+1}`
    excited: Vec<ComplexScalar>,
}

impl FidelityTrace {
    pub fn new(initial: &FockVector, target: &FockVector) -> Self {
        let len = initial.amps().len().min(target.amps().len());
        let (c, d) = (&initial.amps()[..len], &target.amps()[..len]);
        let ground = d.iter().zip(c).map(|(t, i)| t.conj() * i).collect();
        let excited = d.iter().zip(&c[1..]).map(|(t, i)| t.conj() * i).collect();
        Self { ground, excited }
    }

    pub fn for_cat(
        alpha: ComplexScalar,
        x: ComplexScalar,
        y: ComplexScalar,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        let (initial, target) = correction_states(alpha, x, y, policy)?;
        Ok(Self::new(&initial, &target))
    }

    pub fn n_max(&self) -> usize {
        self.ground.len() - 1
    }

    /// Fidelity at dimensionless time `g0 t`.
    pub fn fidelity(&self, g0t: f64) -> f64 {
        let half = 0.5 * g0t;
        let mut on_g = ComplexScalar::new(0.0, 0.0);
        let mut on_e = ComplexScalar::new(0.0, 0.0);
        for (n, (a, b)) in self.ground.iter().zip(&self.excited).enumerate() {
            on_g += a * ((n as f64).sqrt() * half).cos();
            on_e += b * ((n as f64 + 1.0).sqrt() * half).sin();
        }
        if let Some(last) = self.ground.get(self.excited.len()) {
            on_g += last * ((self.excited.len() as f64).sqrt() * half).cos();
        }
        on_g.norm_sqr() + on_e.norm_sqr()
    }

    fn fidelity_tabulated(&self, cos_row: &[f64], sin_row: &[f64]) -> f64 {
        let on_g: ComplexScalar = self.ground.iter().zip(cos_row).map(|(a, c)| a * c).sum();
        let on_e: ComplexScalar = self.excited.iter().zip(sin_row).map(|(b, s)| b * s).sum();
        on_g.norm_sqr() + on_e.norm_sqr()
    }
}

/// Result of the maximum-fidelity search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fmax {
    pub t_star: f64,
    pub f_max: f64,
    /// `pi / (|alpha| g0)`
    pub t_fixed: f64,
    pub f_fixed: f64,
}

/// Coarse time grid with its cosine/sine tables, reusable across every
/// `(x, y)` that shares `alpha`, `g0`, the window and the cutoff.
#[derive(Debug, Clone)]
pub struct FmaxGrid {
    g0: f64,
    t_fixed: f64,
    lo: f64,
    hi: f64,
    times: Vec<f64>,
    width: usize,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl FmaxGrid {
    /// Grid over `[t0 - window, t0 + window]` (clipped at 0), `t0 = pi / (|alpha| g0)`.
    pub fn new(alpha: ComplexScalar, g0: f64, window: f64, n_max: usize) -> Result<Self> {
        let t_fixed = fixed_time(alpha, g0)?;
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "window must be positive, got {window}"
            )));
        }
        let lo = (t_fixed - window).max(0.0);
        let hi = t_fixed + window;
        let step = (hi - lo) / (FMAX_GRID_POINTS - 1) as f64;
        let times: Vec<f64> = (0..FMAX_GRID_POINTS)
            .map(|k| lo + k as f64 * step)
            .collect();
        let width = n_max + 1;
        let mut cos_table = Vec::with_capacity(times.len() * width);
        let mut sin_table = Vec::with_capacity(times.len() * width);
        for &t in &times {
            let half = 0.5 * g0 * t;
            cos_table.extend((0..width).map(|n| ((n as f64).sqrt() * half).cos()));
            sin_table.extend((0..width).map(|n| ((n as f64 + 1.0).sqrt() * half).sin()));
        }
        Ok(Self {
            g0,
            t_fixed,
            lo,
            hi,
            times,
            width,
            cos_table,
            sin_table,
        })
    }

    /// Default half-width `0.5 pi / (|alpha| g0)`.
    pub fn default_window(alpha: ComplexScalar, g0: f64) -> Result<f64> {
        Ok(0.5 * fixed_time(alpha, g0)?)
    }

    pub fn t_fixed(&self) -> f64 {
        self.t_fixed
    }

    /// Coarse scan, golden-section refinement around the best grid point,
    /// and a final comparison against the fixed time.
    pub fn search(&self, trace: &FidelityTrace) -> Result<Fmax> {
        if trace.n_max() + 1 != self.width {
            return Err(Error::InvalidParameter(format!(
                "trace cutoff {} does not match grid cutoff {}",
                trace.n_max(),
                self.width - 1
            )));
        }
        let (best_k, best_f) = (0..self.times.len())
            .map(|k| {
                let row = k * self.width..(k + 1) * self.width;
                (
                    k,
                    trace.fidelity_tabulated(&self.cos_table[row.clone()], &self.sin_table[row]),
                )
            })
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, f)| if f > acc.1 { (k, f) } else { acc },
            );

        let a = if best_k == 0 {
            self.lo
        } else {
            self.times[best_k - 1]
        };
        let b = if best_k + 1 == self.times.len() {
            self.hi
        } else {
            self.times[best_k + 1]
        };
        let g0 = self.g0;
        let (t_gold, f_gold) = golden_section_max(|t| trace.fidelity(g0 * t), a, b, FMAX_REL_TOL);
        let f_fixed = trace.fidelity(g0 * self.t_fixed);

        let mut best = (self.times[best_k], best_f);
        for cand in [(t_gold, f_gold), (self.t_fixed, f_fixed)] {
            if cand.1 > best.1 {
                best = cand;
            }
        }
        Ok(Fmax {
            t_star: best.0,
            f_max: best.1,
            t_fixed: self.t_fixed,
            f_fixed,
        })
    }
}

/// Maximizes the numerically propagated fidelity over `t` within `window`
/// of `pi / (|alpha| g0)`; `None` selects half of that time as the window.
pub fn find_fmax(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
    g0: f64,
    window: Option<f64>,
    policy: &TruncationPolicy,
) -> Result<Fmax> {
    let trace = FidelityTrace::for_cat(alpha, x, y, policy)?;
    let window = match window {
        Some(w) => w,
        None => FmaxGrid::default_window(alpha, g0)?,
    };
    FmaxGrid::new(alpha, g0, window, trace.n_max())?.search(&trace)
}

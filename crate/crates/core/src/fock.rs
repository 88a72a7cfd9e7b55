//! Field-state representations.
//!
//! Two views of the same physics live here. [`CoherentSuperposition`] is a
//! finite sum of products of coherent states and is exact under everything the
//! protocol does (beam splitters, parity, photon-number projection of one
//! mode). [`FockVector`] is a truncated photon-number amplitude vector for a
//! single mode and is what the atom-field dynamics act on.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude type used throughout the crate.
pub type ComplexScalar = Complex64;

pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_NMAX_CAP: usize = 4096;

/// Below this |alpha| the odd cat |alpha> - |-alpha> has no usable normalization.
pub const MIN_ALPHA: f64 = 1e-6;

const ZERO_NORM_SQR: f64 = 1e-30;
const MERGE_DISTANCE: f64 = 1e-12;
const DROP_COEFF: f64 = 1e-15;

/// How far to extend a photon-number basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Largest Poisson tail probability allowed beyond the cutoff.
    pub epsilon: f64,
    /// Hard upper bound on the cutoff.
    pub n_max_cap: usize,
}

impl TruncationPolicy {
    pub fn new(epsilon: f64, n_max_cap: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if n_max_cap < 1 {
            return Err(Error::InvalidParameter(
                "n_max cap must be at least 1".into(),
            ));
        }
        Ok(Self { epsilon, n_max_cap })
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.n_max_cap)
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            n_max_cap: DEFAULT_NMAX_CAP,
        }
    }
}

/// `<beta|alpha> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(beta) alpha)`.
pub fn coherent_overlap(alpha: ComplexScalar, beta: ComplexScalar) -> ComplexScalar {
    (beta.conj() * alpha - 0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr()).exp()
}

/// `ln(k!)` for `k = 0..=n_max`.
pub(crate) fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson(`mean`) probabilities `P(N = k)` for `k = 0..=n_max`, evaluated in log space.
pub(crate) fn poisson_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    let ln_mean = mean.ln();
    ln_factorials(n_max)
        .into_iter()
        .enumerate()
        .map(|(k, lf)| (k as f64 * ln_mean - mean - lf).exp())
        .collect()
}

/// Smallest `n` whose Poisson(`mean`) upper tail `P(N > n)` is below `policy.epsilon`.
fn poisson_cutoff(mean: f64, policy: &TruncationPolicy) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let cap = policy.n_max_cap;
    if !mean.is_finite() || mean > cap as f64 {
        return Err(Error::CapExceeded { mean, cap });
    }
    let ln_mean = mean.ln();
    let mut pmf = Vec::new();
    let mut ln_fact = 0.0;
    let mut k = 0usize;
    // Past the mode the pmf ratio p(k+1)/p(k) = mean/(k+1) < 1 bounds the
    // remaining tail geometrically.
    let remainder = loop {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let p = (k as f64 * ln_mean - mean - ln_fact).exp();
        pmf.push(p);
        if (k as f64 + 1.0) > mean {
            let r = mean / (k as f64 + 2.0);
            let bound = p * r / (1.0 - r);
            if bound < policy.epsilon * 1e-6 {
                break bound;
            }
        }
        k += 1;
    };
    // tail[n] = sum_{j > n} pmf[j], accumulated from the far end.
    let mut tail = remainder;
    let mut cutoff = pmf.len() - 1;
    for n in (0..pmf.len() - 1).rev() {
        tail += pmf[n + 1];
        if tail < policy.epsilon {
            cutoff = n;
        } else {
            break;
        }
    }
    if cutoff > cap {
        return Err(Error::CapExceeded { mean, cap });
    }
    Ok(cutoff)
}

/// Photon-number cutoff adequate for every listed coherent amplitude.
pub fn choose_nmax(alphas: &[ComplexScalar], policy: &TruncationPolicy) -> Result<usize> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter(
            "choose_nmax needs at least one amplitude".into(),
        ));
    }
    alphas.iter().try_fold(0, |acc, a| {
        poisson_cutoff(a.norm_sqr(), policy).map(|n| acc.max(n))
    })
}

/// `<n|alpha>` for `n = 0..=n_max`; magnitudes in log space, phase `n arg(alpha)` tracked apart.
pub fn coherent_fock_amplitudes(alpha: ComplexScalar, n_max: usize) -> Vec<ComplexScalar> {
    let mut out = vec![ComplexScalar::new(0.0, 0.0); n_max + 1];
    let r = alpha.norm();
    if r == 0.0 {
        out[0] = ComplexScalar::new(1.0, 0.0);
        return out;
    }
    let ln_r = r.ln();
    let arg = alpha.arg();
    let half_mean = 0.5 * r * r;
    for (n, (slot, lf)) in out.iter_mut().zip(ln_factorials(n_max)).enumerate() {
        let ln_mag = n as f64 * ln_r - half_mean - 0.5 * lf;
        *slot = ComplexScalar::from_polar(ln_mag.exp(), n as f64 * arg);
    }
    out
}

/// Single `<n|alpha>` amplitude.
pub fn coherent_fock_amplitude(alpha: ComplexScalar, n: usize) -> ComplexScalar {
    let r = alpha.norm();
    if r == 0.0 {
        return if n == 0 {
            ComplexScalar::new(1.0, 0.0)
        } else {
            ComplexScalar::new(0.0, 0.0)
        };
    }
    let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let ln_mag = n as f64 * r.ln() - 0.5 * r * r - 0.5 * lf;
    ComplexScalar::from_polar(ln_mag.exp(), n as f64 * alpha.arg())
}

/// Truncated single-mode photon-number state, basis `|0>..|n_max>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<ComplexScalar>,
}

impl FockVector {
    pub fn new(amps: Vec<ComplexScalar>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter(
                "Fock vector needs at least one level".into(),
            ));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Fock amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::number_state(0, n_max)
    }

    /// `|n>` in a basis truncated at `n_max` (which must be at least `n`).
    pub fn number_state(n: usize, n_max: usize) -> Self {
        let mut amps = vec![ComplexScalar::new(0.0, 0.0); n_max.max(n) + 1];
        amps[n] = ComplexScalar::new(1.0, 0.0);
        Self { amps }
    }

    pub fn coherent(alpha: ComplexScalar, n_max: usize) -> Self {
        Self {
            amps: coherent_fock_amplitudes(alpha, n_max),
        }
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[ComplexScalar] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<ComplexScalar> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability mass missing from the truncated basis, assuming the full state is normalized.
    pub fn truncation_loss(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    /// `<self|other>`, summed over the levels both vectors share.
    pub fn inner(&self, other: &FockVector) -> ComplexScalar {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 < ZERO_NORM_SQR {
            return Err(Error::ZeroState);
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self {
            amps: self.amps.iter().map(|a| a * s).collect(),
        })
    }

    /// Applies `(-1)^{a^dagger a}`.
    pub fn parity(&self) -> Self {
        Self {
            amps: self
                .amps
                .iter()
                .enumerate()
                .map(|(n, a)| if n % 2 == 1 { -a } else { *a })
                .collect(),
        }
    }

    /// Trace distance `sqrt(1 - |<a|b>|^2)` between the normalized pure states,
    /// evaluated from the residual `b - <a|b> a` so values near zero keep their precision.
    pub fn trace_distance_pure(&self, other: &FockVector) -> Result<f64> {
        let a = self.normalized()?;
        let b = other.normalized()?;
        let overlap = a.inner(&b);
        let len = a.amps.len().max(b.amps.len());
        let zero = ComplexScalar::new(0.0, 0.0);
        let residual: f64 = (0..len)
            .map(|n| {
                let an = a.amps.get(n).copied().unwrap_or(zero);
                let bn = b.amps.get(n).copied().unwrap_or(zero);
                (bn - overlap * an).norm_sqr()
            })
            .sum();
        Ok(residual.sqrt())
    }
}

/// One product term `coeff * |a_0>|a_1>...|a_{m-1}>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentTerm {
    pub coeff: ComplexScalar,
    pub amplitudes: Vec<ComplexScalar>,
}

impl CoherentTerm {
    pub fn new(coeff: ComplexScalar, amplitudes: Vec<ComplexScalar>) -> Self {
        Self { coeff, amplitudes }
    }

    fn overlap_product(&self, other: &CoherentTerm) -> ComplexScalar {
        // <self|other> on every mode
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| coherent_overlap(*b, *a))
            .product()
    }
}

/// A multimode field written as a weighted sum of coherent-state products.
///
/// Every term carries exactly `n_modes` amplitudes. Nothing is normalized
/// implicitly; use [`CoherentSuperposition::normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSuperposition {
    n_modes: usize,
    terms: Vec<CoherentTerm>,
}

fn finite(c: &ComplexScalar) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

impl CoherentSuperposition {
    pub fn new(n_modes: usize, terms: Vec<CoherentTerm>) -> Result<Self> {
        for t in &terms {
            if t.amplitudes.len() != n_modes {
                return Err(Error::InvalidParameter(format!(
                    "term has {} amplitudes, state has {n_modes} modes",
                    t.amplitudes.len()
                )));
            }
            if !finite(&t.coeff) || !t.amplitudes.iter().all(finite) {
                return Err(Error::InvalidParameter("non-finite coherent term".into()));
            }
        }
        Ok(Self { n_modes, terms })
    }

    /// Single-mode coherent state `|alpha>`.
    pub fn coherent(alpha: ComplexScalar) -> Self {
        Self::product(vec![alpha])
    }

    /// Product state `|a_0>|a_1>...` with unit coefficient.
    pub fn product(amplitudes: Vec<ComplexScalar>) -> Self {
        Self {
            n_modes: amplitudes.len(),
            terms: vec![CoherentTerm::new(ComplexScalar::new(1.0, 0.0), amplitudes)],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            Err(Error::BadMode {
                mode,
                n_modes: self.n_modes,
            })
        } else {
            Ok(())
        }
    }

    /// `<self|other>` from the Gram matrix of coherent overlaps.
    pub fn inner(&self, other: &CoherentSuperposition) -> Result<ComplexScalar> {
        if self.n_modes != other.n_modes {
            return Err(Error::InvalidParameter(format!(
                "inner product of {}-mode and {}-mode states",
                self.n_modes, other.n_modes
            )));
        }
        Ok(self
            .terms
            .iter()
            .flat_map(|a| {
                other
                    .terms
                    .iter()
                    .map(move |b| a.coeff.conj() * b.coeff * a.overlap_product(b))
            })
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        // Hermitian Gram matrix: diagonal plus twice the real upper triangle.
        let mut acc = 0.0;
        for (i, a) in self.terms.iter().enumerate() {
            acc += a.coeff.norm_sqr();
            for b in &self.terms[i + 1..] {
                acc += 2.0 * (a.coeff.conj() * b.coeff * a.overlap_product(b)).re;
            }
        }
        acc.max(0.0)
    }

    pub fn scaled(&self, c: ComplexScalar) -> Self {
        Self {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| CoherentTerm::new(t.coeff * c, t.amplitudes.clone()))
                .collect(),
        }
    }

    /// Formal sum `self + other`.
    pub fn superpose(&self, other: &CoherentSuperposition) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::InvalidParameter(
                "cannot add states with different mode counts".into(),
            ));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            n_modes: self.n_modes,
            terms,
        })
    }

    /// `self ⊗ other`, with `other`'s modes appended after `self`'s.
    pub fn tensor(&self, other: &CoherentSuperposition) -> Self {
        let terms = self
            .terms
            .iter()
            .flat_map(|a| {
                other.terms.iter().map(move |b| {
                    let mut amps = a.amplitudes.clone();
                    amps.extend_from_slice(&b.amplitudes);
                    CoherentTerm::new(a.coeff * b.coeff, amps)
                })
            })
            .collect();
        Self {
            n_modes: self.n_modes + other.n_modes,
            terms,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 >= ZERO_NORM_SQR) {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(ComplexScalar::new(1.0 / n2.sqrt(), 0.0)))
    }

    /// Reorders modes so that new mode `k` is old mode `order[k]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_modes];
        if order.len() != self.n_modes {
            return Err(Error::InvalidParameter(
                "permutation length mismatch".into(),
            ));
        }
        for &m in order {
            self.check_mode(m)?;
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidParameter(format!(
                    "mode {m} repeated in permutation"
                )));
            }
        }
        Ok(Self {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    CoherentTerm::new(t.coeff, order.iter().map(|&m| t.amplitudes[m]).collect())
                })
                .collect(),
        })
    }

    pub fn swap_modes(&self, a: usize, b: usize) -> Result<Self> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        let mut order: Vec<usize> = (0..self.n_modes).collect();
        order.swap(a, b);
        self.permute_modes(&order)
    }

    /// Maps every amplitude on `mode` through `f`, leaving coefficients alone.
    pub(crate) fn map_amplitudes(&self, f: impl Fn(&mut [ComplexScalar])) -> Self {
        Self {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut amps = t.amplitudes.clone();
                    f(&mut amps);
                    CoherentTerm::new(t.coeff, amps)
                })
                .collect(),
        }
    }

    /// Merges terms whose amplitudes agree within 1e-12, drops coefficients
    /// below 1e-15 and sorts terms into a deterministic order.
    pub fn canonicalize(&self) -> Self {
        let mut merged: Vec<CoherentTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged
                .iter_mut()
                .find(|m| amplitude_distance(&m.amplitudes, &t.amplitudes) < MERGE_DISTANCE)
            {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t.clone()),
            }
        }
        merged.retain(|t| t.coeff.norm() >= DROP_COEFF);
        merged.sort_by(|a, b| compare_amplitudes(&a.amplitudes, &b.amplitudes));
        Self {
            n_modes: self.n_modes,
            terms: merged,
        }
    }

    /// Term-by-term comparison after canonicalization, allowing one global phase.
    ///
    /// Amplitudes must agree within `1e-10`; coefficients within `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &CoherentSuperposition, tol: f64) -> bool {
        if self.n_modes != other.n_modes {
            return false;
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        if a.terms.len() != b.terms.len() {
            return false;
        }
        let mut pairs = Vec::with_capacity(a.terms.len());
        for ta in &a.terms {
            match b
                .terms
                .iter()
                .find(|tb| amplitude_distance(&ta.amplitudes, &tb.amplitudes) < 1e-10)
            {
                Some(tb) => pairs.push((ta.coeff, tb.coeff)),
                None => return false,
            }
        }
        let Some(&(ra, rb)) = pairs
            .iter()
            .max_by(|x, y| x.0.norm().total_cmp(&y.0.norm()))
        else {
            return true;
        };
        if ra.norm() == 0.0 || rb.norm() == 0.0 {
            return false;
        }
        let phase = (ra / rb) / (ra / rb).norm();
        pairs.iter().all(|(ca, cb)| (ca - phase * cb).norm() <= tol)
    }
}

fn amplitude_distance(a: &[ComplexScalar], b: &[ComplexScalar]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn compare_amplitudes(a: &[ComplexScalar], b: &[ComplexScalar]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Expands a single-mode coherent superposition in the photon-number basis up to `n_max`.
pub fn to_fock(state: &CoherentSuperposition, n_max: usize) -> Result<FockVector> {
    if state.n_modes() != 1 {
        return Err(Error::MultiModeState {
            n_modes: state.n_modes(),
        });
    }
    let mut amps = vec![ComplexScalar::new(0.0, 0.0); n_max + 1];
    for t in state.terms() {
        for (slot, a) in amps
            .iter_mut()
            .zip(coherent_fock_amplitudes(t.amplitudes[0], n_max))
        {
            *slot += t.coeff * a;
        }
    }
    FockVector::new(amps)
}

/// `(-1)^{a^dagger a}` on `mode`: negates that mode's amplitude in every term.
pub fn parity_apply(state: &CoherentSuperposition, mode: usize) -> Result<CoherentSuperposition> {
    state.check_mode(mode)?;
    Ok(state.map_amplitudes(|amps| amps[mode] = -amps[mode]))
}

/// `e^{-2|alpha|^2}`, the squared overlap scale between `|alpha>` and `|-alpha>`.
pub(crate) fn cat_overlap(alpha: ComplexScalar) -> f64 {
    (-2.0 * alpha.norm_sqr()).exp()
}

/// `|x|^2 + |y|^2 + 2 e^{-2|alpha|^2} Re(conj(x) y)`, the squared norm of `x|alpha> + y|-alpha>`.
pub fn cat_norm_sqr(alpha: ComplexScalar, x: ComplexScalar, y: ComplexScalar) -> f64 {
    x.norm_sqr() + y.norm_sqr() + 2.0 * cat_overlap(alpha) * (x.conj() * y).re
}

/// Rescales `(x, y)` so that `x|alpha> + y|-alpha>` has unit norm.
pub fn normalize_cat_coefficients(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
) -> Result<(ComplexScalar, ComplexScalar)> {
    let n2 = cat_norm_sqr(alpha, x, y);
    if !(n2 >= ZERO_NORM_SQR) || !finite(&x) || !finite(&y) || !finite(&alpha) {
        return Err(Error::ZeroState);
    }
    let s = 1.0 / n2.sqrt();
    Ok((x * s, y * s))
}

/// The state to teleport, `x|alpha> + y|-alpha>` rescaled to unit norm.
///
/// Also returns the squared norm before rescaling.
pub fn input_cat(
    alpha: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
) -> Result<(CoherentSuperposition, f64)> {
    let raw = cat_norm_sqr(alpha, x, y);
    let (xn, yn) = normalize_cat_coefficients(alpha, x, y)?;
    let state = CoherentSuperposition::new(
        1,
        vec![
            CoherentTerm::new(xn, vec![alpha]),
            CoherentTerm::new(yn, vec![-alpha]),
        ],
    )?;
    Ok((state, raw))
}

/// Even- and odd-cat normalizations `(N_e, N_o)`.
pub fn cat_normalizations(alpha: ComplexScalar) -> Result<(f64, f64)> {
    let r = alpha.norm();
    if !(r >= MIN_ALPHA) {
        return Err(Error::DegenerateAlpha(r));
    }
    let e = cat_overlap(alpha);
    // 1 - e^{-2|alpha|^2} without cancellation for small |alpha|
    let one_minus = -(-2.0 * alpha.norm_sqr()).exp_m1();
    Ok((
        1.0 / (2.0 * (1.0 + e)).sqrt(),
        1.0 / (2.0 * one_minus).sqrt(),
    ))
}

/// Coefficients `(x, y)` of `sin(theta/2)|alpha_e> + cos(theta/2) e^{i phi}|alpha_o>`
/// written as `x|alpha> + y|-alpha>`.
pub fn cat_from_bloch(
    alpha: ComplexScalar,
    theta: f64,
    phi: f64,
) -> Result<(ComplexScalar, ComplexScalar)> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Bloch angles out of range: theta = {theta}, phi = {phi}"
        )));
    }
    let (ne, no) = cat_normalizations(alpha)?;
    let (s, c) = (0.5 * theta).sin_cos();
    let even = ComplexScalar::new(s * ne, 0.0);
    let odd = ComplexScalar::from_polar(c * no, phi);
    Ok((even + odd, even - odd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    /// Upper Poisson tail by forward summation of the recurrence.
    fn tail_oracle(mean: f64, n: usize) -> f64 {
        let mut p = (-mean).exp();
        let mut pmf = Vec::new();
        for k in 0..=n + 2000 {
            if k > 0 {
                p *= mean / k as f64;
            }
            pmf.push(p);
        }
        pmf[n + 1..].iter().rev().sum()
    }

    #[test]
    fn overlap_identity_and_opposite() {
        let a = c(0.7, -0.3);
        assert_abs_diff_eq!(coherent_overlap(a, a).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(coherent_overlap(a, a).im, 0.0, epsilon = 1e-15);
        let o = coherent_overlap(c(1.0, 0.0), c(-1.0, 0.0));
        assert_abs_diff_eq!(o.re, (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.re, 0.135335, epsilon = 1e-6);
    }

    #[test]
    fn overlap_matches_fock_sum() {
        let (a, b) = (c(1.0, 0.0), c(0.5, 0.0));
        let fa = FockVector::coherent(a, 60);
        let fb = FockVector::coherent(b, 60);
        let direct = coherent_overlap(a, b);
        let fock = fb.inner(&fa);
        assert_abs_diff_eq!(direct.re, fock.re, epsilon = 1e-14);
        assert_abs_diff_eq!(direct.im, fock.im, epsilon = 1e-14);
    }

    #[test]
    fn nmax_vacuum_is_zero() {
        assert_eq!(
            choose_nmax(&[c(0.0, 0.0)], &TruncationPolicy::default()).unwrap(),
            0
        );
    }

    #[test]
    fn nmax_matches_tail_oracle() {
        let policy = TruncationPolicy::default();
        for alpha in [
            c(3.0, 0.0),
            c(5.0 * 2f64.sqrt(), 0.0),
            c(0.3, 0.4),
            c(1.0, 1.0),
        ] {
            let n = choose_nmax(&[alpha], &policy).unwrap();
            let mean = alpha.norm_sqr();
            assert!(
                tail_oracle(mean, n) < policy.epsilon,
                "alpha {alpha}: n = {n}"
            );
            if n > 0 {
                assert!(
                    tail_oracle(mean, n - 1) >= policy.epsilon,
                    "alpha {alpha}: n = {n} not minimal"
                );
            }
        }
        let n3 = choose_nmax(&[c(3.0, 0.0)], &policy).unwrap();
        assert!((30..=60).contains(&n3), "n = {n3}");
    }

    #[test]
    fn nmax_cap_and_empty() {
        let tight = TruncationPolicy::new(1e-12, 20).unwrap();
        assert!(matches!(
            choose_nmax(&[c(4.0, 0.0)], &tight),
            Err(Error::CapExceeded { .. })
        ));
        assert!(choose_nmax(&[], &tight).is_err());
        assert!(TruncationPolicy::new(0.0, 5).is_err());
        assert!(TruncationPolicy::new(1e-3, 0).is_err());
    }

    #[test]
    fn fock_of_vacuum_and_coherent() {
        let v = to_fock(&CoherentSuperposition::coherent(c(0.0, 0.0)), 5).unwrap();
        assert_eq!(v.amps()[0], c(1.0, 0.0));
        assert!(v.amps()[1..].iter().all(|a| a.norm() == 0.0));

        let f = to_fock(&CoherentSuperposition::coherent(c(1.0, 0.0)), 40).unwrap();
        assert_abs_diff_eq!(f.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn even_cat_has_even_support() {
        let (ne, _) = cat_normalizations(c(2.0, 0.0)).unwrap();
        let (cat, _) = input_cat(c(2.0, 0.0), c(ne, 0.0), c(ne, 0.0)).unwrap();
        let f = to_fock(&cat, 40).unwrap();
        for (n, a) in f.amps().iter().enumerate() {
            if n % 2 == 1 {
                assert!(a.norm() < 1e-14, "n = {n}: {a}");
            }
        }
    }

    #[test]
    fn to_fock_rejects_multimode() {
        let s = CoherentSuperposition::product(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(to_fock(&s, 4), Err(Error::MultiModeState { n_modes: 2 }));
    }

    #[test]
    fn large_n_amplitudes_stay_finite() {
        let f = FockVector::coherent(c(12.0, 3.0), 400);
        assert!(f
            .amps()
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite()));
        assert_abs_diff_eq!(f.norm_sqr(), 1.0, epsilon = 1e-12);
        let single = coherent_fock_amplitude(c(12.0, 3.0), 170);
        assert_abs_diff_eq!((single - f.amps()[170]).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn parity_flips_coherent_state() {
        let a = c(1.5, 0.0);
        let s = CoherentSuperposition::coherent(a);
        let p = parity_apply(&s, 0).unwrap();
        assert_eq!(p.terms()[0].amplitudes[0], -a);
        assert_eq!(parity_apply(&p, 0).unwrap(), s);
        assert_eq!(
            parity_apply(&s, 1),
            Err(Error::BadMode {
                mode: 1,
                n_modes: 1
            })
        );

        let via_fock = to_fock(&s, 40).unwrap().parity();
        let direct = to_fock(&p, 40).unwrap();
        for (x, y) in via_fock.amps().iter().zip(direct.amps()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn input_cat_normalization() {
        let (s, raw) = input_cat(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(raw, 2.0 + 2.0 * (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-14);

        let (s, _) = input_cat(c(2.3, 0.1), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let canon = s.canonicalize();
        assert_eq!(canon.terms().len(), 1);
        assert_eq!(canon.terms()[0].amplitudes[0], c(2.3, 0.1));

        let e50 = (-50.0f64).exp();
        let x = 1.0 / (2.0 * (1.0 + e50)).sqrt();
        let (s, raw) = input_cat(c(5.0, 0.0), c(x, 0.0), c(x, 0.0)).unwrap();
        assert_abs_diff_eq!(raw, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-14);

        assert_eq!(
            input_cat(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap_err(),
            Error::ZeroState
        );
    }

    #[test]
    fn bloch_poles() {
        let a = c(1.3, 0.0);
        let (ne, no) = cat_normalizations(a).unwrap();
        let (x, y) = cat_from_bloch(a, PI, 0.0).unwrap();
        assert_abs_diff_eq!((x - c(ne, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((y - c(ne, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let (x, y) = cat_from_bloch(a, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!((x - c(no, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((y + c(no, 0.0)).norm(), 0.0, epsilon = 1e-15);

        let (x, y) = cat_from_bloch(c(3.0, 0.0), FRAC_PI_2, 0.0).unwrap();
        let (s, raw) = input_cat(c(3.0, 0.0), x, y).unwrap();
        assert_abs_diff_eq!(raw, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bloch_rejects_tiny_alpha() {
        assert!(matches!(
            cat_from_bloch(c(1e-7, 0.0), 1.0, 0.0),
            Err(Error::DegenerateAlpha(_))
        ));
        assert!(cat_from_bloch(c(1.0, 0.0), 4.0, 0.0).is_err());
    }

    #[test]
    fn canonicalize_merges_and_drops() {
        let s = CoherentSuperposition::new(
            1,
            vec![
                CoherentTerm::new(c(1.0, 0.0), vec![c(1.0, 0.0)]),
                CoherentTerm::new(c(0.5, 0.0), vec![c(1.0 + 1e-14, 0.0)]),
                CoherentTerm::new(c(1e-17, 0.0), vec![c(3.0, 0.0)]),
            ],
        )
        .unwrap();
        let k = s.canonicalize();
        assert_eq!(k.terms().len(), 1);
        assert_abs_diff_eq!(k.terms()[0].coeff.re, 1.5, epsilon = 1e-15);
        assert!(k.approx_eq_up_to_phase(&s.scaled(c(0.0, 1.0)), 1e-12));
    }

    #[test]
    fn trace_distance_of_identical_states_is_tiny() {
        let f = FockVector::coherent(c(2.0, 0.5), 50);
        let g = FockVector::new(f.amps().iter().map(|a| a * c(0.0, 1.0)).collect()).unwrap();
        assert!(f.trace_distance_pure(&g).unwrap() < 1e-12);
        let h = FockVector::coherent(c(-2.0, 0.5), 50);
        assert!(f.trace_distance_pure(&h).unwrap() > 0.99);
    }
}

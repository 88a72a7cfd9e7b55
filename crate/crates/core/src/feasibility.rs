//! Cavity-QED parameter checks for the atom-field correction step.
//!
//! Two conditions must hold: `sqrt(nbar) g0 >> gamma` (coherent coupling
//! beats spontaneous emission) and `sqrt(nbar) g0 >> nbar kappa` (beats the
//! decoherence of the cat state). "Much greater" is a ratio threshold.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub const DEFAULT_RATIO_THRESHOLD: f64 = 10.0;

/// Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub g0: f64,
    /// Atomic spontaneous decay rate.
    pub gamma: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Mean photon number `|alpha|^2`.
    pub nbar: f64,
    pub ratio_threshold: f64,
}

impl CavityParams {
    pub fn new(g0: f64, gamma: f64, kappa: f64, nbar: f64) -> Result<Self> {
        let p = Self {
            g0,
            gamma,
            kappa,
            nbar,
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_threshold(mut self, ratio_threshold: f64) -> Result<Self> {
        self.ratio_threshold = ratio_threshold;
        self.validate()?;
        Ok(self)
    }

    pub fn with_nbar(mut self, nbar: f64) -> Result<Self> {
        self.nbar = nbar;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.g0) && positive(self.gamma) && positive(self.kappa)) {
            return Err(Error::InvalidParameter(format!(
                "rates must be positive: g0 = {}, gamma = {}, kappa = {}",
                self.g0, self.gamma, self.kappa
            )));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nbar must be >= 0, got {}",
                self.nbar
            )));
        }
        if !positive(self.ratio_threshold) {
            return Err(Error::InvalidParameter(format!(
                "ratio threshold must be positive, got {}",
                self.ratio_threshold
            )));
        }
        Ok(())
    }

    /// Named experimental parameter sets, with `nbar` set to 1.
    ///
    /// * `rydberg`: circular Rydberg atoms in a microwave cavity,
    ///   `g0/2pi = 47 kHz`, atomic lifetime 30 ms, photon lifetime 1 ms.
    /// * `cesium`: trapped cesium in an optical cavity,
    ///   `g0/2pi = 32 MHz`, `gamma/2pi = 2.6 MHz`, `kappa/2pi = 4 MHz`.
    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rydberg" => Self::new(TAU * 47e3, 1.0 / 30e-3, 1.0 / 1e-3, 1.0),
            "cesium" => Self::new(TAU * 32e6, TAU * 2.6e6, TAU * 4e6, 1.0),
            _ => Err(Error::UnknownPreset(name.to_string())),
        }
    }

    pub const PRESETS: [&'static str; 2] = ["rydberg", "cesium"];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub params: CavityParams,
    /// `sqrt(nbar) g0 / gamma`
    pub decay_ratio: f64,
    /// `sqrt(nbar) g0 / (nbar kappa)`; infinite at `nbar = 0`.
    pub decoherence_ratio: f64,
    pub decay_ok: bool,
    pub decoherence_ok: bool,
    /// `gamma / g0`: `sqrt(nbar)` must be well above this.
    pub sqrt_nbar_lower: f64,
    /// `g0 / kappa`: `sqrt(nbar)` must be well below this.
    pub sqrt_nbar_upper: f64,
    /// `(gamma / g0)^2`
    pub nbar_lower: f64,
    /// `(g0 / kappa)^2`
    pub nbar_upper: f64,
    /// Bounds with the ratio threshold applied.
    pub nbar_lower_strict: f64,
    pub nbar_upper_strict: f64,
}

impl FeasibilityReport {
    pub fn passes(&self) -> bool {
        self.decay_ok && self.decoherence_ok
    }

    /// `(g0, gamma, kappa) / 2pi` in Hz.
    pub fn rates_hz(&self) -> (f64, f64, f64) {
        let p = &self.params;
        (p.g0 / TAU, p.gamma / TAU, p.kappa / TAU)
    }
}

pub fn check(params: &CavityParams) -> Result<FeasibilityReport> {
    params.validate()?;
    let CavityParams {
        g0,
        gamma,
        kappa,
        nbar,
        ratio_threshold: thr,
    } = *params;
    let root = nbar.sqrt();
    let decay_ratio = root * g0 / gamma;
    let decoherence_ratio = if nbar > 0.0 {
        g0 / (root * kappa)
    } else {
        f64::INFINITY
    };
    let sqrt_nbar_lower = gamma / g0;
    let sqrt_nbar_upper = g0 / kappa;
    let nbar_lower = sqrt_nbar_lower * sqrt_nbar_lower;
    let nbar_upper = sqrt_nbar_upper * sqrt_nbar_upper;
    Ok(FeasibilityReport {
        params: *params,
        decay_ratio,
        decoherence_ratio,
        decay_ok: decay_ratio >= thr,
        decoherence_ok: decoherence_ratio >= thr,
        sqrt_nbar_lower,
        sqrt_nbar_upper,
        nbar_lower,
        nbar_upper,
        nbar_lower_strict: thr * thr * nbar_lower,
        nbar_upper_strict: nbar_upper / (thr * thr),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rydberg_window() {
        let r = check(&CavityParams::preset("rydberg").unwrap()).unwrap();
        assert_relative_eq!(r.sqrt_nbar_upper, TAU * 47.0, max_relative = 1e-12);
        assert!(r.nbar_upper < 1e5 && r.nbar_upper > 5e4);
        assert!(r.decay_ok);
    }

    #[test]
    fn cesium_window() {
        let r = check(&CavityParams::preset("Cesium").unwrap()).unwrap();
        assert_relative_eq!(r.sqrt_nbar_lower, 2.6 / 32.0, max_relative = 1e-12);
        assert_relative_eq!(r.sqrt_nbar_upper, 8.0, max_relative = 1e-12);
        assert_relative_eq!(r.nbar_upper, 64.0, max_relative = 1e-12);
        let (g, _, k) = r.rates_hz();
        assert_relative_eq!(g, 32e6, max_relative = 1e-12);
        assert_relative_eq!(k, 4e6, max_relative = 1e-12);
    }

    #[test]
    fn empty_field_fails_decay_condition() {
        let p = CavityParams::preset("cesium")
            .unwrap()
            .with_nbar(0.0)
            .unwrap();
        let r = check(&p).unwrap();
        assert!(!r.decay_ok);
        assert!(r.decoherence_ok);
        assert!(!r.passes());
    }

    #[test]
    fn validation() {
        assert_eq!(
            CavityParams::preset("sodium"),
            Err(Error::UnknownPreset("sodium".into()))
        );
        assert!(CavityParams::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(CavityParams::new(1.0, 1.0, 1.0, -1.0).is_err());
    }
}

//! Average fidelity over the input-state sphere.
//!
//! Sample `i` draws its Bloch angles from ChaCha8 seeded with `seed` on
//! stream `i`, so a sample's value depends only on `(seed, i)`. Values are
//! collected in index order and reduced with a compensated sum, which keeps
//! results bit-identical for any number of worker threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{ComplexScalar, TruncationPolicy};
use crate::jc::{fixed_time, FidelityTrace, FmaxGrid};
use crate::optimize::{bisect, Bisection};
use crate::par::{neumaier_sum, try_map_indexed, Execution};
use crate::protocol::{
    outcome_fidelities_at, outcome_probabilities_closed, outcome_probabilities_simulated, CatInput,
    Schedule,
};

/// Average fidelity of the standard linear-optics polarization scheme.
pub const CLASSICAL_BASELINE: f64 = 5.0 / 6.0;

/// Where the class probabilities in the estimator come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbabilitySource {
    #[default]
    Closed,
    /// Photon counting on the joint state; slow.
    Simulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub schedule: Schedule,
    pub alpha: ComplexScalar,
    pub g0: f64,
    pub probabilities: ProbabilitySource,
    pub policy: TruncationPolicy,
    /// Half-width of the oracle time search; `None` for the default.
    pub window: Option<f64>,
}

impl McConfig {
    pub fn new(alpha: ComplexScalar, n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            schedule: Schedule::Blind,
            alpha,
            g0: 1.0,
            probabilities: ProbabilitySource::Closed,
            policy: TruncationPolicy::default(),
            window: None,
        }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_alpha(mut self, alpha: ComplexScalar) -> Self {
        self.alpha = alpha;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter(
                "n_samples must be at least 1".into(),
            ));
        }
        if !(self.g0 > 0.0 && self.g0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "g0 must be positive, got {}",
                self.g0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_err: f64,
    pub n_samples: usize,
}

/// ChaCha8 keyed by `seed`, positioned on stream `index`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Uniform point on the sphere: `cos theta` uniform on `[-1, 1]`, `phi` on `[0, 2 pi)`.
pub fn sample_bloch<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let cos_theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0);
    (cos_theta.acos(), std::f64::consts::TAU * v)
}

/// Mean and standard error of `f(theta, phi)` over `n` sphere samples.
pub fn average_over_sphere<F>(n: usize, seed: u64, exec: Execution, f: F) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> Result<f64> + Sync + Send,
{
    if n == 0 {
        return Err(Error::InvalidParameter(
            "n_samples must be at least 1".into(),
        ));
    }
    let values = try_map_indexed(n, exec, |i| {
        let (theta, phi) = sample_bloch(&mut sample_rng(seed, i));
        f(theta, phi)
    })?;
    Ok(estimate(&values))
}

fn estimate(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mean = neumaier_sum(values.iter().copied()) / n as f64;
    let std_err = if n > 1 {
        let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_err,
        n_samples: n,
    }
}

/// Per-`alpha` state shared by every sample.
struct Evaluator {
    cfg: McConfig,
    t_fixed: f64,
    grid: Option<FmaxGrid>,
}

impl Evaluator {
    fn new(cfg: &McConfig) -> Result<Self> {
        cfg.validate()?;
        let t_fixed = fixed_time(cfg.alpha, cfg.g0)?;
        let grid = match cfg.schedule {
            Schedule::Blind => None,
            Schedule::Oracle => {
                let window = match cfg.window {
                    Some(w) => w,
                    None => FmaxGrid::default_window(cfg.alpha, cfg.g0)?,
                };
                let n_max = crate::fock::choose_nmax(&[cfg.alpha], &cfg.policy)?;
                Some(FmaxGrid::new(cfg.alpha, cfg.g0, window, n_max)?)
            }
        };
        Ok(Self {
            cfg: cfg.clone(),
            t_fixed,
            grid,
        })
    }

    fn value(&self, theta: f64, phi: f64) -> Result<f64> {
        let cfg = &self.cfg;
        let input = CatInput::from_bloch(cfg.alpha, theta, phi)?;
        let t = match &self.grid {
            None => self.t_fixed,
            Some(grid) => {
                let trace = FidelityTrace::for_cat(input.alpha, input.x, input.y, &cfg.policy)?;
                grid.search(&trace)?.t_star
            }
        };
        let f = outcome_fidelities_at(&input, cfg.g0, t, &cfg.policy)?;
        let p = match cfg.probabilities {
            ProbabilitySource::Closed => {
                outcome_probabilities_closed(input.alpha, input.x, input.y)
            }
            ProbabilitySource::Simulated => outcome_probabilities_simulated(&input, &cfg.policy)?.p,
        };
        Ok(p.iter().zip(&f).map(|(p, f)| p * f).sum())
    }
}

/// `sum_i P_i F_i` for one input state.
pub fn sample_fidelity(cfg: &McConfig, theta: f64, phi: f64) -> Result<f64> {
    Evaluator::new(cfg)?.value(theta, phi)
}

pub fn average_fidelity(cfg: &McConfig) -> Result<McEstimate> {
    average_fidelity_with(cfg, Execution::default())
}

pub fn average_fidelity_with(cfg: &McConfig, exec: Execution) -> Result<McEstimate> {
    let eval = Evaluator::new(cfg)?;
    average_over_sphere(cfg.n_samples, cfg.seed, exec, |theta, phi| {
        eval.value(theta, phi)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverConfig {
    /// Sampling setup; its `alpha` is ignored.
    pub mc: McConfig,
    pub target: f64,
    pub tol: f64,
    pub lo: f64,
    pub hi: f64,
    pub max_iter: usize,
}

impl CrossoverConfig {
    pub fn new(n_samples: usize, seed: u64, tol: f64) -> Self {
        Self {
            mc: McConfig::new(ComplexScalar::new(1.0, 0.0), n_samples, seed),
            target: CLASSICAL_BASELINE,
            tol,
            lo: 0.5,
            hi: 3.0,
            max_iter: 100,
        }
    }
}

/// Real `alpha` in `[lo, hi]` where the average fidelity crosses `target`.
///
/// Every evaluation reuses the same seed, so all `alpha` see the same set of
/// input states and the objective is a smooth function of `alpha`.
pub fn crossover_search(cfg: &CrossoverConfig) -> Result<Bisection> {
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {}",
            cfg.tol
        )));
    }
    bisect(
        |a| {
            let mc = cfg.mc.clone().with_alpha(ComplexScalar::new(a, 0.0));
            Ok(average_fidelity(&mc)?.mean - cfg.target)
        },
        cfg.lo,
        cfg.hi,
        cfg.tol,
        cfg.max_iter,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<_> = (0..5)
            .map(|i| sample_bloch(&mut sample_rng(7, i)))
            .collect();
        let b: Vec<_> = (0..5)
            .rev()
            .map(|i| sample_bloch(&mut sample_rng(7, i)))
            .collect();
        assert!(a.iter().eq(b.iter().rev()));
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn angles_in_range() {
        let mut rng = sample_rng(1, 0);
        for _ in 0..1000 {
            let (t, p) = sample_bloch(&mut rng);
            assert!((0.0..=std::f64::consts::PI).contains(&t));
            assert!((0.0..std::f64::consts::TAU).contains(&p));
        }
    }

    #[test]
    fn constant_integrand() {
        let est = average_over_sphere(1000, 3, Execution::Sequential, |_, _| Ok(1.0)).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn sequential_matches_parallel() {
        let cfg = McConfig::new(ComplexScalar::new(1.5, 0.0), 200, 11);
        let s = average_fidelity_with(&cfg, Execution::Sequential).unwrap();
        let p = average_fidelity_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(s.mean.to_bits(), p.mean.to_bits());
        assert_eq!(s.std_err.to_bits(), p.std_err.to_bits());
    }

    #[test]
    fn large_alpha_approaches_one() {
        // Half the weight is corrected exactly; the JC branches sit near 0.966 at alpha = 5.
        let cfg = McConfig::new(ComplexScalar::new(5.0, 0.0), 200, 5);
        let est = average_fidelity(&cfg).unwrap();
        assert!(est.mean > 0.98 && est.mean <= 1.0, "{est:?}");
    }

    #[test]
    fn target_zero_has_no_bracket() {
        let mut cfg = CrossoverConfig::new(100, 1, 1e-3);
        cfg.target = 0.0;
        assert!(matches!(
            crossover_search(&cfg),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn rejects_empty_run() {
        let cfg = McConfig::new(ComplexScalar::new(1.0, 0.0), 0, 1);
        assert!(average_fidelity(&cfg).is_err());
        let est = average_fidelity(&McConfig::new(ComplexScalar::new(1.0, 0.0), 1, 1)).unwrap();
        assert_abs_diff_eq!(est.std_err, 0.0);
    }
}

use std::f64::consts::PI;
use std::fmt::Write as _;

use catport::feasibility::{self, CavityParams};
use catport::fock::cat_from_bloch;
use catport::jc::{correction_states, FidelityTrace};
use catport::montecarlo::{
    average_fidelity, sample_bloch, sample_rng, McConfig, ProbabilitySource, CLASSICAL_BASELINE,
};
use catport::protocol::{failure_probability, outcome_probabilities_simulated, teleport, CatInput};
use catport::{
    excitation_probability, fidelity_closed_form, find_fmax, jc_evolve, ComplexScalar, JcParams,
    Schedule,
};

use crate::args::{
    FeasibilityArgs, Fig1Args, Fig2Args, Fig3Args, PfailArgs, StateArgs, StateSpec, TeleportArgs,
};
use crate::output::{format_sig, Cell, Table};
use crate::CliError;

/// A command's tabular output, with an optional human-readable summary.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub summary: Option<String>,
    pub seed: Option<u64>,
}

impl Report {
    fn table(table: Table) -> Self {
        Self {
            table,
            summary: None,
            seed: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

/// `n` evenly spaced amplitudes from `lo` to `hi`.
pub fn alpha_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    positive("alpha-min", lo)?;
    positive("alpha-max", hi)?;
    match n {
        0 => Err(usage("--n-points must be at least 1")),
        1 if lo == hi => Ok(vec![lo]),
        1 => Err(usage("--n-points 1 needs --alpha-min equal to --alpha-max")),
        _ if lo >= hi => Err(usage(format!(
            "--alpha-min ({lo}) must be below --alpha-max ({hi})"
        ))),
        _ => Ok((0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()),
    }
}

fn resolve_state(
    state: &StateArgs,
    fallback: (f64, f64),
) -> Result<(CatInput, StateSpec), CliError> {
    let alpha = state.amplitude();
    let spec = state.spec().map_err(usage)?;
    let (x, y) = match spec {
        StateSpec::Bloch { theta, phi } => cat_from_bloch(alpha, theta, phi)?,
        StateSpec::Coefficients { x, y } => (x, y),
        StateSpec::Unspecified => cat_from_bloch(alpha, fallback.0, fallback.1)?,
    };
    Ok((CatInput::new(alpha, x, y)?, spec))
}

pub fn fig1(a: &Fig1Args) -> Result<Report, CliError> {
    let (input, _) = resolve_state(&a.state, (PI, 0.0))?;
    let g0 = positive("g0", a.g0)?;
    if a.n_points < 2 {
        return Err(usage("--n-points must be at least 2"));
    }
    let t_max = match a.t_max {
        Some(t) => positive("t-max", t)?,
        None => 4.0 * PI / (input.alpha.norm() * g0),
    };
    let policy = a.numeric.policy()?;
    let trace = FidelityTrace::for_cat(input.alpha, input.x, input.y, &policy)?;
    let (initial, _) = correction_states(input.alpha, input.x, input.y, &policy)?;

    let mut table = Table::new(&["t", "F_closed", "F_numeric", "P_e"]);
    for k in 0..a.n_points {
        let t = t_max * k as f64 / (a.n_points - 1) as f64;
        let params = JcParams::new(g0, t)?;
        table.push(vec![
            t.into(),
            fidelity_closed_form(input.alpha, input.x, input.y, params)?.into(),
            trace.fidelity(g0 * t).into(),
            excitation_probability(&jc_evolve(&initial, params)).into(),
        ]);
    }
    Ok(Report::table(table))
}

pub fn fig2(a: &Fig2Args) -> Result<Report, CliError> {
    let alphas = alpha_grid(a.alpha_min, a.alpha_max, a.n_points)?;
    let g0 = positive("g0", a.g0)?;
    let policy = a.numeric.policy()?;
    let mut table = Table::new(&[
        "alpha",
        "F_even_fixed_t",
        "F_odd_fixed_t",
        "F_even_max",
        "F_odd_max",
    ]);
    for alpha in alphas {
        let amp = ComplexScalar::new(alpha, 0.0);
        let fmax = |theta: f64| -> Result<_, CliError> {
            let (x, y) = cat_from_bloch(amp, theta, 0.0)?;
            Ok(find_fmax(amp, x, y, g0, None, &policy)?)
        };
        let even = fmax(PI)?;
        let odd = fmax(0.0)?;
        table.push(vec![
            alpha.into(),
            even.f_fixed.into(),
            odd.f_fixed.into(),
            even.f_max.into(),
            odd.f_max.into(),
        ]);
    }
    Ok(Report::table(table))
}

pub fn fig3(a: &Fig3Args) -> Result<Report, CliError> {
    let alphas = alpha_grid(a.alpha_min, a.alpha_max, a.n_points)?;
    let g0 = positive("g0", a.g0)?;
    if a.samples < 100 {
        return Err(usage(format!(
            "--samples must be at least 100, got {}",
            a.samples
        )));
    }
    let policy = a.numeric.policy()?;
    let mut table = Table::new(&[
        "alpha",
        "f_ave_max",
        "f_ave_fixed_t",
        "std_err_max",
        "std_err_fixed_t",
        "baseline",
    ]);
    for alpha in alphas {
        let mut cfg = McConfig::new(ComplexScalar::new(alpha, 0.0), a.samples, a.seed);
        cfg.g0 = g0;
        cfg.policy = policy;
        if a.simulated_probabilities {
            cfg.probabilities = ProbabilitySource::Simulated;
        }
        let fixed = average_fidelity(&cfg)?;
        let best = average_fidelity(&cfg.with_schedule(Schedule::Oracle))?;
        table.push(vec![
            alpha.into(),
            best.mean.into(),
            fixed.mean.into(),
            best.std_err.into(),
            fixed.std_err.into(),
            CLASSICAL_BASELINE.into(),
        ]);
    }
    Ok(Report {
        table,
        summary: None,
        seed: Some(a.seed),
    })
}

pub fn pfail(a: &PfailArgs) -> Result<Report, CliError> {
    let alphas = alpha_grid(a.alpha_min, a.alpha_max, a.n_points)?;
    let policy = a.numeric.policy()?;
    let mut table = Table::new(&["alpha", "p_fail_closed", "p_fail_simulated"]);
    for alpha in alphas {
        let input = CatInput::from_bloch(ComplexScalar::new(alpha, 0.0), a.theta, a.phi)?;
        let sim = outcome_probabilities_simulated(&input, &policy)?;
        table.push(vec![
            alpha.into(),
            failure_probability(input.alpha, input.x, input.y).into(),
            sim.p[4].into(),
        ]);
    }
    Ok(Report::table(table))
}

fn fmt_complex(z: ComplexScalar) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!(
        "{}{sign}{}i",
        format_sig(z.re, 6),
        format_sig(z.im.abs(), 6)
    )
}

pub fn teleport_cmd(a: &TeleportArgs) -> Result<Report, CliError> {
    let drawn = sample_bloch(&mut sample_rng(a.seed, 0));
    let (input, spec) = resolve_state(&a.state, drawn)?;
    let g0 = positive("g0", a.g0)?;
    let schedule: Schedule = a.schedule.into();
    let run = teleport(&input, g0, schedule, &a.numeric.policy()?)?;

    let mut table = Table::new(&[
        "outcome",
        "n_e",
        "n_f",
        "probability",
        "correction",
        "fidelity",
        "t_used",
    ]);
    for r in &run.reports {
        table.push(vec![
            r.outcome.tag.name().into(),
            r.outcome.counts.0.into(),
            r.outcome.counts.1.into(),
            r.probability.into(),
            r.correction.name().into(),
            r.fidelity.into(),
            r.t_used.into(),
        ]);
    }

    let mut s = String::new();
    let _ = writeln!(s, "alpha = {}", fmt_complex(input.alpha));
    if spec == StateSpec::Unspecified {
        let _ = writeln!(
            s,
            "input drawn with seed {}: theta = {}, phi = {}",
            a.seed,
            format_sig(drawn.0, 6),
            format_sig(drawn.1, 6)
        );
    }
    let _ = writeln!(
        s,
        "x = {}, y = {}",
        fmt_complex(input.x),
        fmt_complex(input.y)
    );
    let _ = writeln!(s, "schedule = {schedule}, g0 = {g0}");
    let _ = writeln!(
        s,
        "{:<10} {:>8} {:>14} {:>15} {:>14} {:>12}",
        "outcome", "counts", "probability", "correction", "fidelity", "t"
    );
    for r in &run.reports {
        let _ = writeln!(
            s,
            "{:<10} {:>8} {:>14.10} {:>15} {:>14.10} {:>12.6}",
            r.outcome.tag.name(),
            format!("({},{})", r.outcome.counts.0, r.outcome.counts.1),
            r.probability,
            r.correction.name(),
            r.fidelity,
            r.t_used
        );
    }
    let total: f64 = run.reports.iter().map(|r| r.probability).sum();
    let _ = writeln!(
        s,
        "sum P = {total:.12}, beyond cutoff = {:.2e}, both detectors = {:.2e}",
        run.simulated.tail, run.simulated.impossible
    );
    let _ = write!(s, "mean fidelity = {:.10}", run.mean_fidelity());
    Ok(Report {
        table,
        summary: Some(s),
        seed: (spec == StateSpec::Unspecified).then_some(a.seed),
    })
}

pub fn feasibility_cmd(a: &FeasibilityArgs) -> Result<Report, CliError> {
    let base = match &a.preset {
        Some(name) => Some(CavityParams::preset(name)?),
        None => None,
    };
    let pick = |flag: Option<f64>, from: Option<f64>, name: &str| {
        flag.or(from)
            .ok_or_else(|| usage(format!("--{name} is required without --preset")))
    };
    let params = CavityParams::new(
        pick(a.g0, base.map(|p| p.g0), "g0")?,
        pick(a.gamma, base.map(|p| p.gamma), "gamma")?,
        pick(a.kappa, base.map(|p| p.kappa), "kappa")?,
        a.nbar,
    )?
    .with_threshold(a.threshold)?;
    let r = feasibility::check(&params)?;
    let (g_hz, gamma_hz, kappa_hz) = r.rates_hz();

    let mut table = Table::new(&["quantity", "value"]);
    let mut row = |k: &str, v: Cell| table.push(vec![k.into(), v]);
    row(
        "preset",
        a.preset.clone().unwrap_or_else(|| "custom".into()).into(),
    );
    row("g0_rad_per_s", params.g0.into());
    row("gamma_rad_per_s", params.gamma.into());
    row("kappa_rad_per_s", params.kappa.into());
    row("g0_over_2pi_hz", g_hz.into());
    row("gamma_over_2pi_hz", gamma_hz.into());
    row("kappa_over_2pi_hz", kappa_hz.into());
    row("nbar", params.nbar.into());
    row("ratio_threshold", params.ratio_threshold.into());
    row("decay_ratio", r.decay_ratio.into());
    row("decoherence_ratio", r.decoherence_ratio.into());
    row("decay_ok", r.decay_ok.into());
    row("decoherence_ok", r.decoherence_ok.into());
    row("sqrt_nbar_lower", r.sqrt_nbar_lower.into());
    row("sqrt_nbar_upper", r.sqrt_nbar_upper.into());
    row("nbar_lower", r.nbar_lower.into());
    row("nbar_upper", r.nbar_upper.into());
    row("nbar_lower_strict", r.nbar_lower_strict.into());
    row("nbar_upper_strict", r.nbar_upper_strict.into());
    row("passes", r.passes().into());

    let verdict = |ok: bool| if ok { "ok" } else { "too small" };
    let mut s = String::new();
    if let Some(name) = &a.preset {
        let _ = writeln!(s, "preset: {name}");
    }
    let _ = writeln!(
        s,
        "g0/2pi = {} Hz, gamma/2pi = {} Hz, kappa/2pi = {} Hz",
        format_sig(g_hz, 3),
        format_sig(gamma_hz, 3),
        format_sig(kappa_hz, 3)
    );
    let _ = writeln!(
        s,
        "g0 = {} rad/s, gamma = {} rad/s, kappa = {} rad/s",
        format_sig(params.g0, 3),
        format_sig(params.gamma, 3),
        format_sig(params.kappa, 3)
    );
    let _ = writeln!(
        s,
        "nbar = {}: sqrt(nbar) g0 / gamma = {} ({}), sqrt(nbar) g0 / (nbar kappa) = {} ({})",
        params.nbar,
        format_sig(r.decay_ratio, 3),
        verdict(r.decay_ok),
        format_sig(r.decoherence_ratio, 3),
        verdict(r.decoherence_ok)
    );
    let _ = writeln!(
        s,
        "window: {} << sqrt(nbar) << {}, i.e. {} << nbar << {}",
        format_sig(r.sqrt_nbar_lower, 2),
        format_sig(r.sqrt_nbar_upper, 2),
        format_sig(r.nbar_lower, 2),
        format_sig(r.nbar_upper, 2)
    );
    let _ = writeln!(
        s,
        "at ratio {}: {} <= nbar <= {}",
        params.ratio_threshold,
        format_sig(r.nbar_lower_strict, 2),
        format_sig(r.nbar_upper_strict, 2)
    );
    let _ = write!(s, "result: {}", if r.passes() { "PASS" } else { "FAIL" });
    Ok(Report {
        table,
        summary: Some(s),
        seed: None,
    })
}

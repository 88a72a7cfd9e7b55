//! Jaynes-Cummings propagation against a dense matrix exponential, and the
//! closed-form fidelity series against direct propagation.

use approx::assert_abs_diff_eq;
use catport::fock::{cat_from_bloch, choose_nmax, TruncationPolicy};
use catport::jc::{correction_states, fidelity_closed_form, fidelity_numeric};
use catport::{field_fidelity, jc_evolve, ComplexScalar, FockVector, JcParams};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

/// `exp(-i H t)` with `H = (g0/2)(a sigma+ + a^dag sigma-)` on the basis
/// `|g,0..=n_max>, |e,0..=n_max>`. `|e,n_max>` is left uncoupled to match the
/// truncation of the library propagator.
fn dense_propagator(n_max: usize, g0: f64, t: f64) -> DMatrix<ComplexScalar> {
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::<ComplexScalar>::zeros(dim, dim);
    for n in 1..=n_max {
        let g = n;
        let e = n_max + 1 + (n - 1);
        let w = c(0.5 * g0 * (n as f64).sqrt(), 0.0);
        h[(e, g)] = w;
        h[(g, e)] = w;
    }
    (h * c(0.0, -t)).exp()
}

fn dense_evolve(field: &FockVector, g0: f64, t: f64) -> (Vec<ComplexScalar>, Vec<ComplexScalar>) {
    let n_max = field.n_max();
    let mut psi = DVector::<ComplexScalar>::zeros(2 * (n_max + 1));
    for (n, a) in field.amps().iter().enumerate() {
        psi[n] = *a;
    }
    let out = dense_propagator(n_max, g0, t) * psi;
    let g = out.iter().take(n_max + 1).copied().collect();
    let e = out.iter().skip(n_max + 1).copied().collect();
    (g, e)
}

#[test]
fn propagator_matches_matrix_exponential() {
    let alpha = c(3.0, 0.0);
    let policy = TruncationPolicy::default();
    for (theta, phi) in [(0.0, 0.0), (PI / 3.0, 0.7), (PI, 0.0)] {
        let (x, y) = cat_from_bloch(alpha, theta, phi).unwrap();
        let (initial, target) = correction_states(alpha, x, y, &policy).unwrap();
        for t in [0.1, PI / 3.0, 2.0, 5.5] {
            let lib = jc_evolve(&initial, JcParams::new(1.0, t).unwrap());
            let (g, e) = dense_evolve(&initial, 1.0, t);
            for (a, b) in lib.g_amps().iter().zip(&g) {
                assert!((a - b).norm() < 1e-8, "g amplitude at t = {t}: {a} vs {b}");
            }
            for (a, b) in lib.e_amps().iter().zip(&e) {
                assert!((a - b).norm() < 1e-8, "e amplitude at t = {t}: {a} vs {b}");
            }
            let dense_f = target
                .amps()
                .iter()
                .zip(&g)
                .map(|(t, a)| t.conj() * a)
                .sum::<ComplexScalar>()
                .norm_sqr()
                + target
                    .amps()
                    .iter()
                    .zip(&e)
                    .map(|(t, a)| t.conj() * a)
                    .sum::<ComplexScalar>()
                    .norm_sqr();
            assert_abs_diff_eq!(field_fidelity(&lib, &target), dense_f, epsilon = 1e-8);
        }
    }
}

#[test]
fn closed_form_matches_propagation_on_real_inputs() {
    let policy = TruncationPolicy::default().with_epsilon(1e-14).unwrap();
    for a in [1.0, 2.0, 3.0, 5.0] {
        let alpha = c(a, 0.0);
        for theta in [0.0, PI / 3.0, PI / 2.0, PI] {
            let (x, y) = cat_from_bloch(alpha, theta, 0.0).unwrap();
            let t_end = 4.0 * PI / a;
            for k in 0..100 {
                let t = t_end * k as f64 / 99.0;
                let params = JcParams::new(1.0, t).unwrap();
                let closed = fidelity_closed_form(alpha, x, y, params).unwrap();
                let numeric = fidelity_numeric(alpha, x, y, params, &policy).unwrap();
                assert!(
                    (closed - numeric).abs() < 1e-6,
                    "alpha {a}, theta {theta}, t {t}: {closed} vs {numeric}"
                );
            }
        }
    }
}

#[test]
fn closed_form_handles_complex_amplitudes() {
    let policy = TruncationPolicy::default().with_epsilon(1e-14).unwrap();
    let mut worst = 0.0f64;
    for alpha in [c(1.2, 0.9), c(0.0, 2.0), c(-2.5, 1.0)] {
        for (theta, phi) in [(0.4, 1.1), (PI / 2.0, PI / 2.0), (2.5, 4.0)] {
            let (x, y) = cat_from_bloch(alpha, theta, phi).unwrap();
            for t in [0.3, 1.0, 2.7, 6.0] {
                let params = JcParams::new(1.0, t).unwrap();
                let closed = fidelity_closed_form(alpha, x, y, params).unwrap();
                let numeric = fidelity_numeric(alpha, x, y, params, &policy).unwrap();
                worst = worst.max((closed - numeric).abs());
            }
        }
    }
    assert!(worst < 1e-10, "largest deviation {worst:e}");
}

#[test]
fn cutoff_grows_with_amplitude() {
    let policy = TruncationPolicy::default();
    let small = choose_nmax(&[c(1.0, 0.0)], &policy).unwrap();
    let large = choose_nmax(&[c(5.0, 0.0)], &policy).unwrap();
    assert!(large > small);
}

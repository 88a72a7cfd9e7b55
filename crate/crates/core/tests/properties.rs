use catport::fock::{cat_from_bloch, TruncationPolicy};
use catport::jc::{fidelity_closed_form, fidelity_numeric};
use catport::optics::{beam_splitter, OutcomeTag};
use catport::protocol::{
    conditional_state, failure_probability, line_state, outcome_probabilities_closed,
    outcome_probabilities_simulated, CatInput,
};
use catport::{
    jc_evolve, parity_apply, to_fock, CoherentSuperposition, CoherentTerm, ComplexScalar, JcParams,
};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn complex(max: f64) -> impl Strategy<Value = ComplexScalar> {
    (-max..max, -max..max).prop_map(|(re, im)| ComplexScalar::new(re, im))
}

fn amplitude() -> impl Strategy<Value = ComplexScalar> {
    (0.3f64..3.0, 0.0..TAU).prop_map(|(r, p)| ComplexScalar::from_polar(r, p))
}

fn bloch() -> impl Strategy<Value = (f64, f64)> {
    (-1.0f64..=1.0, 0.0..TAU).prop_map(|(c, p)| (c.acos(), p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beam_splitter_preserves_norm(a in complex(2.0), b in complex(2.0), c in complex(1.0), d in complex(1.0)) {
        let state = CoherentSuperposition::new(2, vec![
            CoherentTerm::new(ComplexScalar::new(1.0, 0.0), vec![a, b]),
            CoherentTerm::new(ComplexScalar::new(0.5, -0.3), vec![c, d]),
        ]).unwrap();
        let out = beam_splitter(&state, 0, 1).unwrap();
        prop_assert!((out.norm_sqr() - state.norm_sqr()).abs() < 1e-10 * state.norm_sqr().max(1.0));
    }

    #[test]
    fn parity_is_an_involution(alpha in amplitude(), (theta, phi) in bloch()) {
        let input = CatInput::from_bloch(alpha, theta, phi).unwrap();
        let s = input.state().unwrap();
        let twice = parity_apply(&parity_apply(&s, 0).unwrap(), 0).unwrap();
        prop_assert!(twice.approx_eq_up_to_phase(&s, 1e-12));
    }

    #[test]
    fn jc_evolution_is_unitary(alpha in amplitude(), (theta, phi) in bloch(), t in 0.0f64..20.0) {
        let input = CatInput::from_bloch(alpha, theta, phi).unwrap();
        let field = to_fock(&input.state().unwrap(), 60).unwrap();
        let out = jc_evolve(&field, JcParams::new(1.0, t).unwrap());
        prop_assert!((out.norm_sqr() - field.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn closed_probabilities_are_a_distribution(alpha in amplitude(), (theta, phi) in bloch()) {
        let input = CatInput::from_bloch(alpha, theta, phi).unwrap();
        let p = outcome_probabilities_closed(input.alpha, input.x, input.y);
        prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn failure_probability_ignores_global_phase(alpha in amplitude(), (theta, phi) in bloch(), g in 0.0..TAU) {
        let input = CatInput::from_bloch(alpha, theta, phi).unwrap();
        let u = ComplexScalar::from_polar(1.0, g);
        let a = failure_probability(input.alpha, input.x, input.y);
        let b = failure_probability(input.alpha, u * input.x, u * input.y);
        prop_assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn closed_fidelity_matches_propagation(alpha in amplitude(), (theta, phi) in bloch(), t in 0.0f64..8.0) {
        let (x, y) = cat_from_bloch(alpha, theta, phi).unwrap();
        let params = JcParams::new(1.0, t).unwrap();
        let policy = TruncationPolicy::default().with_epsilon(1e-14).unwrap();
        if let (Ok(closed), Ok(numeric)) = (
            fidelity_closed_form(alpha, x, y, params),
            fidelity_numeric(alpha, x, y, params, &policy),
        ) {
            prop_assert!((closed - numeric).abs() < 1e-9, "{} vs {}", closed, numeric);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&closed));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn simulated_probabilities_match_closed_forms(alpha in amplitude(), (theta, phi) in bloch()) {
        let input = CatInput::from_bloch(alpha, theta, phi).unwrap();
        let sim = outcome_probabilities_simulated(&input, &TruncationPolicy::default()).unwrap();
        let closed = outcome_probabilities_closed(input.alpha, input.x, input.y);
        for (s, c) in sim.p.iter().zip(&closed) {
            prop_assert!((s - c).abs() < 1e-8, "{:?} vs {:?}", sim.p, closed);
        }
        prop_assert!(sim.impossible < 1e-10);
        prop_assert!((sim.total() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn detector_readings_leave_decomposition_states(alpha in amplitude(), (theta, phi) in bloch(), k in 0usize..3) {
        let input = CatInput::from_bloch(alpha, theta, phi).unwrap();
        for tag in [OutcomeTag::ZeroOdd, OutcomeTag::OddZero, OutcomeTag::ZeroEven, OutcomeTag::EvenZero] {
            let (e, f) = tag.representative_counts();
            // shift the nonzero count by an even number, staying in the class
            let counts = if e == 0 { (0, f + 2 * k) } else { (e + 2 * k, 0) };
            if let Some((_, bob)) = conditional_state(&input, counts).unwrap() {
                let expected = line_state(&input, tag).unwrap();
                prop_assert!(bob.approx_eq_up_to_phase(&expected, 1e-10), "{:?} at {:?}", tag, counts);
            }
        }
    }
}

#[test]
fn conjugated_amplitude_mirrors_probabilities() {
    for a in [0.7, 1.3, 2.1] {
        let alpha = ComplexScalar::from_polar(a, 0.4);
        let input = CatInput::from_bloch(alpha, 1.0, 2.0).unwrap();
        let mirrored = CatInput::new(alpha.conj(), input.x.conj(), input.y.conj()).unwrap();
        let p = outcome_probabilities_closed(input.alpha, input.x, input.y);
        let q = outcome_probabilities_closed(mirrored.alpha, mirrored.x, mirrored.y);
        for (u, v) in p.iter().zip(&q) {
            assert!((u - v).abs() < 1e-14);
        }
    }
}

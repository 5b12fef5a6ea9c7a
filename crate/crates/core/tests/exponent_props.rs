mod common;

use common::arb_prefix;
use dlab_core::constructors::{construct_thm2, construct_thm3, DEFAULT_DIGIT_GUARD};
use dlab_core::exponents::{
    exponent_report, ordinary_exponent, ordinary_samples, uniform_samples, ExponentEstimate, ExponentKind, Tolerances,
    Window,
};
use dlab_core::measure::upsilon_step;
use num_rational::BigRational;
use proptest::prelude::*;

fn estimate(kind: ExponentKind, samples: &[dlab_core::exponents::Sample], start: usize, end: usize) -> f64 {
    ExponentEstimate::from_samples(kind, samples.to_vec(), Window::Span { start, end }, 1).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ordinary_at_least_one(pq in arb_prefix(3..=40, 1000)) {
        let est = ordinary_exponent(&pq, Window::all()).unwrap();
        prop_assert!(est.value >= 1.0 - 1e-9);
        prop_assert!(est.samples.iter().all(|s| s.local > 1.0 - 1e-9));
    }

    #[test]
    fn monotone_refinement(pq in arb_prefix(6..=30, 200), cut in 0usize..100, grow in 1usize..100) {
        let ord = ordinary_samples(&pq).unwrap();
        let ups = uniform_samples(&upsilon_step(&pq).unwrap(), ExponentKind::OmegaBar);
        for (kind, samples) in [(ExponentKind::Omega, &ord), (ExponentKind::OmegaBar, &ups)] {
            let len = samples.len();
            prop_assume!(len >= 2);
            let start = cut % len;
            let end = start + 1 + grow % (len - start);
            let narrow = estimate(kind, samples, start, end);
            let wide = estimate(kind, samples, start.saturating_sub(1), (end + 1).min(len));
            if kind.is_ordinary() {
                prop_assert!(wide >= narrow);
            } else {
                prop_assert!(wide <= narrow);
            }
        }
    }
}

#[test]
fn orderings_on_constructed_pairs() {
    let tol = Tolerances::default();
    for (num, den, depth) in [(11, 10, 12), (13, 10, 12), (3, 2, 10)] {
        let gamma = BigRational::new(num.into(), den.into());
        let (t, e) = construct_thm2(&gamma, depth, None, DEFAULT_DIGIT_GUARD).unwrap();
        let report = exponent_report(&t, &e, Window::default(), tol).unwrap();
        assert!(report.flags.is_empty(), "thm2 {num}/{den}: {:?}", report.flags);
    }
    for (num, den, depth) in [(1, 2, 10), (1, 1, 9), (3, 2, 8)] {
        let gamma = BigRational::new(num.into(), den.into());
        let (t, e) = construct_thm3(&gamma, depth, None, DEFAULT_DIGIT_GUARD).unwrap();
        let report = exponent_report(&t, &e, Window::default(), tol).unwrap();
        assert!(report.flags.is_empty(), "thm3 {num}/{den}: {:?}", report.flags);
    }
}

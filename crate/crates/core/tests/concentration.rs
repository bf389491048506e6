use geomconc::components::Selector;
use geomconc::concentration::{
    condition_check, empirical_tails, lemma_sweep, lower_tail_bound, phi, psi, psi_bound_check, psi_bound_lhs,
    psi_rearrangement_check, upper_tail_bound, wilson_interval, BoundParams, MeanSource, TailOptions,
};
use geomconc::geometry::Shape;
use geomconc::intensity::{sample_poisson, IntensityModel, PointConfig, Window};
use proptest::prelude::*;

// 40-digit references
const PSI_1E6: f64 = 5.000003333334583333666666736026687711275e-13;
const PHI_1E6: f64 = 5.000001666667083333416666680638152528297e-13;
const PSI_M1E5: f64 = 4.999966666791666333334027776586971790618e-11;
const PSI_HALF: f64 = 0.1756393646499359265756746060929182141731;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn psi_phi_reference_values() {
    assert_eq!(psi(0.0f64), 0.0);
    assert_eq!(phi(0.0f64), 0.0);
    assert!((psi(1.0f64) - 1.0).abs() < 1e-15);
    assert!(rel(psi(1e-6f64), PSI_1E6) < 1e-10);
    assert!(rel(phi(1e-6f64), PHI_1E6) < 1e-10);
    assert!(rel(psi(-1e-5f64), PSI_M1E5) < 1e-10);
    assert!(rel(psi(0.5f64), PSI_HALF) < 1e-14);
    assert!(rel(psi(1e-6f32) as f64, PSI_1E6) < 1e-5);
}

#[test]
fn lemma_examples() {
    assert!((psi_bound_lhs(1.0, 1.0) - 0.5).abs() < 1e-15);
    assert!(psi_bound_check(1.0, 1.0));
    assert!(psi_rearrangement_check(1.0));
    let s = lemma_sweep(100_000, 10.0, 50.0);
    assert_eq!(s.lemma_violations, 0);
    assert_eq!(s.rearrangement_violations, 0);
    assert!(s.max_lemma_ratio <= 1.0);
}

#[test]
fn bound_worked_example() {
    let p = BoundParams::new(3, 5, 2.0, 10.0, MeanSource::Theory).unwrap();
    assert_eq!(p.a, 153.0);
    assert!((upper_tail_bound(5.0, &p) - (-1.0f64 / 153.0).exp()).abs() < 1e-15);
    let zero = BoundParams::new(1, 2, 1.0, 0.0, MeanSource::Theory).unwrap();
    assert_eq!(lower_tail_bound(1.0, &zero), 0.0);
    assert_eq!(lower_tail_bound(0.0, &zero), 1.0);
}

#[test]
fn wilson_contains_estimate() {
    let (lo, hi) = wilson_interval(30, 1000, 2.5758293035489004);
    assert!(lo < 0.03 && hi > 0.03 && lo > 0.0);
    assert_eq!(wilson_interval(0, 1000, 2.5758293035489004).0, 0.0);
}

#[test]
fn tails_at_zero_and_on_torus() {
    let m = IntensityModel::homogeneous(1.0);
    let w = Window::torus(2, 10.0).unwrap();
    let s = Shape::euclidean(0.5, 2).unwrap();
    let sel = Selector::exactly(1).unwrap();
    let r0 = empirical_tails(&m, &w, &s, &sel, &[0.0], 1000, 1, &TailOptions::default()).unwrap();
    assert_eq!(r0.rows[0].upper_bound, 1.0);
    assert_eq!(r0.rows[0].lower_bound, 1.0);
    assert!(r0.rows[0].upper_emp <= 1.0 && r0.rows[0].lower_emp <= 1.0);
    let grid: Vec<f64> = (0..10).map(|i| i as f64 * 6.0 * 182.375f64.sqrt() / 9.0).collect();
    let rep = empirical_tails(&m, &w, &s, &sel, &grid, 2000, 2, &TailOptions::default()).unwrap();
    assert!(rep.all_dominated(), "{}", rep.to_csv());
    assert!(rep.variance_ok());
    assert!(rep.c_s_certified);
    let again = empirical_tails(&m, &w, &s, &sel, &grid, 2000, 2, &TailOptions::default()).unwrap();
    assert_eq!(rep, again);
    assert!(empirical_tails(&m, &w, &s, &sel, &grid, 999, 2, &TailOptions::default()).is_err());
}

#[test]
fn condition_trivial_cases() {
    let w = Window::cube(2, 5.0).unwrap();
    let s = Shape::euclidean(0.5, 2).unwrap();
    let m = IntensityModel::homogeneous(1.0);
    let sel = Selector::exactly(1).unwrap();
    let empty = condition_check(&PointConfig::empty(w.clone()), &s, &sel, &m, 1000, 0, None).unwrap();
    assert!(empty.satisfied && empty.sum_term == 0.0 && empty.integral_estimate == 0.0 && empty.a_f == 0.0);
    let one = PointConfig::new(w, vec![0.0, 0.0]).unwrap();
    let r = condition_check(&one, &s, &sel, &m, 1000, 0, None).unwrap();
    assert_eq!(r.sum_term, 1.0);
    assert!(r.a >= 1.0 && r.satisfied && r.sum_within_kf && r.negative_mass_ok);
    assert!(condition_check(&one, &s, &sel, &m, 999, 0, None).is_err());
}

#[test]
fn condition_on_sampled_configs() {
    let s = Shape::euclidean(0.8, 2).unwrap();
    for seed in 0..30 {
        let (m, w) = if seed % 2 == 0 {
            (IntensityModel::homogeneous(1.0), Window::torus(2, 6.0).unwrap())
        } else {
            (IntensityModel::radial_power(50.0, 2.0), Window::cube(2, 6.0).unwrap())
        };
        let cfg = sample_poisson(&m, &w, seed).unwrap();
        let sel = Selector::at_most(1 + (seed as usize % 4)).unwrap();
        let r = condition_check(&cfg, &s, &sel, &m, 2000, seed, None).unwrap();
        assert!(r.satisfied && r.sum_within_kf && r.negative_mass_ok, "seed {seed}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lemma_holds(a in 1e-6f64..10.0, z in 1e-6f64..50.0) {
        prop_assert!(psi_bound_check(a, z));
        prop_assert!(psi_rearrangement_check(z));
    }

    #[test]
    fn psi_phi_nonnegative(z in -30.0f64..30.0) {
        prop_assert!(psi(z) >= 0.0);
        prop_assert!(phi(z) >= 0.0);
    }

    #[test]
    fn bounds_in_unit_interval_and_monotone(k in 1usize..6, c in 1usize..10, sigma in 0.0f64..20.0, mean in 0.0f64..500.0, r1 in 0.0f64..100.0, dr in 0.0f64..100.0) {
        let p = BoundParams::new(k, c, sigma, mean, MeanSource::Theory).unwrap();
        prop_assert_eq!(p.a, k as f64 * (c as f64 * c as f64 * sigma + 1.0));
        for f in [upper_tail_bound, lower_tail_bound] {
            let (b1, b2) = (f(r1, &p), f(r1 + dr, &p));
            prop_assert!((0.0..=1.0).contains(&b1) && (0.0..=1.0).contains(&b2));
            prop_assert!(b2 <= b1);
        }
        if r1 > 0.0 {
            prop_assert!(upper_tail_bound(r1, &p) > 0.0);
        }
    }
}

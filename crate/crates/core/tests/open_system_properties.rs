mod common;

use common::{random_state, rng};
use ioncavity::open_system::{
    cnot_ba_fidelity_report, cnot_ba_time, fidelity_curve, lindblad_evolve, to_density, DecaySpec, DecayWindow,
    FidelityOptions, EIGEN_FLOOR,
};
use ioncavity::propagators::case_generator;
use ioncavity::{Case, PhysicalParams, SystemConfig};
use proptest::prelude::*;

#[test]
fn curve_is_strictly_decreasing_and_reproducible() {
    let p = PhysicalParams::default();
    let ratios: Vec<f64> = (0..20).map(|i| 0.01 + (2.0 - 0.01) * i as f64 / 19.0).collect();
    let o = FidelityOptions::default();
    let a = fidelity_curve(&p, &ratios, &DecayWindow::LastPulse, &o).unwrap();
    for w in a.windows(2) {
        assert!(w[1].fidelity < w[0].fidelity);
    }
    let b = fidelity_curve(&p, &ratios, &DecayWindow::LastPulse, &o).unwrap();
    assert_eq!(a, b);
}

#[test]
fn vanishing_decay_is_perfect() {
    let p = PhysicalParams::default();
    let t = cnot_ba_time(&p).unwrap();
    let rep = cnot_ba_fidelity_report(&p, &DecaySpec::new(1e-6 / t), &FidelityOptions::default()).unwrap();
    assert!((rep.average - 1.0).abs() <= 1e-6);
}

#[test]
fn decay_window_accepts_explicit_indices() {
    let p = PhysicalParams::default();
    let o = FidelityOptions::default();
    let kappa = 1.0 / cnot_ba_time(&p).unwrap();
    let last = cnot_ba_fidelity_report(&p, &DecaySpec::new(kappa), &o).unwrap();
    let same = cnot_ba_fidelity_report(&p, &DecaySpec { kappa, window: DecayWindow::Pulses(vec![2]) }, &o).unwrap();
    assert_eq!(last, same);
}

#[test]
fn fidelity_does_not_depend_on_cutoff() {
    let p = PhysicalParams::default();
    let kappa = 0.5 / cnot_ba_time(&p).unwrap();
    let f = |cutoff| {
        cnot_ba_fidelity_report(&p, &DecaySpec::new(kappa), &FidelityOptions { cutoff, dt: 2e-3 }).unwrap().average
    };
    assert!((f(2) - f(3)).abs() <= 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lindblad_output_is_a_state(seed in any::<u64>(), kappa in 0.0..3.0f64, t in 0.0..2.0f64) {
        let cfg = SystemConfig::single(2);
        let mut r = rng(seed);
        let psi = random_state(cfg, &vec![false; cfg.dim()], &mut r);
        let h = case_generator(Case::CavityRed, cfg, 0).unwrap();
        let out = lindblad_evolve(&to_density(&psi).unwrap(), &h, kappa, t, 1e-3).unwrap();
        prop_assert!((out.trace() - 1.0).abs() <= 1e-8);
        prop_assert!(out.min_eigenvalue() >= EIGEN_FLOOR);
        prop_assert!(out.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn fidelity_stays_in_range(ratio in 1e-3..3.0f64) {
        let p = PhysicalParams::default();
        let kappa = ratio / cnot_ba_time(&p).unwrap();
        let rep = cnot_ba_fidelity_report(&p, &DecaySpec::new(kappa), &FidelityOptions::default()).unwrap();
        for f in rep.per_input {
            prop_assert!((0.0..=1.0 + 1e-10).contains(&f));
        }
    }
}

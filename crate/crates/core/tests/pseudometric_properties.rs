//! Sampling checks of the pseudometric axioms and chain constants.

use proptest::prelude::*;

use syncnet_core::domain::DomainDescriptor;
use syncnet_core::dynamics::{chua_coupling, chua_weights, fhn_coupling, fhn_weights};
use syncnet_core::pseudometric::{
    combine, exp_damped_pseudometric, induced_pseudometric, power_pseudometric,
    EXP_DAMPED_RADIUS,
};
use syncnet_core::rho::{rho_power_bound_check, RhoSequence};
use syncnet_core::stability::{audit_pseudometric, AuditConfig};

fn quick_cfg(region: DomainDescriptor, seed: u64) -> AuditConfig {
    AuditConfig::new(region, seed, 10_000)
}

#[test]
fn builtins_pass_axioms_and_chain_inequality() {
    let box2 = DomainDescriptor::centered_box(2, 5.0).unwrap();
    for alpha in [0.5, 1.0, 4.0 / 3.0] {
        let phi = power_pseudometric(alpha).unwrap();
        let report = audit_pseudometric(&phi, &quick_cfg(box2.clone(), 7)).unwrap();
        assert!(report.passed(), "alpha = {alpha}: {:?}", report.worst());
    }
    let phi = exp_damped_pseudometric();
    let report = audit_pseudometric(&phi, &quick_cfg(phi.domain().clone(), 7)).unwrap();
    assert!(report.passed(), "{:?}", report.worst());
}

#[test]
fn induced_builtins_pass_axioms() {
    let (b, alpha, beta, gamma) = (5.0, 1.0, 1.0, 1.0);
    let fhn_phi = induced_pseudometric(
        &fhn_coupling(alpha, beta, gamma, b).unwrap(),
        &fhn_weights(b).unwrap(),
        RhoSequence::power(5.0 / 3.0).unwrap(),
        DomainDescriptor::all(2).unwrap(),
    )
    .unwrap();
    let box2 = DomainDescriptor::centered_box(2, 5.0).unwrap();
    assert!(audit_pseudometric(&fhn_phi, &quick_cfg(box2, 13)).unwrap().passed());

    let (a, bpar, delta) = (9.0, 14.0, 0.1);
    let ball = DomainDescriptor::ball(vec![0.0; 3], EXP_DAMPED_RADIUS).unwrap();
    let chua_phi = induced_pseudometric(
        &chua_coupling(a, delta).unwrap(),
        &chua_weights(a, bpar).unwrap(),
        RhoSequence::linear(),
        ball.clone(),
    )
    .unwrap();
    assert!(audit_pseudometric(&chua_phi, &quick_cfg(ball, 13)).unwrap().passed());
}

#[test]
fn fhn_induced_matches_closed_form_on_samples() {
    use rand::{Rng, SeedableRng};
    let (b, alpha, beta, gamma) = (5.0, 1.0, 1.0, 1.0);
    let phi = induced_pseudometric(
        &fhn_coupling(alpha, beta, gamma, b).unwrap(),
        &fhn_weights(b).unwrap(),
        RhoSequence::power(5.0 / 3.0).unwrap(),
        DomainDescriptor::all(2).unwrap(),
    )
    .unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2718);
    for _ in 0..10_000 {
        let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let u: f64 = x[0] - y[0];
        let v: f64 = x[1] - y[1];
        let expect = alpha * u * u + beta * u.abs().powf(8.0 / 3.0) + gamma / b * v * v;
        let got = phi.evaluate(&x, &y).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect.max(1.0));
    }
}

#[test]
fn rho_validity_for_all_builtins() {
    let rhos = [
        RhoSequence::from_alpha(0.5).unwrap(),
        RhoSequence::linear(),
        RhoSequence::from_alpha(4.0 / 3.0).unwrap(),
        RhoSequence::power(5.0 / 3.0).unwrap(),
    ];
    for rho in &rhos {
        assert!((rho.eval(1) - 1.0).abs() < 1e-15);
        for m in 1..10 {
            assert!(rho.eval(m + 1) >= rho.eval(m) * (1.0 - 1e-12));
        }
        assert!(rho_power_bound_check(rho, 10).passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn combined_rho_is_pointwise_max(a1 in 0.5f64..3.0, a2 in 0.5f64..3.0) {
        let p1 = power_pseudometric(a1).unwrap();
        let p2 = power_pseudometric(a2).unwrap();
        let phi = combine(&p1, &p2, 1.0, 2.0).unwrap();
        for m in 1..=10usize {
            let expect = p1.rho().eval(m).max(p2.rho().eval(m));
            let got = phi.rho().eval(m);
            prop_assert!((got - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn half_power_satisfies_plain_triangle(
        x1 in -50.0f64..50.0,
        x2 in -50.0f64..50.0,
        x3 in -50.0f64..50.0,
    ) {
        let phi = power_pseudometric(0.5).unwrap();
        let lhs = phi.evaluate(&[x1, 0.0], &[x3, 0.0]).unwrap();
        let rhs = phi.evaluate(&[x1, 0.0], &[x2, 0.0]).unwrap()
            + phi.evaluate(&[x2, 0.0], &[x3, 0.0]).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }
}

mod common;

use common::*;
use fixpoint_vi::oracle::{dykstra_project, family_sets, oracle_vi_solve, VIOracleParams};
use fixpoint_vi::solver::{
    run_explicit, run_halpern, specialize, validate_params, SchemeParams, Specialization,
    StopReason, StoppingRule,
};
use fixpoint_vi::{Contraction, MonotoneOperator, NonexpansiveOp, Schedule, Vector};

fn stop() -> StoppingRule {
    StoppingRule {
        max_iter: 200_000,
        ..StoppingRule::default()
    }
}

#[test]
fn unconstrained_root() {
    let p = SchemeParams {
        mu: 1.0,
        gamma: 0.1,
        family: vec![NonexpansiveOp::identity(), NonexpansiveOp::identity()],
        f: Contraction::constant(v(&[0.0, 0.0])),
        a: MonotoneOperator::identity_minus(v(&[2.0, 2.0])),
        schedule: Schedule::harmonic(),
    };
    let (rep, trace) = run_explicit(&p, &v(&[0.0, 0.0]), &stop(), &VIOracleParams::default()).unwrap();
    assert!(dist(&rep.final_point, &v(&[2.0, 2.0])) < 1e-3);
    assert_eq!(trace.records[0].n, 1);
    assert!(trace.records.windows(2).all(|w| w[1].n == w[0].n + 1));
}

#[test]
fn yamada_box_and_halfspace() {
    let box_set = NonexpansiveOp::box_set(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
    let half = NonexpansiveOp::halfspace(v(&[1.0, 1.0]), 1.0).unwrap();
    let p = SchemeParams {
        mu: 1.0,
        gamma: 0.0,
        family: vec![box_set.clone(), half.clone()],
        f: Contraction::constant(v(&[0.0, 0.0])),
        a: MonotoneOperator::identity_minus(v(&[2.0, 2.0])),
        schedule: Schedule::harmonic(),
    };
    let expected = dykstra_project(&[box_set, half], &v(&[2.0, 2.0]), 1e-12, 100_000).unwrap();
    assert!(dist(&expected, &v(&[0.5, 0.5])) < 1e-9);
    // The force (2, 2) - x' is large here, so residuals of 1e-6 need ~1e6 steps.
    let st = StoppingRule {
        max_iter: 1_000_000,
        fix_tol: 1e-5,
        vi_tol: 1e-5,
        ..StoppingRule::default()
    };
    let (rep, _) = run_explicit(&p, &v(&[0.0, 0.0]), &st, &VIOracleParams::default()).unwrap();
    assert_eq!(rep.stop_reason, StopReason::ResidualMet, "{:?}", rep.final_residuals);
    assert!(dist(&rep.final_point, &expected) < 1e-3);
}

#[test]
fn halpern_examples() {
    let cases = [
        (NonexpansiveOp::ball(v(&[0.0, 0.0]), 1.0).unwrap(), v(&[2.0, 0.0]), v(&[1.0, 0.0])),
        (NonexpansiveOp::halfspace(v(&[1.0, 0.0]), 0.0).unwrap(), v(&[1.0, 1.0]), v(&[0.0, 1.0])),
        (NonexpansiveOp::identity(), v(&[1.5, -1.0]), v(&[1.5, -1.0])),
    ];
    for (t, u, expected) in cases {
        let (rep, _) = run_halpern(
            &t,
            &u,
            &Schedule::harmonic(),
            &Vector::zeros(2),
            &stop(),
            &VIOracleParams::default(),
        )
        .unwrap();
        assert!(dist(&rep.final_point, &expected) < 1e-3, "{:?}", rep.final_point);
    }
}

#[test]
fn gamma_window_violation_is_rejected() {
    let p = SchemeParams {
        mu: 1.0,
        gamma: 1.5,
        family: vec![NonexpansiveOp::identity()],
        f: Contraction::affine_shrink(0.5, v(&[0.0])).unwrap(),
        a: MonotoneOperator::identity_minus(v(&[0.0])),
        schedule: Schedule::harmonic(),
    };
    let report = validate_params(&p);
    assert!(!report.ok());
    assert!(report.failures().iter().any(|f| f.contains("0 < γ < τ/α")));
    assert!(run_explicit(&p, &v(&[1.0]), &stop(), &VIOracleParams::default()).is_err());
}

#[test]
fn rotated_family_reaches_the_same_limit() {
    for seed in 0..4u64 {
        let g = generate(200 + seed, 3, 3, 0.3, 0.3);
        // Seed 201 has a nearly tangent intersection where Dykstra is slow.
        let st = StoppingRule {
            check_every: 1000,
            ..stop()
        };
        let oracle = VIOracleParams::default();
        let (a, _) = run_explicit(&g.params, &Vector::zeros(3), &st, &oracle).unwrap();
        let (b, _) = run_explicit(&g.params.rotated(1), &Vector::zeros(3), &st, &oracle).unwrap();
        let sets = family_sets(&g.params.family).unwrap();
        let p = &g.params;
        let x = oracle_vi_solve(&sets, &p.f, &p.a, p.mu, p.gamma, &oracle).unwrap();
        assert!(dist(&a.final_point, &x) < 1e-3);
        assert!(dist(&a.final_point, &b.final_point) < 2e-3);
    }
}

#[test]
fn misdeclared_constants_diverge() {
    // A = 10 I declared as k = eta = 1; mu = 1 is then far outside the true window.
    let a = MonotoneOperator::diagonal(v(&[10.0, 10.0]))
        .unwrap()
        .with_constants(1.0, 1.0)
        .unwrap();
    let p = SchemeParams {
        mu: 1.0,
        gamma: 0.0,
        family: vec![NonexpansiveOp::identity()],
        f: Contraction::constant(v(&[0.0, 0.0])),
        a,
        // alpha_n = 0.999 for the first ~500 steps: |1 - alpha_n mu 10| ~ 9.
        schedule: Schedule::power(500.0, 1.0).unwrap(),
    };
    let st = StoppingRule {
        max_iter: 1500,
        ..StoppingRule::default()
    };
    let (rep, _) = run_explicit(&p, &v(&[1.0, 1.0]), &st, &VIOracleParams::default()).unwrap();
    assert_eq!(rep.stop_reason, StopReason::Diverged);
}

#[test]
fn specializations_validate() {
    let op = NonexpansiveOp::ball(v(&[0.0, 0.0]), 1.0).unwrap();
    let y = specialize(Specialization::Yamada {
        op,
        a: MonotoneOperator::identity_minus(v(&[2.0, 0.0])),
        mu: 1.0,
        schedule: Schedule::harmonic(),
    })
    .unwrap();
    let (rep, _) = run_explicit(&y, &Vector::zeros(2), &stop(), &VIOracleParams::default()).unwrap();
    assert!(dist(&rep.final_point, &v(&[1.0, 0.0])) < 1e-3);
}

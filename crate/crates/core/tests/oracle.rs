mod common;

use common::*;
use fixpoint_vi::oracle::{
    dykstra_project, family_sets, oracle_vi_solve, sample_feasible, DykstraParams, ViProblem,
    VIOracleParams,
};
use fixpoint_vi::sampling::{normal_vector, rng};
use fixpoint_vi::{NonexpansiveOp, Vector};
use rand::Rng;

#[test]
fn dykstra_matches_grid_brute_force() {
    let mut checked = 0;
    for seed in 0..40u64 {
        if checked == 20 {
            break;
        }
        let mut r = rng(seed);
        let d = 2 + (seed % 2) as usize;
        let p = normal_vector(&mut r, d, 1.0);
        // Full-dimensional sets only: a grid never hits a hyperplane.
        let sets: Vec<_> = (0..r.random_range(2..4))
            .map(|i| loop {
                let s = set_through(&mut r, &p, i == 0);
                if s.kind_name() != "hyperplane" {
                    break s;
                }
            })
            .collect();
        let y = Vector::axpy(1.0, &normal_vector(&mut r, d, 0.05), &p).unwrap();
        let z = dykstra_project(&sets, &y, 1e-12, 100_000).unwrap();
        let radius = if d == 2 { 0.06 } else { 0.03 };
        let Some(g) = grid_argmin(&sets, &z, radius, 1e-3, 0.0, |w| dist(w, &y)) else {
            continue;
        };
        checked += 1;
        assert!(dist(&g, &z) <= 2e-3, "seed {seed}: {g:?} vs {z:?}");
    }
    assert_eq!(checked, 20);
}

#[test]
fn vi_solution_satisfies_inequality_pointwise() {
    for seed in 0..5u64 {
        let g = generate(seed, 2 + seed as usize, 1 + seed as usize % 4, [0.0, 0.3, 0.7][seed as usize % 3], 0.5);
        let p = &g.params;
        let sets = family_sets(&p.family).unwrap();
        let x = oracle_vi_solve(&sets, &p.f, &p.a, p.mu, p.gamma, &VIOracleParams::default()).unwrap();
        let field = Vector::axpy(-p.mu, &p.a.apply(&x).unwrap(), &p.f.apply(&x).unwrap().scale(p.gamma)).unwrap();
        let ys = sample_feasible(&sets, p.dim(), 200, 3.0, seed, DykstraParams::default()).unwrap();
        for y in ys {
            assert!(dot(&field, &sub(&y, &x)) <= 1e-6);
        }
    }
}

#[test]
fn vi_solution_is_unique_across_starts() {
    let g = generate(7, 4, 3, 0.3, 0.5);
    let p = &g.params;
    let sets = family_sets(&p.family).unwrap();
    let problem = ViProblem {
        sets: &sets,
        f: &p.f,
        a: &p.a,
        mu: p.mu,
        gamma: p.gamma,
    };
    let params = VIOracleParams::default();
    let mut r = rng(11);
    let sols: Vec<_> = (0..10)
        .map(|_| problem.solve(&normal_vector(&mut r, 4, 5.0), &params).unwrap())
        .collect();
    for a in &sols {
        for b in &sols {
            assert!(dist(a, b) <= 10.0 * params.tol);
        }
    }
}

#[test]
fn residual_is_tiny_at_the_oracle_solution() {
    let g = generate(3, 3, 2, 0.7, 0.5);
    let p = &g.params;
    let sets = family_sets(&p.family).unwrap();
    let params = VIOracleParams::default();
    let x = oracle_vi_solve(&sets, &p.f, &p.a, p.mu, p.gamma, &params).unwrap();
    let problem = ViProblem {
        sets: &sets,
        f: &p.f,
        a: &p.a,
        mu: p.mu,
        gamma: p.gamma,
    };
    let r = problem.residual(&x, problem.default_step(), params.dykstra).unwrap();
    assert!(r <= 2.0 * params.tol, "{r}");
}

#[test]
fn yamada_problem_against_grid() {
    let sets = vec![
        NonexpansiveOp::box_set(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap(),
        NonexpansiveOp::halfspace(v(&[1.0, 1.0]), 1.0).unwrap(),
    ];
    let f = fixpoint_vi::Contraction::constant(v(&[0.0, 0.0]));
    let a = fixpoint_vi::MonotoneOperator::identity_minus(v(&[2.0, 2.0]));
    let x = oracle_vi_solve(&sets, &f, &a, 1.0, 0.0, &VIOracleParams::default()).unwrap();
    assert!(dist(&x, &v(&[0.5, 0.5])) < 1e-8);
    // <(gamma f - mu A) x, g - x> <= 1e-6 at every feasible grid point.
    let field = sub(&v(&[2.0, 2.0]), &x);
    for i in 0..=1000 {
        for j in 0..=(1000 - i) {
            let g = v(&[i as f64 * 1e-3, j as f64 * 1e-3]);
            assert!(dot(&field, &sub(&g, &x)) <= 1e-6);
        }
    }
}

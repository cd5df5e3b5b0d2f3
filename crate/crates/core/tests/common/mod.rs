//! Random problem generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use fixpoint_vi::operators::Matrix;
use fixpoint_vi::sampling::{normal_vector, rng, unit_vector};
use fixpoint_vi::solver::SchemeParams;
use fixpoint_vi::{Contraction, MonotoneOperator, NonexpansiveOp, Schedule, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

pub fn add(x: &Vector, y: &Vector) -> Vector {
    Vector::axpy(1.0, x, y).unwrap()
}

pub fn sub(x: &Vector, y: &Vector) -> Vector {
    Vector::axpy(-1.0, y, x).unwrap()
}

pub fn dot(x: &Vector, y: &Vector) -> f64 {
    x.inner(y).unwrap()
}

pub fn dist(x: &Vector, y: &Vector) -> f64 {
    x.distance(y).unwrap()
}

/// A closed convex set containing `p`, with `p` on its boundary when
/// `tight` is set.
pub fn set_through(r: &mut ChaCha8Rng, p: &Vector, tight: bool) -> NonexpansiveOp {
    let d = p.dim();
    let slack = if tight { 0.0 } else { r.random_range(0.0..0.5) };
    match r.random_range(0..4) {
        0 => {
            let a = unit_vector(r, d);
            NonexpansiveOp::halfspace(a.clone(), dot(&a, p) + slack).unwrap()
        }
        1 => {
            let radius = r.random_range(0.5..2.0);
            let u = unit_vector(r, d);
            let center = Vector::axpy(radius - slack.min(radius / 2.0), &u, p).unwrap();
            NonexpansiveOp::ball(center, radius).unwrap()
        }
        2 => {
            let lo = Vector::new(p.as_slice().iter().map(|x| x - r.random_range(0.0..1.0)).collect()).unwrap();
            let mut hi =
                Vector::new(p.as_slice().iter().map(|x| x + r.random_range(0.1..1.0)).collect()).unwrap();
            if tight {
                let i = r.random_range(0..d);
                let mut e = hi.clone().into_inner();
                e[i] = p[i];
                hi = Vector::new(e).unwrap();
            }
            NonexpansiveOp::box_set(lo, hi).unwrap()
        }
        _ => {
            let a = unit_vector(r, d);
            NonexpansiveOp::hyperplane(a.clone(), dot(&a, p)).unwrap()
        }
    }
}

/// `Q diag(eigs) Q^T` with `Q` a Householder reflection.
pub fn spd(r: &mut ChaCha8Rng, eigs: &[f64]) -> Matrix {
    let d = eigs.len();
    let h = unit_vector(r, d);
    let q = |i: usize, j: usize| f64::from(u8::from(i == j)) - 2.0 * h[i] * h[j];
    let rows = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|l| q(i, l) * eigs[l] * q(j, l)).sum())
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

pub struct Generated {
    pub params: SchemeParams,
    /// A common fixed point known by construction.
    pub p: Vector,
    /// The unconstrained root of `gamma f - mu A`, placed near `p`.
    pub root: Vector,
}

/// A desk-scale instance of the cyclic scheme.
///
/// The family holds `n` projections through a common point `p` (some
/// tight), so `F` is nonempty by construction. `A` comes from the catalog
/// with spectrum in `[eta, 1.3 eta]`; `mu` keeps `mu * eta` near 1 so the
/// harmonic schedule contracts at rate close to `1/n`. The unconstrained
/// root of `gamma f - mu A` sits within `push` of `p`, which keeps the
/// force `(gamma f - mu A) x'` at the solution small.
pub fn generate(seed: u64, d: usize, n: usize, alpha: f64, push: f64) -> Generated {
    let mut r = rng(seed);
    let p = normal_vector(&mut r, d, 1.0);
    let family: Vec<_> = (0..n).map(|i| set_through(&mut r, &p, i % 2 == 0)).collect();
    let root = Vector::axpy(push * r.random_range(0.2..1.0), &unit_vector(&mut r, d), &p).unwrap();

    let kind = r.random_range(0..3);
    let eta = if kind == 0 { 1.0 } else { r.random_range(0.5..2.0) };
    let ratio = if kind == 0 { 1.0 } else { r.random_range(1.0..1.3) };
    let eigs: Vec<f64> = (0..d)
        .map(|i| match i {
            0 => eta,
            1 => eta * ratio,
            _ => eta * r.random_range(1.0..=ratio),
        })
        .collect();
    let k = eta * ratio;
    let mu = (1.0 / eta).min(1.8 * eta / (k * k));
    let tau = mu * (eta - mu * k * k / 2.0);
    let gamma = if alpha > 0.0 { 0.25 * tau / alpha } else { 0.5 };

    let shrink = |anchor| {
        if alpha > 0.0 {
            Contraction::affine_shrink(alpha, anchor).unwrap()
        } else {
            Contraction::constant(anchor)
        }
    };
    let (a, f) = if kind == 0 {
        // mu (x - b) = gamma f(x) at the root.
        let f = shrink(normal_vector(&mut r, d, 1.0));
        let fr = f.apply(&root).unwrap();
        let b = Vector::axpy(-gamma / mu, &fr, &root).unwrap();
        (MonotoneOperator::identity_minus(b), f)
    } else {
        let a = if kind == 1 {
            MonotoneOperator::diagonal(v(&eigs)).unwrap()
        } else {
            MonotoneOperator::spd_matrix(spd(&mut r, &eigs)).unwrap()
        };
        // mu M root = gamma (alpha root + (1 - alpha) anchor).
        let mr = a.apply(&root).unwrap();
        let anchor = Vector::axpy(-gamma * alpha, &root, &mr.scale(mu))
            .unwrap()
            .scale(1.0 / (gamma * (1.0 - alpha)));
        (a, shrink(anchor))
    };

    Generated {
        params: SchemeParams {
            mu,
            gamma,
            family,
            f,
            a,
            schedule: Schedule::harmonic(),
        },
        p,
        root,
    }
}

/// `phi(z)` whose minimizer over `F` solves the VI, valid when `A` is
/// symmetric and `f` is an affine shrink or constant:
/// `(mu/2) <z, A0 z> - mu <b, z> - gamma (c/2 |z|^2 + (1-c) <anchor, z>)`.
pub fn potential(params: &SchemeParams, z: &Vector) -> f64 {
    let (mu, gamma) = (params.mu, params.gamma);
    let az = params.a.apply(z).unwrap();
    let a0 = params.a.apply(&Vector::zeros(z.dim())).unwrap();
    // A z = A0 z + a0 with A0 symmetric; 0.5 <z, A0 z> + <a0, z>.
    let quad = 0.5 * dot(z, &sub(&az, &a0)) + dot(&a0, z);
    let fz = params.f.apply(z).unwrap();
    let f0 = params.f.apply(&Vector::zeros(z.dim())).unwrap();
    let fquad = 0.5 * dot(z, &sub(&fz, &f0)) + dot(&f0, z);
    mu * quad - gamma * fquad
}

pub fn feasible(sets: &[NonexpansiveOp], z: &Vector, tol: f64) -> bool {
    sets.iter().all(|s| dist(&s.apply(z).unwrap(), z) <= tol)
}

/// Minimizes `objective` over the feasible points of a grid with spacing
/// `step` covering the cube of half-width `radius` around `center`.
/// Returns `None` when the minimizer lies on the cube boundary (so the
/// local search could not certify a global minimum) or nothing is feasible.
pub fn grid_argmin(
    sets: &[NonexpansiveOp],
    center: &Vector,
    radius: f64,
    step: f64,
    feas_tol: f64,
    objective: impl Fn(&Vector) -> f64,
) -> Option<Vector> {
    let d = center.dim();
    let m = (radius / step).round() as i64;
    let mut idx = vec![-m; d];
    let mut best: Option<(f64, Vector, bool)> = None;
    loop {
        let z = Vector::new(
            (0..d)
                .map(|i| center[i] + idx[i] as f64 * step)
                .collect(),
        )
        .unwrap();
        if feasible(sets, &z, feas_tol) {
            let val = objective(&z);
            if best.as_ref().is_none_or(|(b, _, _)| val < *b) {
                let on_edge = idx.iter().any(|&i| i.abs() == m);
                best = Some((val, z, on_edge));
            }
        }
        let mut i = 0;
        loop {
            if i == d {
                return best.and_then(|(_, z, edge)| (!edge).then_some(z));
            }
            idx[i] += 1;
            if idx[i] > m {
                idx[i] = -m;
                i += 1;
            } else {
                break;
            }
        }
    }
}

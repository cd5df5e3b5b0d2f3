use super::{validate_params, SchemeParams};
use crate::error::Result;
use crate::hilbert::Vector;
use crate::operators::{Contraction, MonotoneOperator, NonexpansiveOp};
use crate::schedules::Schedule;

/// Classical schemes recovered as parameter choices of the cyclic scheme.
#[derive(Clone, Debug)]
pub enum Specialization {
    /// `x_{n+1} = alpha_n u + (I - alpha_n A) T_n x_n` over a cyclic family:
    /// `f = u` constant, `gamma = 1`, `mu = 1`.
    Xu {
        family: Vec<NonexpansiveOp>,
        anchor: Vector,
        a: MonotoneOperator,
        schedule: Schedule,
    },
    /// `x_{n+1} = alpha_n gamma f(x_n) + (I - alpha_n A) T x_n`: `mu = 1`, `N = 1`.
    MarinoXu {
        op: NonexpansiveOp,
        f: Contraction,
        a: MonotoneOperator,
        gamma: f64,
        schedule: Schedule,
    },
    /// `x_{n+1} = (I - alpha_n mu A) T x_n`: `gamma = 0`, `N = 1`.
    Yamada {
        op: NonexpansiveOp,
        a: MonotoneOperator,
        mu: f64,
        schedule: Schedule,
    },
    /// `x_{n+1} = alpha_n gamma f(x_n) + (I - alpha_n mu A) T x_n`: `N = 1`.
    Tian {
        op: NonexpansiveOp,
        f: Contraction,
        a: MonotoneOperator,
        mu: f64,
        gamma: f64,
        schedule: Schedule,
    },
}

/// Builds the [`SchemeParams`] realizing a classical scheme, rejecting
/// constants outside the admissible windows.
pub fn specialize(scheme: Specialization) -> Result<SchemeParams> {
    let params = match scheme {
        Specialization::Xu {
            family,
            anchor,
            a,
            schedule,
        } => SchemeParams {
            mu: 1.0,
            gamma: 1.0,
            family,
            f: Contraction::constant(anchor),
            a,
            schedule,
        },
        Specialization::MarinoXu {
            op,
            f,
            a,
            gamma,
            schedule,
        } => SchemeParams {
            mu: 1.0,
            gamma,
            family: vec![op],
            f,
            a,
            schedule,
        },
        Specialization::Yamada {
            op,
            a,
            mu,
            schedule,
        } => {
            let dim = a.dim();
            SchemeParams {
                mu,
                gamma: 0.0,
                family: vec![op],
                f: Contraction::constant(Vector::zeros(dim)),
                a,
                schedule,
            }
        }
        Specialization::Tian {
            op,
            f,
            a,
            mu,
            gamma,
            schedule,
        } => SchemeParams {
            mu,
            gamma,
            family: vec![op],
            f,
            a,
            schedule,
        },
    };
    validate_params(&params).into_result()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::explicit_step;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn yamada_with_identity_is_richardson() {
        let a = MonotoneOperator::diagonal(v(&[1.0, 1.2])).unwrap();
        let mu = 1.0;
        let p = specialize(Specialization::Yamada {
            op: NonexpansiveOp::identity(),
            a: a.clone(),
            mu,
            schedule: Schedule::harmonic(),
        })
        .unwrap();
        let mut x = v(&[1.0, -2.0]);
        for n in 1..50 {
            let alpha = p.schedule.alpha(n).unwrap();
            let expected = Vector::axpy(-alpha * mu, &a.apply(&x).unwrap(), &x).unwrap();
            x = explicit_step(&p, n, &x).unwrap();
            assert!(x.dist(&expected) < 1e-15);
        }
    }

    #[test]
    fn xu_with_identity_operator_is_halpern() {
        let t = NonexpansiveOp::ball(Vector::zeros(2), 1.0).unwrap();
        let u = v(&[2.0, 0.5]);
        let p = specialize(Specialization::Xu {
            family: vec![t.clone()],
            anchor: u.clone(),
            a: MonotoneOperator::identity_minus(Vector::zeros(2)),
            schedule: Schedule::harmonic(),
        })
        .unwrap();
        let mut x = v(&[-3.0, 1.0]);
        for n in 1..100 {
            let alpha = p.schedule.alpha(n).unwrap();
            let tx = t.apply(&x).unwrap();
            let halpern = Vector::axpy(alpha, &u, &tx.scale(1.0 - alpha)).unwrap();
            x = explicit_step(&p, n, &x).unwrap();
            assert!(x.dist(&halpern) < 1e-12);
        }
    }

    #[test]
    fn tian_is_single_member_family() {
        let op = NonexpansiveOp::box_set(v(&[0.0]), v(&[1.0])).unwrap();
        let f = Contraction::affine_shrink(0.5, v(&[3.0])).unwrap();
        let a = MonotoneOperator::identity_minus(v(&[0.0]));
        let p = specialize(Specialization::Tian {
            op: op.clone(),
            f: f.clone(),
            a: a.clone(),
            mu: 1.0,
            gamma: 0.5,
            schedule: Schedule::harmonic(),
        })
        .unwrap();
        assert_eq!(p.family, vec![op]);
        assert_eq!((p.mu, p.gamma), (1.0, 0.5));
    }

    #[test]
    fn constraint_violations_are_rejected() {
        // Yamada needs mu < 2 eta / L^2 = 2 for A = I - b.
        assert!(specialize(Specialization::Yamada {
            op: NonexpansiveOp::identity(),
            a: MonotoneOperator::identity_minus(v(&[0.0])),
            mu: 2.0,
            schedule: Schedule::harmonic(),
        })
        .is_err());
        // Marino-Xu with mu = 1 and tau = 0.5 needs gamma < 0.5 / alpha = 1.
        assert!(specialize(Specialization::MarinoXu {
            op: NonexpansiveOp::identity(),
            f: Contraction::affine_shrink(0.5, v(&[0.0])).unwrap(),
            a: MonotoneOperator::identity_minus(v(&[0.0])),
            gamma: 1.0,
            schedule: Schedule::harmonic(),
        })
        .is_err());
        // Xu fixes mu = 1, which needs k^2 < 2 eta.
        assert!(specialize(Specialization::Xu {
            family: vec![NonexpansiveOp::identity()],
            anchor: v(&[0.0, 0.0]),
            a: MonotoneOperator::diagonal(v(&[1.0, 2.0])).unwrap(),
            schedule: Schedule::harmonic(),
        })
        .is_err());
    }
}

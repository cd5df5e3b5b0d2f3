use super::compute_tau;
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::operators::{Contraction, MonotoneOperator, NonexpansiveOp};

/// Data for the implicit path `x_t = t gamma f(x_t) + (I - t mu A) T x_t`.
#[derive(Clone, Copy, Debug)]
pub struct PathProblem<'a> {
    pub op: &'a NonexpansiveOp,
    pub f: &'a Contraction,
    pub a: &'a MonotoneOperator,
    pub mu: f64,
    pub gamma: f64,
}

impl PathProblem<'_> {
    /// `tau - gamma alpha`, after checking the constant windows.
    fn margin(&self) -> Result<f64> {
        let tau = compute_tau(self.mu, self.a.eta(), self.a.lipschitz())?;
        let margin = tau - self.gamma * self.f.alpha();
        if !(self.gamma >= 0.0 && margin > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "implicit path needs 0 <= γ < τ/α (γ = {}, τ = {tau}, α = {})",
                self.gamma,
                self.f.alpha()
            )));
        }
        Ok(margin)
    }

    /// `Phi_t(x) = t gamma f(x) + T x - t mu A(T x)`.
    pub fn map(&self, t: f64, x: &Vector) -> Result<Vector> {
        let tx = self.op.apply(x)?;
        let damped = Vector::axpy_unchecked(-t * self.mu, &self.a.apply(&tx)?, &tx);
        if self.gamma == 0.0 {
            return Ok(damped);
        }
        Ok(Vector::axpy_unchecked(t * self.gamma, &self.f.apply(x)?, &damped))
    }

    /// Lipschitz bound `1 - t (tau - gamma alpha)` of `Phi_t`.
    pub fn contraction_factor(&self, t: f64) -> Result<f64> {
        Ok(1.0 - t * self.margin()?)
    }

    /// Fixed point of `Phi_t` by Picard iteration from `start` (the origin
    /// when `None`). Stops once `q / (1 - q) * ||x_{k+1} - x_k|| < tol`,
    /// which bounds the distance to `x_t`. The iteration budget is five
    /// times the count predicted by the contraction factor; exceeding it
    /// means the declared constants do not hold.
    pub fn solve(&self, t: f64, tol: f64, start: Option<&Vector>) -> Result<Vector> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidArgument(format!("path parameter t must lie in (0, 1), got {t}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let q = self.contraction_factor(t)?;
        let gain = q / (1.0 - q);
        let mut x = start.cloned().unwrap_or_else(|| Vector::zeros(self.a.dim()));
        let mut next = self.map(t, &x)?;
        let mut change = next.dist(&x);
        // q^k * change * gain < tol  <=>  k > ln(change * gain / tol) / -ln q
        let predicted = if change > 0.0 && q > 0.0 {
            ((change * gain / tol).ln().max(0.0) / -q.ln()).ceil() as usize
        } else {
            0
        };
        let budget = 5 * predicted + 100;
        for _ in 0..budget {
            if change * gain < tol {
                return Ok(next);
            }
            x = next;
            next = self.map(t, &x)?;
            change = next.dist(&x);
        }
        Err(Error::NonConvergence {
            what: "implicit path",
            iterations: budget,
            last_change: change,
        })
    }
}

/// The point `x_t` of the implicit path for a single nonexpansive map.
#[allow(clippy::too_many_arguments)]
pub fn implicit_path(
    op: &NonexpansiveOp,
    f: &Contraction,
    a: &MonotoneOperator,
    mu: f64,
    gamma: f64,
    t: f64,
    tol: f64,
) -> Result<Vector> {
    PathProblem {
        op,
        f,
        a,
        mu,
        gamma,
    }
    .solve(t, tol, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn linear_case_matches_hand_solution() {
        // T = I, A x = x - b, f = u: x = t gamma u + x - t mu (x - b)
        // gives x_t = (gamma / mu) u + b for every t.
        let (u, b) = (v(&[1.0, -2.0]), v(&[0.5, 0.25]));
        let (mu, gamma) = (1.0, 0.4);
        let xt = implicit_path(
            &NonexpansiveOp::identity(),
            &Contraction::constant(u.clone()),
            &MonotoneOperator::identity_minus(b.clone()),
            mu,
            gamma,
            0.5,
            1e-13,
        )
        .unwrap();
        let expected = Vector::axpy(gamma / mu, &u, &b).unwrap();
        assert!(xt.dist(&expected) < 1e-12, "{xt:?}");
    }

    #[test]
    fn constant_f_contracts_with_tau() {
        let p = PathProblem {
            op: &NonexpansiveOp::identity(),
            f: &Contraction::constant(v(&[3.0])),
            a: &MonotoneOperator::identity_minus(v(&[0.0])),
            mu: 1.0,
            gamma: 100.0,
        };
        assert!((p.contraction_factor(0.2).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_constants() {
        let op = NonexpansiveOp::identity();
        let f = Contraction::affine_shrink(0.5, v(&[0.0])).unwrap();
        let a = MonotoneOperator::identity_minus(v(&[0.0]));
        assert!(implicit_path(&op, &f, &a, 1.0, 1.0, 0.5, 1e-9).is_err());
        assert!(implicit_path(&op, &f, &a, 2.0, 0.1, 0.5, 1e-9).is_err());
        assert!(implicit_path(&op, &f, &a, 1.0, 0.1, 1.0, 1e-9).is_err());
    }

    #[test]
    fn misdeclared_constants_exhaust_the_budget() {
        // True eta = 1 but the map is expanding for the declared window when A
        // is much steeper than claimed.
        let op = NonexpansiveOp::identity();
        let f = Contraction::constant(v(&[1.0]));
        let a = MonotoneOperator::diagonal(v(&[50.0]))
            .unwrap()
            .with_constants(1.0, 1.0)
            .unwrap();
        let err = implicit_path(&op, &f, &a, 1.0, 0.5, 0.5, 1e-9).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }), "{err}");
    }
}

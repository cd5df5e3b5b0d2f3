//! Reference solutions computed independently of the cyclic scheme.
//!
//! [`dykstra_project`] computes the projection onto an intersection of
//! convex sets with Dykstra's corrected cyclic projections.
//! [`oracle_vi_solve`] finds the VI solution as the fixed point of
//! `z -> P_F(z + s (gamma f - mu A) z)`, which is a strict contraction for
//! steps `s` inside the window reported by [`ViProblem::step_window`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::operators::{Contraction, MonotoneOperator, NonexpansiveOp};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DykstraParams {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DykstraParams {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100_000,
        }
    }
}

/// Projection of `y` onto the intersection of the sets behind `sets`.
///
/// Every entry must be a projection ([`NonexpansiveOp::is_projection`]).
/// An empty list stands for the whole space. Sweeps stop once the iterate
/// and all correction terms move less than `tol / 10` in a sweep and the
/// iterate is within `tol` of every set. Running out of sweeps with a
/// feasibility gap above `tol` is reported as an empty intersection.
pub fn dykstra_project(
    sets: &[NonexpansiveOp],
    y: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<Vector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("Dykstra tolerance must be positive, got {tol}")));
    }
    for s in sets {
        if !s.is_projection() {
            return Err(Error::Unsupported(format!("operator of kind {}", s.kind_name())));
        }
        if let Some(d) = s.dim() {
            if d != y.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: y.dim(),
                });
            }
        }
    }
    match sets {
        [] => return Ok(y.clone()),
        [only] => return only.apply(y),
        _ => {}
    }

    let mut x = y.clone();
    let mut corrections = vec![Vector::zeros(y.dim()); sets.len()];
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let mut moved_sq = 0.0;
        for (set, p) in sets.iter().zip(corrections.iter_mut()) {
            let shifted = &x + p;
            let z = set.apply(&shifted)?;
            let new_p = &shifted - &z;
            moved_sq += new_p.dist(p).powi(2) + z.dist(&x).powi(2);
            *p = new_p;
            x = z;
        }
        change = moved_sq.sqrt();
        if change <= 0.1 * tol && feasibility_gap(sets, &x) <= tol {
            return Ok(x);
        }
    }
    let gap = feasibility_gap(sets, &x);
    if gap > tol {
        Err(Error::EmptyIntersection {
            gap,
            iterations: max_iter,
        })
    } else {
        Err(Error::NonConvergence {
            what: "Dykstra projection",
            iterations: max_iter,
            last_change: change,
        })
    }
}

/// `max_i ||P_i x - x||`.
pub fn feasibility_gap(sets: &[NonexpansiveOp], x: &Vector) -> f64 {
    sets.iter()
        .map(|s| s.eval(x).dist(x))
        .fold(0.0, f64::max)
}

/// Flattens a family into the projections describing its common fixed-point
/// set, or reports the first member without one.
pub fn family_sets(family: &[NonexpansiveOp]) -> Result<Vec<NonexpansiveOp>> {
    let mut sets = Vec::new();
    for op in family {
        match op.fixed_point_sets() {
            Some(s) => sets.extend(s),
            None => {
                return Err(Error::Unsupported(format!(
                    "fixed-point set of a {} map",
                    op.kind_name()
                )))
            }
        }
    }
    Ok(sets)
}

/// Points of the intersection obtained by projecting standard normal points
/// scaled by `scale`.
pub fn sample_feasible(
    sets: &[NonexpansiveOp],
    dim: usize,
    count: usize,
    scale: f64,
    seed: u64,
    dykstra: DykstraParams,
) -> Result<Vec<Vector>> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            let y = sampling::normal_vector(&mut rng, dim, scale);
            dykstra_project(sets, &y, dykstra.tol, dykstra.max_iter)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VIOracleParams {
    /// Step `s`; `None` picks the midpoint of the contraction window.
    #[serde(default)]
    pub step: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub dykstra: DykstraParams,
}

impl Default for VIOracleParams {
    fn default() -> Self {
        Self {
            step: None,
            tol: 1e-10,
            max_iter: 1_000_000,
            dykstra: DykstraParams::default(),
        }
    }
}

/// Data of the variational inequality
/// `<(gamma f - mu A) x', y - x'> <= 0` for all `y` in `F = cap_i C_i`.
#[derive(Clone, Copy, Debug)]
pub struct ViProblem<'a> {
    pub sets: &'a [NonexpansiveOp],
    pub f: &'a Contraction,
    pub a: &'a MonotoneOperator,
    pub mu: f64,
    pub gamma: f64,
}

impl<'a> ViProblem<'a> {
    /// `(gamma f - mu A) x`.
    pub fn field(&self, x: &Vector) -> Vector {
        Vector::lincomb(self.gamma, &self.f.eval(x), -self.mu, &self.a.eval(x))
    }

    /// `mu eta - gamma alpha`, the strong monotonicity of `mu A - gamma f`.
    pub fn monotonicity(&self) -> f64 {
        self.mu * self.a.eta() - self.gamma * self.f.alpha()
    }

    /// `mu k + gamma alpha`, the Lipschitz constant of `mu A - gamma f`.
    pub fn lipschitz(&self) -> f64 {
        self.mu * self.a.lipschitz() + self.gamma * self.f.alpha()
    }

    /// Steps `s` in `(0, step_window)` make the projected map a contraction.
    pub fn step_window(&self) -> f64 {
        2.0 * self.monotonicity() / self.lipschitz().powi(2)
    }

    /// Midpoint of the contraction window.
    pub fn default_step(&self) -> f64 {
        self.monotonicity() / self.lipschitz().powi(2)
    }

    /// Contraction factor of `z -> P_F(z + s field(z))`.
    pub fn contraction_factor(&self, s: f64) -> f64 {
        (1.0 - 2.0 * s * self.monotonicity() + (s * self.lipschitz()).powi(2))
            .max(0.0)
            .sqrt()
    }

    fn check(&self, s: f64) -> Result<()> {
        if !(self.mu > 0.0 && self.gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "VI oracle needs mu > 0 and gamma >= 0 (mu = {}, gamma = {})",
                self.mu, self.gamma
            )));
        }
        if !(self.monotonicity() > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mu*eta - gamma*alpha = {} must be positive",
                self.monotonicity()
            )));
        }
        if !(s > 0.0 && s < self.step_window()) {
            return Err(Error::InvalidArgument(format!(
                "oracle step {s} outside the contraction window (0, {})",
                self.step_window()
            )));
        }
        Ok(())
    }

    fn project(&self, y: &Vector, dykstra: DykstraParams) -> Result<Vector> {
        dykstra_project(self.sets, y, dykstra.tol, dykstra.max_iter)
    }

    /// `||x - P_F(x + s (gamma f - mu A) x)||`, zero exactly at the solution.
    pub fn residual(&self, x: &Vector, s: f64, dykstra: DykstraParams) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("residual step must be positive, got {s}")));
        }
        let moved = Vector::axpy_unchecked(s, &self.field(x), x);
        Ok(self.project(&moved, dykstra)?.dist(x))
    }

    /// Projected fixed-point iteration from `start`. Stops when the a
    /// posteriori bound `q / (1 - q) * ||z_{k+1} - z_k||` on the distance to
    /// the fixed point drops below `tol`.
    pub fn solve(&self, start: &Vector, params: &VIOracleParams) -> Result<Vector> {
        let s = params.step.unwrap_or_else(|| self.default_step());
        self.check(s)?;
        if !(params.tol > 0.0) {
            return Err(Error::InvalidArgument("oracle tolerance must be positive".into()));
        }
        let q = self.contraction_factor(s);
        let bound = if q < 1.0 { q / (1.0 - q) } else { f64::INFINITY };
        let mut z = self.project(start, params.dykstra)?;
        let mut change = f64::INFINITY;
        for _ in 0..params.max_iter {
            let next = self.project(&Vector::axpy_unchecked(s, &self.field(&z), &z), params.dykstra)?;
            change = next.dist(&z);
            z = next;
            if change * bound.max(1.0) < params.tol {
                return Ok(z);
            }
        }
        Err(Error::NonConvergence {
            what: "VI oracle",
            iterations: params.max_iter,
            last_change: change,
        })
    }
}

/// The VI solution over `cap_i C_i`, started from the origin.
pub fn oracle_vi_solve(
    sets: &[NonexpansiveOp],
    f: &Contraction,
    a: &MonotoneOperator,
    mu: f64,
    gamma: f64,
    params: &VIOracleParams,
) -> Result<Vector> {
    let problem = ViProblem {
        sets,
        f,
        a,
        mu,
        gamma,
    };
    problem.solve(&Vector::zeros(a.dim()), params)
}

/// `||x - P_F(x + s (gamma f - mu A) x)||`.
pub fn vi_residual(
    x: &Vector,
    problem: &ViProblem<'_>,
    s: f64,
    dykstra: DykstraParams,
) -> Result<f64> {
    problem.residual(x, s, dykstra)
}

//! The explicit cyclic scheme
//!
//! ```text
//! x_{n+1} = alpha_n gamma f(x_n) + (I - alpha_n mu A) T_n x_n
//! ```
//!
//! together with the parameter checks its convergence theory needs, the
//! per-step contraction bound for `S_n = (I - alpha_n mu A) T_n`, the
//! classical specializations, and the implicit path `x_t`.

mod implicit;
mod run;
mod specialize;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::operators::{Contraction, MonotoneOperator, NonexpansiveOp};
use crate::schedules::{Schedule, ScheduleReport, Verdict, DEFAULT_HORIZON};

pub use implicit::{implicit_path, PathProblem};
pub use run::{
    run_explicit, run_halpern, ConvergenceReport, FinalResiduals, IterationTrace, StopReason,
    StoppingRule, TraceRecord,
};
pub use specialize::{specialize, Specialization};

/// Slack used by the per-step contraction bound check.
pub const BOUND_SLACK: f64 = 1e-9;

pub const MU_WINDOW: &str = "0 < μ < 2η/k²";
pub const TAU_POSITIVE: &str = "τ = μ(η − μk²/2) > 0";
pub const GAMMA_WINDOW: &str = "0 < γ < τ/α";

/// Position in `1..=family_size` of the map used at step `n >= 1`.
///
/// Residue zero maps to the last operator, so steps `1..=N` use
/// `T_1, ..., T_N` in order and step `N + 1` wraps to `T_1`.
pub fn cyclic_index(n: usize, family_size: usize) -> usize {
    debug_assert!(n >= 1 && family_size >= 1);
    (n - 1) % family_size + 1
}

/// `mu (eta - mu k^2 / 2)`, defined for `0 < mu < 2 eta / k^2`.
pub fn compute_tau(mu: f64, eta: f64, k: f64) -> Result<f64> {
    let bound = 2.0 * eta / (k * k);
    if !(mu > 0.0 && mu < bound) {
        return Err(Error::MuOutOfRange { mu, bound });
    }
    Ok(mu * (eta - mu * k * k / 2.0))
}

/// Scheme data: constants, the cyclic family, `f`, `A` and the step sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub mu: f64,
    pub gamma: f64,
    pub family: Vec<NonexpansiveOp>,
    pub f: Contraction,
    pub a: MonotoneOperator,
    pub schedule: Schedule,
}

impl SchemeParams {
    pub fn family_size(&self) -> usize {
        self.family.len()
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `mu (eta - mu k^2 / 2)`, computed without range checks.
    pub fn tau(&self) -> f64 {
        let k = self.a.lipschitz();
        self.mu * (self.a.eta() - self.mu * k * k / 2.0)
    }

    /// `tau - gamma alpha`, the margin that drives convergence.
    pub fn margin(&self) -> f64 {
        self.tau() - self.gamma * self.f.alpha()
    }

    /// `T_n` for step `n >= 1`.
    pub fn operator_at(&self, n: usize) -> &NonexpansiveOp {
        &self.family[cyclic_index(n, self.family.len()) - 1]
    }

    /// Same problem with the family rotated left by `shift` positions.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut family = self.family.clone();
        let len = family.len();
        family.rotate_left(shift % len.max(1));
        Self {
            family,
            ..self.clone()
        }
    }
}

/// Whether cyclic compositions of the family are known to have exactly the
/// common fixed points of its members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedPointHypothesis {
    /// Every member is averaged, which implies the equality whenever the
    /// common fixed-point set is nonempty.
    Guaranteed,
    /// Some member is only known to be nonexpansive; the equality is assumed.
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate_params`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamReport {
    pub checks: Vec<Check>,
    pub tau: Option<f64>,
    pub schedule: Option<ScheduleReport>,
    pub fixed_point_hypothesis: FixedPointHypothesis,
    pub notes: Vec<String>,
}

impl ParamReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} violated: {}", c.name, c.detail))
            .collect()
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub(crate) fn into_result(self) -> Result<Self> {
        if self.ok() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(Box::new(self)))
        }
    }
}

pub(crate) fn hypothesis_for(family: &[NonexpansiveOp]) -> FixedPointHypothesis {
    if family.iter().all(NonexpansiveOp::is_averaged) {
        FixedPointHypothesis::Guaranteed
    } else {
        FixedPointHypothesis::Assumed
    }
}

pub(crate) fn check_schedule(report: &mut ParamReport, schedule: &Schedule, family_size: usize) {
    let sched = schedule.validate(family_size, DEFAULT_HORIZON);
    for (label, verdict) in sched.verdicts() {
        match verdict {
            Verdict::Pass => {}
            Verdict::Fail(why) => report.push(&format!("schedule {label}"), false, why.clone()),
            Verdict::Unverifiable(why) => {
                report.notes.push(format!("schedule {label} not verified: {why}"))
            }
        }
    }
    report.schedule = Some(sched);
}

/// Checks every constant and structural requirement of the scheme, plus the
/// schedule conditions for a family of this size.
pub fn validate_params(p: &SchemeParams) -> ParamReport {
    let mut report = ParamReport {
        checks: Vec::new(),
        tau: None,
        schedule: None,
        fixed_point_hypothesis: hypothesis_for(&p.family),
        notes: Vec::new(),
    };

    let n = p.family.len();
    report.push("family size N >= 1", n >= 1, format!("family has {n} maps"));

    let dim = p.a.dim();
    let mut dims_ok = p.f.dim() == dim;
    let mut dim_detail = format!("A acts on R^{dim}, f on R^{}", p.f.dim());
    for (i, op) in p.family.iter().enumerate() {
        if let Some(d) = op.dim() {
            if d != dim {
                dims_ok = false;
                dim_detail = format!("T_{} acts on R^{d}, A on R^{dim}", i + 1);
            }
        }
    }
    report.push("common ambient dimension", dims_ok, dim_detail);

    let (k, eta, alpha) = (p.a.lipschitz(), p.a.eta(), p.f.alpha());
    let mu_bound = 2.0 * eta / (k * k);
    report.push(
        MU_WINDOW,
        p.mu > 0.0 && p.mu < mu_bound,
        format!("μ = {}, 2η/k² = {mu_bound}", p.mu),
    );

    let tau = p.tau();
    report.push(TAU_POSITIVE, tau > 0.0, format!("τ = {tau}"));
    if tau > 0.0 {
        report.tau = Some(tau);
    }

    if alpha > 0.0 {
        let bound = tau / alpha;
        report.push(
            GAMMA_WINDOW,
            p.gamma >= 0.0 && p.gamma < bound,
            format!("γ = {}, τ/α = {bound}", p.gamma),
        );
    } else {
        report.push(
            GAMMA_WINDOW,
            p.gamma >= 0.0 && p.gamma.is_finite(),
            format!("α = 0, so any finite γ >= 0 is admissible (γ = {})", p.gamma),
        );
        report
            .notes
            .push("f is constant (α = 0): the bound γ < τ/α is vacuous".into());
    }
    if p.gamma == 0.0 {
        report
            .notes
            .push("γ = 0: the f term vanishes from the iteration".into());
    }

    if n >= 1 {
        check_schedule(&mut report, &p.schedule, n);
    }
    if report.fixed_point_hypothesis == FixedPointHypothesis::Assumed {
        report.notes.push(
            "family contains maps that are not averaged; F = F(T_N...T_1) = ... is assumed".into(),
        );
    }
    report
}

/// One step `x_{n+1} = alpha_n gamma f(x) + T_n x - alpha_n mu A(T_n x)`.
///
/// A non-finite result is returned as [`Error::NonFinite`].
pub fn explicit_step(p: &SchemeParams, n: usize, x: &Vector) -> Result<Vector> {
    let tx = p.operator_at(n).apply(x)?;
    let alpha = p.schedule.alpha(n)?;
    step_from(p, alpha, x, &tx)
}

/// Step with `T_n x` already computed.
pub(crate) fn step_from(p: &SchemeParams, alpha: f64, x: &Vector, tx: &Vector) -> Result<Vector> {
    let am = alpha * p.mu;
    let atx = p.a.apply(tx)?;
    let mut next: Vec<f64> = tx
        .as_slice()
        .iter()
        .zip(atx.as_slice())
        .map(|(t, a)| t - am * a)
        .collect();
    if p.gamma != 0.0 {
        let ag = alpha * p.gamma;
        let fx = p.f.apply(x)?;
        for (v, f) in next.iter_mut().zip(fx.as_slice()) {
            *v += ag * f;
        }
    }
    Vector::new(next)
}

/// Both sides of `||S_n x - S_n y|| <= (1 - alpha_n tau) ||x - y||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

/// `S_n z = (I - alpha_n mu A) T_n z`.
pub fn damped_map(p: &SchemeParams, n: usize, z: &Vector) -> Result<Vector> {
    let alpha = p.schedule.alpha(n)?;
    damped_map_with(p, n, alpha, z)
}

fn damped_map_with(p: &SchemeParams, n: usize, alpha: f64, z: &Vector) -> Result<Vector> {
    let tz = p.operator_at(n).apply(z)?;
    let atz = p.a.apply(&tz)?;
    Ok(Vector::axpy_unchecked(-alpha * p.mu, &atz, &tz))
}

/// Evaluates the contraction bound of `S_n` at the pair `(x, y)` with
/// `alpha_n` taken from the schedule.
pub fn contraction_bound_check(p: &SchemeParams, n: usize, x: &Vector, y: &Vector) -> Result<BoundReport> {
    let alpha = p.schedule.alpha(n)?;
    bound_check_with_alpha(p, n, alpha, x, y)
}

/// As [`contraction_bound_check`] with an explicit `alpha_n` in `(0, 1)`.
pub fn bound_check_with_alpha(
    p: &SchemeParams,
    n: usize,
    alpha: f64,
    x: &Vector,
    y: &Vector,
) -> Result<BoundReport> {
    let lhs = damped_map_with(p, n, alpha, x)?.distance(&damped_map_with(p, n, alpha, y)?)?;
    let rhs = (1.0 - alpha * p.tau()) * x.distance(y)?;
    Ok(BoundReport {
        lhs,
        rhs,
        passed: lhs <= rhs + BOUND_SLACK,
    })
}

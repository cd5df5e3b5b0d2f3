use std::collections::VecDeque;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{
    check_schedule, cyclic_index, hypothesis_for, step_from, validate_params,
    FixedPointHypothesis, ParamReport, SchemeParams,
};
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::operators::{Contraction, MonotoneOperator, NonexpansiveOp};
use crate::oracle::{family_sets, DykstraParams, VIOracleParams, ViProblem};
use crate::schedules::{Schedule, ScheduleReport};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoppingRule {
    pub max_iter: usize,
    /// Threshold on the composite residual `||x_n - T_{n+N-1}...T_n x_n||`.
    pub fix_tol: f64,
    /// Threshold on the VI residual.
    pub vi_tol: f64,
    /// The VI residual is evaluated every `check_every` iterations.
    pub check_every: usize,
    /// Keep every iterate in the trace.
    pub record_points: bool,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            max_iter: 1_000_000,
            fix_tol: 1e-6,
            vi_tol: 1e-6,
            check_every: 50,
            record_points: false,
        }
    }
}

impl StoppingRule {
    fn check(&self) -> Result<()> {
        if self.max_iter == 0 || self.check_every == 0 {
            return Err(Error::InvalidArgument(
                "stopping rule needs max_iter >= 1 and check_every >= 1".into(),
            ));
        }
        if !(self.fix_tol > 0.0 && self.vi_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "stopping tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Diagnostics at iterate `x_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub n: usize,
    pub alpha: f64,
    /// `||x_{n+1} - T_n x_n||`.
    pub step_residual: f64,
    /// `||x_n - x_{n-N}||`, once `n > N`.
    pub window_residual: Option<f64>,
    /// `||x_n - T_{n+N-1} ... T_{n+1} T_n x_n||`.
    pub composite_residual: f64,
    /// VI residual, on check iterations only.
    pub vi_residual: Option<f64>,
    #[serde(skip)]
    pub point: Option<Vector>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<TraceRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes one header row and one row per record. Missing values are
    /// empty fields. Iterate coordinates are appended as `x_1, ..., x_d`
    /// when `with_points` is set and the trace recorded them.
    pub fn write_csv<W: Write>(&self, mut out: W, with_points: bool) -> io::Result<()> {
        let dim = self
            .records
            .iter()
            .find_map(|r| r.point.as_ref().map(Vector::dim))
            .filter(|_| with_points);
        write!(
            out,
            "n,alpha_n,step_residual,window_residual,composite_residual,vi_residual"
        )?;
        if let Some(d) = dim {
            for i in 1..=d {
                write!(out, ",x_{i}")?;
            }
        }
        writeln!(out)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            write!(
                out,
                "{},{},{},{},{},{}",
                r.n,
                r.alpha,
                r.step_residual,
                opt(r.window_residual),
                r.composite_residual,
                opt(r.vi_residual)
            )?;
            if let (Some(d), Some(p)) = (dim, &r.point) {
                debug_assert_eq!(p.dim(), d);
                for v in p.as_slice() {
                    write!(out, ",{v}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ResidualMet,
    MaxIter,
    Diverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FinalResiduals {
    pub step: Option<f64>,
    pub window: Option<f64>,
    pub composite: f64,
    pub vi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub final_point: Vector,
    /// Number of steps taken to reach `final_point` from `x0`.
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub final_residuals: FinalResiduals,
    pub stopping: StoppingRule,
    pub schedule: Option<ScheduleReport>,
    pub fixed_point_hypothesis: FixedPointHypothesis,
    pub vi_residual_available: bool,
    pub notes: Vec<String>,
}

struct Engine<'a> {
    family: &'a [NonexpansiveOp],
    schedule: &'a Schedule,
    vi: Option<(ViProblem<'a>, f64, DykstraParams)>,
    stop: &'a StoppingRule,
}

struct Outcome {
    final_point: Vector,
    iterations: usize,
    stop_reason: StopReason,
    residuals: FinalResiduals,
}

impl Engine<'_> {
    fn composite(&self, x: &Vector, start: usize, tx: &Vector) -> f64 {
        let n = self.family.len();
        let c = (1..n).fold(tx.clone(), |acc, j| self.family[(start + j) % n].eval(&acc));
        x.dist(&c)
    }

    fn vi_residual(&self, x: &Vector) -> Result<Option<f64>> {
        match &self.vi {
            Some((problem, s, dykstra)) => problem.residual(x, *s, *dykstra).map(Some),
            None => Ok(None),
        }
    }

    fn iterate(
        &self,
        x0: &Vector,
        step: impl Fn(f64, &Vector, &Vector) -> Result<Vector>,
    ) -> Result<(Outcome, IterationTrace)> {
        let n_fam = self.family.len();
        let stop = self.stop;
        let mut trace = IterationTrace {
            records: Vec::with_capacity(stop.max_iter.min(1 << 20)),
        };
        let mut history: VecDeque<Vector> = VecDeque::with_capacity(n_fam + 1);
        let mut x = x0.clone();

        for n in 1..=stop.max_iter {
            let alpha = self.schedule.alpha(n)?;
            let idx = cyclic_index(n, n_fam) - 1;
            let tx = self.family[idx].apply(&x)?;
            let composite = self.composite(&x, idx, &tx);
            let window = (history.len() == n_fam).then(|| x.dist(&history[0]));
            let checking = n % stop.check_every == 0;
            let vi = if checking { self.vi_residual(&x)? } else { None };

            let next = match step(alpha, &x, &tx) {
                Ok(v) => v,
                Err(Error::NonFinite { .. }) => {
                    let residuals = FinalResiduals {
                        step: None,
                        window,
                        composite,
                        vi,
                    };
                    return Ok((
                        Outcome {
                            final_point: x,
                            iterations: n - 1,
                            stop_reason: StopReason::Diverged,
                            residuals,
                        },
                        trace,
                    ));
                }
                Err(e) => return Err(e),
            };
            let step_residual = next.dist(&tx);
            trace.records.push(TraceRecord {
                n,
                alpha,
                step_residual,
                window_residual: window,
                composite_residual: composite,
                vi_residual: vi,
                point: stop.record_points.then(|| x.clone()),
            });

            let met = checking
                && composite <= stop.fix_tol
                && match (&self.vi, vi) {
                    (Some(_), Some(r)) => r <= stop.vi_tol,
                    (None, _) => true,
                    (Some(_), None) => false,
                };
            if met {
                let residuals = FinalResiduals {
                    step: Some(step_residual),
                    window,
                    composite,
                    vi,
                };
                return Ok((
                    Outcome {
                        final_point: x,
                        iterations: n - 1,
                        stop_reason: StopReason::ResidualMet,
                        residuals,
                    },
                    trace,
                ));
            }

            history.push_back(x);
            if history.len() > n_fam {
                history.pop_front();
            }
            x = next;
        }

        let n_final = stop.max_iter + 1;
        let idx = cyclic_index(n_final, n_fam) - 1;
        let tx = self.family[idx].eval(&x);
        let residuals = FinalResiduals {
            step: trace.records.last().map(|r| r.step_residual),
            window: (history.len() == n_fam).then(|| x.dist(&history[0])),
            composite: self.composite(&x, idx, &tx),
            vi: self.vi_residual(&x)?,
        };
        Ok((
            Outcome {
                final_point: x,
                iterations: stop.max_iter,
                stop_reason: StopReason::MaxIter,
                residuals,
            },
            trace,
        ))
    }
}

/// The VI residual is only compared with `stop.vi_tol`, so its projection
/// needs no more than two extra digits.
fn residual_dykstra(oracle: &VIOracleParams, stop: &StoppingRule) -> DykstraParams {
    DykstraParams {
        tol: oracle.dykstra.tol.max(1e-2 * stop.vi_tol),
        ..oracle.dykstra
    }
}

fn check_start(x0: &Vector, dim: usize) -> Result<()> {
    if x0.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x0.dim(),
        });
    }
    Ok(())
}

fn report_from(
    outcome: Outcome,
    stop: &StoppingRule,
    params: ParamReport,
    vi_available: bool,
) -> ConvergenceReport {
    let mut notes = params.notes;
    if !vi_available {
        notes.push(
            "no projection description of the fixed-point set; VI residual unavailable, stopping on the composite residual alone".into(),
        );
    }
    ConvergenceReport {
        final_point: outcome.final_point,
        iterations: outcome.iterations,
        stop_reason: outcome.stop_reason,
        final_residuals: outcome.residuals,
        stopping: *stop,
        schedule: params.schedule,
        fixed_point_hypothesis: params.fixed_point_hypothesis,
        vi_residual_available: vi_available,
        notes,
    }
}

/// Runs the explicit cyclic scheme from `x0 = x_1`.
///
/// Each iteration records the step, window and composite residuals; the VI
/// residual is added every `stop.check_every` iterations when the family's
/// fixed-point set is an intersection of projections. The run stops when
/// the composite and VI residuals are both within tolerance, when
/// `stop.max_iter` steps have been taken, or when an iterate overflows.
pub fn run_explicit(
    p: &SchemeParams,
    x0: &Vector,
    stop: &StoppingRule,
    oracle: &VIOracleParams,
) -> Result<(ConvergenceReport, IterationTrace)> {
    stop.check()?;
    let params = validate_params(p).into_result()?;
    check_start(x0, p.dim())?;

    let sets = family_sets(&p.family).ok();
    let vi = sets.as_deref().map(|sets| {
        let problem = ViProblem {
            sets,
            f: &p.f,
            a: &p.a,
            mu: p.mu,
            gamma: p.gamma,
        };
        let s = oracle.step.unwrap_or_else(|| problem.default_step());
        (problem, s, residual_dykstra(oracle, stop))
    });
    let vi_available = vi.is_some();
    let engine = Engine {
        family: &p.family,
        schedule: &p.schedule,
        vi,
        stop,
    };
    let (outcome, trace) = engine.iterate(x0, |alpha, x, tx| step_from(p, alpha, x, tx))?;
    Ok((report_from(outcome, stop, params, vi_available), trace))
}

/// Anchored iteration `x_{n+1} = alpha_n u + (1 - alpha_n) T x_n`, whose
/// limit is the projection of `u` onto the fixed-point set of `T`.
pub fn run_halpern(
    t: &NonexpansiveOp,
    u: &Vector,
    schedule: &Schedule,
    x0: &Vector,
    stop: &StoppingRule,
    oracle: &VIOracleParams,
) -> Result<(ConvergenceReport, IterationTrace)> {
    stop.check()?;
    if let Some(d) = t.dim() {
        check_start(u, d)?;
    }
    check_start(x0, u.dim())?;
    let family = std::slice::from_ref(t);
    let mut params = ParamReport {
        checks: Vec::new(),
        tau: None,
        schedule: None,
        fixed_point_hypothesis: hypothesis_for(family),
        notes: Vec::new(),
    };
    check_schedule(&mut params, schedule, 1);
    let params = params.into_result()?;

    // Halpern's limit solves the VI with A = I - u and gamma = 0.
    let a = MonotoneOperator::identity_minus(u.clone());
    let f = Contraction::constant(Vector::zeros(u.dim()));
    let sets = t.fixed_point_sets();
    let vi = sets.as_deref().map(|sets| {
        (
            ViProblem {
                sets,
                f: &f,
                a: &a,
                mu: 1.0,
                gamma: 0.0,
            },
            oracle.step.unwrap_or(1.0),
            residual_dykstra(oracle, stop),
        )
    });
    let vi_available = vi.is_some();
    let engine = Engine {
        family,
        schedule,
        vi,
        stop,
    };
    let (outcome, trace) = engine.iterate(x0, |alpha, _x, tx| {
        let next = Vector::lincomb(alpha, u, 1.0 - alpha, tx);
        if next.is_finite() {
            Ok(next)
        } else {
            Vector::new(next.into_inner())
        }
    })?;
    Ok((report_from(outcome, stop, params, vi_available), trace))
}

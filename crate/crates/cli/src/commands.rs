use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use fixpoint_vi::oracle::{family_sets, ViProblem};
use fixpoint_vi::sampling::{normal_vector, rng};
use fixpoint_vi::schedules::{Schedule, ScheduleDescriptor, Verdict};
use fixpoint_vi::solver::{
    bound_check_with_alpha, run_explicit, run_halpern, specialize, ConvergenceReport,
    IterationTrace, PathProblem, SchemeParams, Specialization, StopReason,
};
use fixpoint_vi::{MonotoneOperator, NonexpansiveOp, Vector};
use log::{debug, info};
use serde::Serialize;

use crate::{CliError, ProblemFile, EXIT_DIVERGED, EXIT_INPUT, EXIT_MAX_ITER, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// The cyclic scheme with every constant taken from the file.
    Explicit,
    /// `x_{n+1} = alpha_n u + (1 - alpha_n) T x_n`.
    Halpern,
    /// Anchor `u`, `gamma = mu = 1`, cyclic family.
    Xu,
    /// `mu = 1`, single map.
    MarinoXu,
    /// `gamma = 0`, single map.
    Yamada,
    /// Single map, constants from the file.
    Tian,
}

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub scheme: Scheme,
    pub anchor: Option<Vec<f64>>,
    pub points: bool,
    pub timestamp: bool,
    pub jobs: usize,
}

pub fn exit_code(reason: StopReason) -> i32 {
    match reason {
        StopReason::ResidualMet => EXIT_OK,
        StopReason::MaxIter => EXIT_MAX_ITER,
        StopReason::Diverged => EXIT_DIVERGED,
    }
}

fn single_op(file: &ProblemFile, scheme: Scheme) -> Result<NonexpansiveOp, CliError> {
    match file.family.as_slice() {
        [op] => Ok(op.clone()),
        ops => Err(CliError::Input(format!(
            "field `family`: scheme {scheme:?} takes a single map, the file has {}",
            ops.len()
        ))),
    }
}

fn anchor(file: &ProblemFile, flag: Option<&[f64]>) -> Result<Vector, CliError> {
    let u = match flag {
        Some(u) => Vector::new(u.to_vec())?,
        None => file.f.constant_value().cloned().ok_or_else(|| {
            CliError::Input("anchored schemes need --anchor or a constant `f`".into())
        })?,
    };
    if u.dim() != file.dimension {
        return Err(CliError::Input(format!(
            "--anchor has dimension {}, expected {}",
            u.dim(),
            file.dimension
        )));
    }
    Ok(u)
}

/// The scheme as parameters of the cyclic iteration. Halpern's scheme is
/// Xu's with `A = I`.
pub fn effective_params(
    file: &ProblemFile,
    scheme: Scheme,
    anchor_flag: Option<&[f64]>,
) -> Result<SchemeParams, CliError> {
    let p = match scheme {
        Scheme::Explicit => file.to_params(),
        Scheme::Halpern | Scheme::Xu => {
            let a = if scheme == Scheme::Halpern {
                single_op(file, scheme)?;
                MonotoneOperator::identity_minus(Vector::zeros(file.dimension))
            } else {
                file.a.clone()
            };
            specialize(Specialization::Xu {
                family: file.family.clone(),
                anchor: anchor(file, anchor_flag)?,
                a,
                schedule: file.schedule.clone(),
            })?
        }
        Scheme::MarinoXu => specialize(Specialization::MarinoXu {
            op: single_op(file, scheme)?,
            f: file.f.clone(),
            a: file.a.clone(),
            gamma: file.gamma,
            schedule: file.schedule.clone(),
        })?,
        Scheme::Yamada => specialize(Specialization::Yamada {
            op: single_op(file, scheme)?,
            a: file.a.clone(),
            mu: file.mu,
            schedule: file.schedule.clone(),
        })?,
        Scheme::Tian => specialize(Specialization::Tian {
            op: single_op(file, scheme)?,
            f: file.f.clone(),
            a: file.a.clone(),
            mu: file.mu,
            gamma: file.gamma,
            schedule: file.schedule.clone(),
        })?,
    };
    Ok(p)
}

/// Runs the requested scheme on a parsed problem.
pub fn execute(
    file: &ProblemFile,
    scheme: Scheme,
    anchor_flag: Option<&[f64]>,
    record_points: bool,
) -> Result<(ConvergenceReport, IterationTrace), CliError> {
    let mut stop = file.stopping;
    stop.record_points |= record_points;
    let x0 = file.start();
    if scheme == Scheme::Halpern {
        let t = single_op(file, scheme)?;
        let u = anchor(file, anchor_flag)?;
        return Ok(run_halpern(&t, &u, &file.schedule, &x0, &stop, &file.oracle)?);
    }
    let p = effective_params(file, scheme, anchor_flag)?;
    Ok(run_explicit(&p, &x0, &stop, &file.oracle)?)
}

#[derive(Serialize)]
struct RunReport<'a> {
    problem: String,
    scheme: Scheme,
    #[serde(flatten)]
    report: &'a ConvergenceReport,
}

fn write_outputs(
    dir: &Path,
    problem: &Path,
    opts: &RunOptions,
    report: &ConvergenceReport,
    trace: &IterationTrace,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut csv = BufWriter::new(File::create(dir.join("trace.csv"))?);
    if opts.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(
            csv,
            "# generated by fixpoint-vi {} at unix time {secs}",
            env!("CARGO_PKG_VERSION")
        )?;
    }
    trace.write_csv(&mut csv, opts.points)?;
    csv.flush()?;
    let json = serde_json::to_string_pretty(&RunReport {
        problem: problem.display().to_string(),
        scheme: opts.scheme,
        report,
    })
    .map_err(std::io::Error::from)?;
    fs::write(dir.join("report.json"), json + "\n")?;
    Ok(())
}

fn run_one(problem: &Path, dir: &Path, opts: &RunOptions) -> (i32, String) {
    let outcome = (|| {
        let file = ProblemFile::load(problem)?;
        info!("running {} with scheme {:?}", problem.display(), opts.scheme);
        let (report, trace) = execute(&file, opts.scheme, opts.anchor.as_deref(), opts.points)?;
        write_outputs(dir, problem, opts, &report, &trace)?;
        Ok::<_, CliError>(report)
    })();
    match outcome {
        Ok(report) => {
            let line = format!(
                "{}: {} after {} iterations, x = {:?}, composite residual {:.3e}{}",
                problem.display(),
                serde_json::to_value(report.stop_reason).unwrap().as_str().unwrap_or(""),
                report.iterations,
                report.final_point,
                report.final_residuals.composite,
                report
                    .final_residuals
                    .vi
                    .map(|v| format!(", VI residual {v:.3e}"))
                    .unwrap_or_default(),
            );
            (exit_code(report.stop_reason), line)
        }
        Err(e) => (e.exit_code(), format!("error: {e}")),
    }
}

/// Output directory per problem: `out_dir` itself for a single problem,
/// `out_dir/<file stem>` otherwise.
fn output_dirs(problems: &[PathBuf], out_dir: &Path) -> Vec<PathBuf> {
    if problems.len() == 1 {
        return vec![out_dir.to_path_buf()];
    }
    let mut seen = HashSet::new();
    problems
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let stem = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("problem-{i}"));
            let name = if seen.insert(stem.clone()) {
                stem
            } else {
                format!("{stem}-{i}")
            };
            out_dir.join(name)
        })
        .collect()
}

/// Runs every problem, up to `opts.jobs` at a time. Returns the largest
/// exit code.
pub fn cmd_run(problems: &[PathBuf], opts: &RunOptions) -> i32 {
    let dirs = output_dirs(problems, &opts.out_dir);
    let results: Vec<Mutex<Option<(i32, String)>>> =
        problems.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..opts.jobs.clamp(1, problems.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= problems.len() {
                    break;
                }
                let r = run_one(&problems[i], &dirs[i], opts);
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });
    let mut code = EXIT_OK;
    for r in results {
        let (c, line) = r.into_inner().unwrap().expect("every job ran");
        if c == EXIT_OK {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        code = code.max(c);
    }
    code
}

pub struct VerifyOptions {
    pub scheme: Scheme,
    pub anchor: Option<Vec<f64>>,
    pub tol: f64,
    pub implicit_path: bool,
    pub lemma_samples: usize,
}

/// Runs the scheme and the independent oracle, prints the comparison and
/// returns the exit code.
pub fn cmd_verify(problem: &Path, opts: &VerifyOptions) -> i32 {
    match verify(problem, opts) {
        Ok((code, text)) => {
            print!("{text}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn verify(problem: &Path, opts: &VerifyOptions) -> Result<(i32, String), CliError> {
    let file = ProblemFile::load(problem)?;
    let p = effective_params(&file, opts.scheme, opts.anchor.as_deref())?;
    let sets = family_sets(&p.family).map_err(|e| {
        CliError::Unsupported(format!(
            "{e}; the oracle needs every map to be a projection, an average of one, or a composition of such maps"
        ))
    })?;
    let vi = ViProblem {
        sets: &sets,
        f: &p.f,
        a: &p.a,
        mu: p.mu,
        gamma: p.gamma,
    };
    let step = file.oracle.step.unwrap_or_else(|| vi.default_step());
    let x_oracle = vi.solve(&Vector::zeros(p.dim()), &file.oracle)?;
    debug!("oracle solution {x_oracle:?}");

    let (report, _) = execute(&file, opts.scheme, opts.anchor.as_deref(), false)?;
    let x_hat = &report.final_point;
    let gap = x_hat.distance(&x_oracle)?;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "problem: {}", problem.display()).unwrap();
    writeln!(w, "scheme: {:?}", opts.scheme).unwrap();
    writeln!(
        w,
        "run: {} after {} iterations",
        serde_json::to_value(report.stop_reason).unwrap().as_str().unwrap_or(""),
        report.iterations
    )
    .unwrap();
    writeln!(w, "scheme limit:  {x_hat:?}").unwrap();
    writeln!(w, "oracle limit:  {x_oracle:?}").unwrap();
    writeln!(w, "distance: {gap:.3e} (tolerance {:e})", opts.tol).unwrap();
    let dyk = file.oracle.dykstra;
    writeln!(
        w,
        "VI residual (step {step:.3e}): scheme {:.3e}, oracle {:.3e}",
        vi.residual(x_hat, step, dyk)?,
        vi.residual(&x_oracle, step, dyk)?
    )
    .unwrap();

    // Spot checks of the contraction bound around the computed limit.
    let mut r = rng(0);
    let spread = 1.0 + x_hat.norm();
    let (mut passed, mut worst) = (0, f64::NEG_INFINITY);
    for i in 0..opts.lemma_samples {
        let n = 1 + i * 7919 % 10_000;
        let alpha = p.schedule.alpha(n)?;
        let x = Vector::axpy(1.0, &normal_vector(&mut r, p.dim(), spread), x_hat)?;
        let y = Vector::axpy(1.0, &normal_vector(&mut r, p.dim(), spread), x_hat)?;
        let b = bound_check_with_alpha(&p, n, alpha, &x, &y)?;
        worst = worst.max(b.lhs - b.rhs);
        passed += usize::from(b.passed);
    }
    writeln!(
        w,
        "contraction bound |S_n x - S_n y| <= (1 - alpha_n tau)|x - y|: {passed}/{} pairs pass, max lhs - rhs {worst:.3e}",
        opts.lemma_samples
    )
    .unwrap();
    let lemma_ok = passed == opts.lemma_samples;

    if opts.implicit_path {
        let t_map = NonexpansiveOp::cyclic_composite(&p.family, 0)?;
        let path = PathProblem {
            op: &t_map,
            f: &p.f,
            a: &p.a,
            mu: p.mu,
            gamma: p.gamma,
        };
        let mut dists = Vec::new();
        let mut start: Option<Vector> = None;
        for t in [0.1, 0.01, 0.001] {
            let xt = path.solve(t, 1e-12, start.as_ref())?;
            let d = xt.distance(x_hat)?;
            writeln!(w, "implicit path t = {t}: |x_t - x_hat| = {d:.3e}").unwrap();
            dists.push(d);
            start = Some(xt);
        }
        let spread = dists.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - dists.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let shape = if spread < 1e-9 {
            // The unconstrained root lies in F: x_t is the same point for all t.
            "constant"
        } else if dists.windows(2).all(|d| d[1] < d[0]) {
            "decreasing"
        } else {
            "NOT decreasing"
        };
        writeln!(w, "implicit path distances {shape}").unwrap();
    }

    let agree = gap <= opts.tol;
    writeln!(w, "verdict: {}", if agree && lemma_ok { "agree" } else { "DISAGREE" }).unwrap();
    let code = if report.stop_reason == StopReason::Diverged {
        EXIT_DIVERGED
    } else if agree && lemma_ok {
        EXIT_OK
    } else {
        EXIT_MAX_ITER
    };
    Ok((code, out))
}

/// Reads a schedule given inline as JSON or as a path to a JSON file.
pub fn parse_schedule(arg: &str) -> Result<Schedule, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    let desc: ScheduleDescriptor = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Input(format!("schedule: field `{}`: {}", e.path(), e.inner())))?;
    Ok(Schedule::try_from(desc)?)
}

pub fn cmd_schedule_check(arg: &str, family_size: usize, horizon: usize) -> i32 {
    let schedule = match parse_schedule(arg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let rep = schedule.validate(family_size, horizon);
    println!("N = {family_size}, horizon probed = {}", rep.horizon);
    for (label, verdict) in rep.verdicts() {
        match verdict {
            Verdict::Pass => println!("{label}: pass"),
            Verdict::Fail(why) => println!("{label}: FAIL ({why})"),
            Verdict::Unverifiable(why) => println!("{label}: unverifiable ({why})"),
        }
    }
    if let Some(a) = rep.alpha_at_horizon {
        println!("alpha at horizon: {a:e}");
    }
    if let Some(r) = rep.measured_ratio {
        println!("alpha_h / alpha_(h+N): {r}");
    }
    if rep.all_pass() {
        EXIT_OK
    } else {
        EXIT_MAX_ITER
    }
}

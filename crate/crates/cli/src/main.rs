use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fixpoint_vi::schedules::DEFAULT_HORIZON;
use fixpoint_vi_cli::commands::{
    cmd_run, cmd_schedule_check, cmd_verify, RunOptions, Scheme, VerifyOptions,
};

/// Variational inequalities over common fixed points of nonexpansive maps.
#[derive(Parser)]
#[command(name = "fixpoint-vi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the iteration and write trace.csv and report.json.
    Run {
        /// Problem files (JSON).
        #[arg(required = true)]
        problems: Vec<PathBuf>,
        /// Output directory; one subdirectory per problem when several are given.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "explicit")]
        scheme: Scheme,
        /// Anchor u for the halpern and xu schemes (defaults to a constant f).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        anchor: Option<Vec<f64>>,
        /// Append the iterate coordinates to every trace row.
        #[arg(long)]
        points: bool,
        /// Omit the timestamp comment line from trace.csv.
        #[arg(long)]
        no_timestamp: bool,
        /// Number of problems solved concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compare the iteration's limit with the independent oracle.
    Verify {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "explicit")]
        scheme: Scheme,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        anchor: Option<Vec<f64>>,
        /// Largest accepted distance between the two limits.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Also report the distance of the implicit path x_t to the limit.
        #[arg(long)]
        implicit_path: bool,
        /// Random pairs for the contraction-bound spot check.
        #[arg(long, default_value_t = 100)]
        lemma_samples: usize,
    },
    /// Check the step-size conditions for a family of N maps.
    ScheduleCheck {
        /// Schedule as inline JSON or a path to a JSON file.
        schedule: String,
        /// Family size N.
        #[arg(long = "n", default_value_t = 1)]
        family_size: usize,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FIXPOINT_VI_LOG", "warn"))
        .init();
    let code = match Cli::parse().command {
        Command::Run {
            problems,
            out_dir,
            scheme,
            anchor,
            points,
            no_timestamp,
            jobs,
        } => cmd_run(
            &problems,
            &RunOptions {
                out_dir,
                scheme,
                anchor,
                points,
                timestamp: !no_timestamp,
                jobs,
            },
        ),
        Command::Verify {
            problem,
            scheme,
            anchor,
            tol,
            implicit_path,
            lemma_samples,
        } => cmd_verify(
            &problem,
            &VerifyOptions {
                scheme,
                anchor,
                tol,
                implicit_path,
                lemma_samples,
            },
        ),
        Command::ScheduleCheck {
            schedule,
            family_size,
            horizon,
        } => cmd_schedule_check(&schedule, family_size, horizon),
    };
    ExitCode::from(code as u8)
}

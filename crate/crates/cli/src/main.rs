use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thetahat_cli::dsl::parse_form;
use thetahat_cli::manifest::{parse_manifest, IntegrateTask, Manifest, PullbackTarget, Task};
use thetahat_cli::tasks::{run_all, Context};

/// Exact checks and Chern-Weil integrals on the space of torsion-free
/// connections.
#[derive(Parser, Debug)]
#[command(name = "thetahat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit wall-clock fields so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand dω_k on the connection chart and check it vanishes.
    VerifyClosed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Check the transition laws of θ̂ and Θ̂ for a manifest's [transition].
    TransitionCheck {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Pull ω_k, or a given form, back along a manifest's connection.
    Pullback {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, conflicts_with = "form", required_unless_present = "form")]
        k: Option<usize>,
        /// A form on the connection chart, in the expression language.
        #[arg(long)]
        form: Option<String>,
    },
    /// Integrate (i/2π)^k σ_k(R) over a built-in fixture.
    Integrate {
        #[arg(long)]
        fixture: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
    },
    /// Run every task listed in a manifest.
    Report {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn load(path: &Path) -> Result<Manifest, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_manifest(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("THETAHAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|t| *t >= 1)
        .ok_or_else(|| format!("THETAHAT_THREADS must be a positive integer, found '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn execute(cli: Cli) -> Result<bool, String> {
    configure_threads()?;
    let timings = !cli.common.no_timings;
    let (ctx, tasks) = match cli.command {
        Command::VerifyClosed { n, k } => (
            Context {
                n: Some(n),
                timings,
                ..Context::default()
            },
            vec![Task::VerifyClosed { k }],
        ),
        Command::TransitionCheck { manifest } => {
            let m = load(&manifest)?;
            (Context::from_manifest(&m, timings).map_err(|e| e.to_string())?, vec![Task::TransitionCheck])
        }
        Command::Pullback { manifest, k, form } => {
            let m = load(&manifest)?;
            let target = match (k, form) {
                (Some(k), _) => PullbackTarget::Omega(k),
                (None, Some(text)) => PullbackTarget::Form(parse_form(&text, m.n).map_err(|e| format!("--form {e}"))?),
                (None, None) => unreachable!("clap requires one of k and form"),
            };
            (
                Context::from_manifest(&m, timings).map_err(|e| e.to_string())?,
                vec![Task::Pullback { target }],
            )
        }
        Command::Integrate {
            fixture,
            k,
            grid,
            tol,
            seed,
            eps,
        } => (
            Context {
                timings,
                ..Context::default()
            },
            vec![Task::Integrate(IntegrateTask {
                fixture,
                k,
                grid,
                seed,
                eps,
                tol,
            })],
        ),
        Command::Report { manifest } => {
            let m = load(&manifest)?;
            let tasks = m.tasks.clone();
            (Context::from_manifest(&m, timings).map_err(|e| e.to_string())?, tasks)
        }
    };
    let report = run_all(&ctx, &tasks);
    let text = report.render();
    match &cli.common.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.success())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("thetahat: {msg}");
            ExitCode::from(2)
        }
    }
}

//! Command-line verification harness.
//!
//! ```text
//! verify group --n 3 --seed 42
//! verify geometry --manifold s2:r=1
//! verify sl --manifold s2:r=1 --A "i*0.3*x1 dx2" --B "i*0.1 dx1" --points 20 --seed 42 --out report.json
//! ```
//!
//! Every subcommand accepts `--config file.toml`; flags override file values.
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 for
//! usage or configuration errors. The log level comes from `RUST_LOG`.

pub mod config;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::Config;
pub use report::{CheckRecord, ReportBuilder, VerificationReport};
pub use suites::{run_geometry_suite, run_group_suite, run_lichnerowicz_suite};

use crate::Error;
use config::{build_connection, ManifoldConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "verify", about = "Numerical verification of spinor bundle identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clifford algebra, Spin^T(n) and representation checks.
    Group {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Frame, connection and curvature checks on a chart.
    Geometry {
        #[arg(long)]
        manifold: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Schrödinger–Lichnerowicz and related spinor identities.
    Sl {
        #[arg(long)]
        manifold: Option<String>,
        #[arg(long = "A", allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(path: Option<&Path>) -> crate::Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn manifold_config(flag: Option<String>, cfg: &Config) -> crate::Result<ManifoldConfig> {
    match (flag, &cfg.manifold) {
        (Some(id), _) => Ok(ManifoldConfig::from_id(&id)),
        (None, Some(m)) => Ok(m.clone()),
        (None, None) => Err(Error::Config("no manifold given (use --manifold or a config file)".into())),
    }
}

fn positive(points: usize) -> crate::Result<usize> {
    if points == 0 {
        Err(Error::Config("points must be positive".into()))
    } else {
        Ok(points)
    }
}

/// Runs the selected suite; errors here are configuration or usage errors.
pub fn execute(command: Command) -> crate::Result<(VerificationReport, Option<PathBuf>)> {
    match command {
        Command::Group { n, common } => {
            let cfg = load_config(common.config.as_deref())?;
            let n = n
                .or(cfg.group.as_ref().and_then(|g| g.n))
                .ok_or_else(|| Error::Config("no dimension given (use --n)".into()))?;
            let seed = common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            Ok((run_group_suite(n, seed, &cfg.tolerances)?, common.out))
        }
        Command::Geometry {
            manifold,
            points,
            common,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let chart = manifold_config(manifold, &cfg)?.build()?;
            let points = positive(points.or(cfg.points).unwrap_or(suites::defaults::POINTS))?;
            let seed = common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            Ok((run_geometry_suite(&chart, points, seed, &cfg.tolerances)?, common.out))
        }
        Command::Sl {
            manifold,
            a,
            b,
            points,
            common,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let chart = manifold_config(manifold, &cfg)?.build()?;
            let conn_cfg = cfg.connection.clone().unwrap_or_default();
            let a = a.or(conn_cfg.a);
            let b = b.or(conn_cfg.b);
            let conn = build_connection(a.as_deref(), b.as_deref(), chart.dim())?;
            let points = positive(points.or(cfg.points).unwrap_or(suites::defaults::POINTS))?;
            let seed = common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            Ok((run_lichnerowicz_suite(&chart, &conn, points, seed, &cfg.tolerances)?, common.out))
        }
    }
}

/// Parses arguments, runs the suite and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let (report, out) = match execute(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            };
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, report.to_json() + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            let _ = write!(std::io::stdout(), "{}", report.summary());
        }
        None => {
            let _ = writeln!(std::io::stdout(), "{}", report.to_json());
        }
    }
    for c in report.failed_checks() {
        log::error!("{} failed: {:.3e} > {:.1e}", c.name, c.max_residual, c.tolerance);
    }
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
